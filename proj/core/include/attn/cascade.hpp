#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attn/ingest.hpp"
#include "attn/time.hpp"

namespace attn {

struct CascadeNode {
  std::string message_id;
  std::string user_id;
  Timestamp timestamp{};
  std::int64_t seq = 0;
  // Index of the replied-to node in Cascade::nodes; -1 for the root.
  int parent = -1;
  int depth = 0;

  bool operator==(const CascadeNode&) const = default;
};

// A reply tree. nodes are ordered by (timestamp, seq), so nodes[0] is the
// root and every parent index is smaller than its child's index.
struct Cascade {
  std::string cascade_id;
  std::string group_id;
  std::vector<CascadeNode> nodes;

  const CascadeNode& root() const { return nodes.front(); }
  std::size_t size() const { return nodes.size(); }
  Timestamp start() const { return nodes.front().timestamp; }
  Timestamp end() const;

  bool operator==(const Cascade&) const = default;
};

std::string make_cascade_id(std::string_view group_id, std::string_view root_message_id);

// Extracts every connected component with at least two messages from one
// group's reply graph. No time window is applied. Output is ordered by root
// (timestamp, seq).
// Throws DataError if messages span several groups or repeat an id, and
// InvariantError if a reply edge does not point strictly back in time.
std::vector<Cascade> build_cascades(std::span<const Message> group_messages);

// Partitions by group, builds groups on up to `jobs` threads, and returns
// cascades ordered by (group_id, root order).
std::vector<Cascade> build_all_cascades(std::span<const Message> messages, unsigned jobs = 1);

int depth(const Cascade& cascade);

// Checks tree shape, depth labels, time order and the two-node minimum.
// Throws InvariantError describing the first violation.
void validate_cascade(const Cascade& cascade);

struct Interval {
  Timestamp start{};
  Timestamp end{};
};

inline Interval interval_of(const Cascade& c) { return {c.start(), c.end()}; }

// The thirteen Allen relations of a relative to b.
enum class AllenRelation {
  before,
  meets,
  overlaps,
  finished_by,
  contains,
  starts,
  equals,
  started_by,
  during,
  finishes,
  overlapped_by,
  met_by,
  after,
};

std::string_view to_string(AllenRelation relation);

// Degenerate (instantaneous) intervals are classified by the same endpoint
// comparisons, checked in the enumerator order above after equals/before/after.
AllenRelation allen_relation(const Interval& a, const Interval& b);
AllenRelation overlap_relation(const Cascade& a, const Cascade& b);

// True iff one interval ends strictly before the other starts.
constexpr bool disjoint(AllenRelation r) {
  return r == AllenRelation::before || r == AllenRelation::after;
}

// One JSON object per line: cascade_id, group_id, root, start, end, nodes,
// parent (child -> parent), depth, user, timestamp, seq.
void write_cascades(std::ostream& out, std::span<const Cascade> cascades);
std::string to_jsonl(const Cascade& cascade);
// Throws DataError naming the line for malformed records or broken trees.
std::vector<Cascade> read_cascades(std::istream& in, std::string_view source = "cascades");

}  // namespace attn
