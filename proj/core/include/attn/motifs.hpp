#pragma once

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "attn/cascade.hpp"
#include "attn/digraph.hpp"
#include "attn/vf2.hpp"

namespace attn {

enum class Motif { self_loop, dyadic, chain, loop, outgoing_star, incoming_star };

inline constexpr std::array<Motif, 6> kAllMotifs = {Motif::self_loop, Motif::dyadic,        Motif::chain,
                                                    Motif::loop,      Motif::outgoing_star, Motif::incoming_star};

std::string_view to_string(Motif motif);
std::optional<Motif> parse_motif(std::string_view name);

// Smallest and largest legal template sizes (largest is 0 when unbounded).
int min_template_size(Motif motif);
int max_template_size(Motif motif);

enum class MotifPresence { absent, subgraph, exact };

std::string_view to_string(MotifPresence presence);
std::optional<MotifPresence> parse_motif_presence(std::string_view text);

using MotifPresenceSet = std::array<MotifPresence, kAllMotifs.size()>;

// Throws DomainError when n is outside the family's legal range.
DiGraph motif_template(Motif motif, int n);

// How "template is a subgraph of g" is read for loops and stars. Chains and
// dyadic pairs always use edge-subgraph matching; a self-loop template is a
// single vertex, where both readings coincide.
enum class StarLoopSemantics { induced, edge_subgraph };

// fast: structural tests per family. generic: VF2 over every template size.
enum class MatchStrategy { fast, generic };

struct MotifOptions {
  // Largest template size tried; 0 means the graph's own order.
  int max_n = 0;
  StarLoopSemantics star_loop = StarLoopSemantics::induced;
  MatchStrategy strategy = MatchStrategy::fast;
};

MatchKind subgraph_match_kind(Motif motif, StarLoopSemantics semantics);

MotifPresenceSet detect_motifs(const DiGraph& graph, const MotifOptions& options = {});

// Who replied to whom within one cascade. vertices are sorted user ids;
// edges are sorted, de-duplicated (replier, repliee) index pairs.
struct UserGraph {
  std::string cascade_id;
  std::vector<std::string> vertices;
  std::vector<std::pair<int, int>> edges;

  DiGraph graph() const;
};

// Throws DataError naming the message when a node has no author.
UserGraph user_graph(const Cascade& cascade);

struct MotifReport {
  std::string cascade_id;
  MotifPresenceSet present{};

  MotifPresence operator[](Motif m) const { return present[static_cast<std::size_t>(m)]; }
  bool operator==(const MotifReport&) const = default;
};

MotifReport detect_motifs(const UserGraph& graph, const MotifOptions& options = {});
std::vector<MotifReport> detect_all_motifs(std::span<const Cascade> cascades, const MotifOptions& options = {},
                                           unsigned jobs = 1);

struct MotifTally {
  std::size_t cascades = 0;
  // Cascades where the family is present (subgraph or exact) / exact.
  std::array<std::size_t, kAllMotifs.size()> present{};
  std::array<std::size_t, kAllMotifs.size()> exact{};

  std::size_t total_presences() const;
  // present[m] / total_presences(); all zero when nothing is present.
  std::array<double, kAllMotifs.size()> frequencies() const;
};

// Groups reports by class_keys[i] (parallel to reports). Classes in which no
// motif is present at all are omitted.
std::map<std::string, MotifTally> motif_frequencies(std::span<const MotifReport> reports,
                                                    std::span<const std::string> class_keys);

// cascade_id,self_loop,dyadic,chain,loop,outgoing_star,incoming_star
void write_motif_reports(std::ostream& out, std::span<const MotifReport> reports);
std::vector<MotifReport> read_motif_reports(std::istream& in, std::string_view source = "motifs");

}  // namespace attn
