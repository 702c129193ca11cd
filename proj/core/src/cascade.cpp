#include "attn/cascade.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "attn/errors.hpp"
#include "attn/parallel.hpp"

namespace attn {
namespace {

using nlohmann::json;

bool node_before(const CascadeNode& a, const CascadeNode& b) {
  return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.seq < b.seq;
}

}  // namespace

Timestamp Cascade::end() const {
  Timestamp last = nodes.front().timestamp;
  for (const auto& n : nodes) last = std::max(last, n.timestamp);
  return last;
}

std::string make_cascade_id(std::string_view group_id, std::string_view root_message_id) {
  std::string id;
  id.reserve(group_id.size() + root_message_id.size() + 1);
  id.append(group_id).append(":").append(root_message_id);
  return id;
}

std::vector<Cascade> build_cascades(std::span<const Message> group_messages) {
  std::vector<Cascade> cascades;
  if (group_messages.empty()) return cascades;
  const std::string& group_id = group_messages.front().group_id;

  const std::size_t n = group_messages.size();
  std::unordered_map<std::string_view, std::size_t> index;
  index.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = group_messages[i];
    if (m.group_id != group_id) {
      throw DataError("build_cascades: message '" + m.message_id + "' belongs to group '" + m.group_id +
                      "', expected '" + group_id + "'");
    }
    if (!index.emplace(m.message_id, i).second) {
      throw DataError("build_cascades: duplicate message_id '" + m.message_id + "' in group '" + group_id + "'");
    }
  }

  // Reply edges as child lists; parent_of kept for the time-order check.
  std::vector<std::vector<std::size_t>> children(n);
  std::vector<bool> has_parent(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = group_messages[i];
    if (!m.reply_to) continue;
    const auto it = index.find(*m.reply_to);
    if (it == index.end()) {
      throw InvariantError("reply from '" + m.message_id + "' to unknown message '" + *m.reply_to + "' in group '" +
                           group_id + "' (dangling replies must be resolved at ingest)");
    }
    if (!posted_before(group_messages[it->second], m)) {
      throw InvariantError("reply edge '" + m.message_id + "' -> '" + *m.reply_to + "' in group '" + group_id +
                           "' does not point back in time");
    }
    children[it->second].push_back(i);
    has_parent[i] = true;
  }

  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i) {
    if (!has_parent[i] && !children[i].empty()) roots.push_back(i);
  }
  std::sort(roots.begin(), roots.end(), [&](std::size_t a, std::size_t b) {
    return posted_before(group_messages[a], group_messages[b]);
  });

  std::vector<std::size_t> order;
  std::vector<int> depth_of(n, 0);
  std::vector<std::size_t> parent_msg(n, 0);
  std::vector<int> slot(n, -1);
  for (const std::size_t root : roots) {
    order.clear();
    order.push_back(root);
    depth_of[root] = 0;
    for (std::size_t head = 0; head < order.size(); ++head) {
      const std::size_t u = order[head];
      for (const std::size_t v : children[u]) {
        depth_of[v] = depth_of[u] + 1;
        parent_msg[v] = u;
        order.push_back(v);
      }
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return posted_before(group_messages[a], group_messages[b]);
    });

    Cascade c;
    c.group_id = group_id;
    c.cascade_id = make_cascade_id(group_id, group_messages[root].message_id);
    c.nodes.reserve(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) slot[order[k]] = static_cast<int>(k);
    for (const std::size_t i : order) {
      const auto& m = group_messages[i];
      CascadeNode node;
      node.message_id = m.message_id;
      node.user_id = m.user_id;
      node.timestamp = m.timestamp;
      node.seq = m.seq;
      node.depth = depth_of[i];
      node.parent = i == root ? -1 : slot[parent_msg[i]];
      c.nodes.push_back(std::move(node));
    }
    cascades.push_back(std::move(c));
  }
  return cascades;
}

std::vector<Cascade> build_all_cascades(std::span<const Message> messages, unsigned jobs) {
  std::map<std::string_view, std::vector<Message>> groups;
  for (const auto& m : messages) groups[m.group_id].push_back(m);
  std::vector<const std::vector<Message>*> work;
  work.reserve(groups.size());
  for (const auto& [id, msgs] : groups) work.push_back(&msgs);

  std::vector<std::vector<Cascade>> per_group(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t g) { per_group[g] = build_cascades(*work[g]); });

  std::vector<Cascade> all;
  for (auto& cs : per_group) {
    for (auto& c : cs) all.push_back(std::move(c));
  }
  return all;
}

int depth(const Cascade& cascade) {
  int d = 0;
  for (const auto& n : cascade.nodes) d = std::max(d, n.depth);
  return d;
}

void validate_cascade(const Cascade& c) {
  const auto fail = [&](const std::string& what) { throw InvariantError("cascade '" + c.cascade_id + "': " + what); };
  if (c.nodes.size() < 2) fail("has fewer than two messages");
  if (c.nodes[0].parent != -1 || c.nodes[0].depth != 0) fail("root must have no parent and depth 0");
  if (c.cascade_id != make_cascade_id(c.group_id, c.nodes[0].message_id)) fail("id does not match group and root");
  std::unordered_map<std::string_view, int> seen;
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const auto& node = c.nodes[i];
    if (!seen.emplace(node.message_id, static_cast<int>(i)).second) fail("repeats message '" + node.message_id + "'");
    if (i == 0) continue;
    if (node.parent < 0 || node.parent >= static_cast<int>(i)) {
      fail("message '" + node.message_id + "' has a parent that is not an earlier node");
    }
    const auto& parent = c.nodes[static_cast<std::size_t>(node.parent)];
    if (!node_before(parent, node)) fail("message '" + node.message_id + "' does not follow its parent in time");
    if (node.depth != parent.depth + 1) fail("message '" + node.message_id + "' has an inconsistent depth");
    if (!node_before(c.nodes[i - 1], node)) fail("nodes are not ordered by (timestamp, seq)");
  }
}

std::string_view to_string(AllenRelation r) {
  switch (r) {
    case AllenRelation::before: return "before";
    case AllenRelation::meets: return "meets";
    case AllenRelation::overlaps: return "overlaps";
    case AllenRelation::finished_by: return "finished_by";
    case AllenRelation::contains: return "contains";
    case AllenRelation::starts: return "starts";
    case AllenRelation::equals: return "equals";
    case AllenRelation::started_by: return "started_by";
    case AllenRelation::during: return "during";
    case AllenRelation::finishes: return "finishes";
    case AllenRelation::overlapped_by: return "overlapped_by";
    case AllenRelation::met_by: return "met_by";
    case AllenRelation::after: return "after";
  }
  return "unknown";
}

AllenRelation allen_relation(const Interval& a, const Interval& b) {
  if (a.start == b.start && a.end == b.end) return AllenRelation::equals;
  if (a.end < b.start) return AllenRelation::before;
  if (b.end < a.start) return AllenRelation::after;
  if (a.end == b.start) return AllenRelation::meets;
  if (b.end == a.start) return AllenRelation::met_by;
  if (a.start < b.start) {
    if (a.end < b.end) return AllenRelation::overlaps;
    if (a.end == b.end) return AllenRelation::finished_by;
    return AllenRelation::contains;
  }
  if (a.start == b.start) return a.end < b.end ? AllenRelation::starts : AllenRelation::started_by;
  if (a.end < b.end) return AllenRelation::during;
  if (a.end == b.end) return AllenRelation::finishes;
  return AllenRelation::overlapped_by;
}

AllenRelation overlap_relation(const Cascade& a, const Cascade& b) {
  return allen_relation(interval_of(a), interval_of(b));
}

std::string to_jsonl(const Cascade& c) {
  json obj = json::object();
  obj["cascade_id"] = c.cascade_id;
  obj["group_id"] = c.group_id;
  obj["root"] = c.root().message_id;
  obj["start"] = format_timestamp(c.start());
  obj["end"] = format_timestamp(c.end());
  json nodes = json::array();
  json parent = json::object();
  json depth = json::object();
  json user = json::object();
  json timestamp = json::object();
  json seq = json::object();
  for (const auto& n : c.nodes) {
    nodes.push_back(n.message_id);
    if (n.parent >= 0) parent[n.message_id] = c.nodes[static_cast<std::size_t>(n.parent)].message_id;
    depth[n.message_id] = n.depth;
    user[n.message_id] = n.user_id;
    timestamp[n.message_id] = format_timestamp(n.timestamp);
    seq[n.message_id] = n.seq;
  }
  obj["nodes"] = std::move(nodes);
  obj["parent"] = std::move(parent);
  obj["depth"] = std::move(depth);
  obj["user"] = std::move(user);
  obj["timestamp"] = std::move(timestamp);
  obj["seq"] = std::move(seq);
  return obj.dump(-1, ' ', false, json::error_handler_t::replace);
}

void write_cascades(std::ostream& out, std::span<const Cascade> cascades) {
  for (const auto& c : cascades) out << to_jsonl(c) << '\n';
}

std::vector<Cascade> read_cascades(std::istream& in, std::string_view source) {
  std::vector<Cascade> cascades;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    try {
      const json obj = json::parse(line);
      Cascade c;
      c.cascade_id = obj.at("cascade_id").get<std::string>();
      c.group_id = obj.at("group_id").get<std::string>();
      const auto& ids = obj.at("nodes");
      const auto& parents = obj.at("parent");
      const auto& depths = obj.at("depth");
      const auto& users = obj.at("user");
      const auto& times = obj.at("timestamp");
      const auto& seqs = obj.at("seq");
      std::unordered_map<std::string, int> slot;
      for (const auto& id_json : ids) {
        const auto id = id_json.get<std::string>();
        CascadeNode node;
        node.message_id = id;
        if (!users.contains(id)) throw DataError(where + ": message '" + id + "' has no author");
        node.user_id = users.at(id).get<std::string>();
        node.timestamp = parse_timestamp(times.at(id).get<std::string>(), false);
        node.seq = seqs.at(id).get<std::int64_t>();
        node.depth = depths.at(id).get<int>();
        if (parents.contains(id)) {
          const auto p = parents.at(id).get<std::string>();
          const auto it = slot.find(p);
          if (it == slot.end()) throw DataError(where + ": parent '" + p + "' of '" + id + "' is not an earlier node");
          node.parent = it->second;
        }
        slot.emplace(id, static_cast<int>(c.nodes.size()));
        c.nodes.push_back(std::move(node));
      }
      validate_cascade(c);
      cascades.push_back(std::move(c));
    } catch (const json::exception& e) {
      throw DataError(where + ": malformed cascade record: " + e.what());
    } catch (const InvariantError& e) {
      throw DataError(where + ": " + e.what());
    } catch (const DataError& e) {
      const std::string what = e.what();
      if (what.starts_with(where)) throw;
      throw DataError(where + ": " + what);
    }
  }
  if (in.bad()) throw IoError(std::string(source) + ": read error");
  return cascades;
}

}  // namespace attn
