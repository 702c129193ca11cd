#include "attn/motifs.hpp"

#include <algorithm>
#include <functional>

#include "attn/csv.hpp"
#include "attn/errors.hpp"
#include "attn/parallel.hpp"

namespace attn {
namespace {

std::size_t index_of(Motif m) { return static_cast<std::size_t>(m); }

// Strongly connected components (iterative Tarjan); self-loops ignored.
std::vector<int> strong_components(const DiGraph& g) {
  const int n = g.order();
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0),
      comp(static_cast<std::size_t>(n), -1);
  std::vector<int> stack;
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  int next_index = 0, next_comp = 0;
  struct Frame {
    int v;
    std::size_t edge;
  };
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] >= 0) continue;
    std::vector<Frame> frames{{root, 0}};
    index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = next_index++;
    stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = true;
    while (!frames.empty()) {
      auto& f = frames.back();
      const auto v = static_cast<std::size_t>(f.v);
      const auto& succ = g.successors(f.v);
      if (f.edge < succ.size()) {
        const int w = succ[f.edge++];
        const auto wi = static_cast<std::size_t>(w);
        if (index[wi] < 0) {
          index[wi] = low[wi] = next_index++;
          stack.push_back(w);
          on_stack[wi] = true;
          frames.push_back({w, 0});
        } else if (on_stack[wi]) {
          low[v] = std::min(low[v], index[wi]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = false;
          comp[static_cast<std::size_t>(w)] = next_comp;
        } while (w != f.v);
        ++next_comp;
      }
      const int done = f.v;
      frames.pop_back();
      if (!frames.empty()) {
        const auto parent = static_cast<std::size_t>(frames.back().v);
        low[parent] = std::min(low[parent], low[static_cast<std::size_t>(done)]);
      }
    }
  }
  return comp;
}

// Searches for a directed cycle of length in [3, max_len] whose smallest
// vertex is the path's first element. In induced mode the cycle must be
// chordless, digon-free and loop-free on its vertex set.
class CycleSearch {
 public:
  CycleSearch(const DiGraph& g, int max_len, bool induced)
      : g_(g), max_len_(max_len), induced_(induced), comp_(strong_components(g)),
        in_path_(static_cast<std::size_t>(g.order()), false) {}

  bool run() {
    if (max_len_ < 3) return false;
    for (int s = 0; s < g_.order(); ++s) {
      if (induced_ && g_.has_self_loop(s)) continue;
      path_.assign(1, s);
      in_path_[static_cast<std::size_t>(s)] = true;
      const bool found = extend();
      in_path_[static_cast<std::size_t>(s)] = false;
      if (found) return true;
    }
    return false;
  }

 private:
  bool compatible(int w) const {
    const int s = path_.front();
    const int last = path_.back();
    if (g_.has_self_loop(w) || g_.has_edge(w, last)) return false;
    for (std::size_t j = 0; j + 1 < path_.size(); ++j) {
      const int u = path_[j];
      if (u == s) {
        if (g_.has_edge(s, w)) return false;
      } else if (g_.adjacent(u, w)) {
        return false;
      }
    }
    return true;
  }

  bool extend() {
    const int s = path_.front();
    const int last = path_.back();
    const int len = static_cast<int>(path_.size());
    for (int w : g_.successors(last)) {
      if (w <= s || in_path_[static_cast<std::size_t>(w)]) continue;
      if (comp_[static_cast<std::size_t>(w)] != comp_[static_cast<std::size_t>(s)]) continue;
      if (induced_ && !compatible(w)) continue;
      const bool closes = g_.has_edge(w, s);
      if (closes && len + 1 >= 3 && len + 1 <= max_len_) return true;
      // In induced mode an edge back to s is a chord for any longer cycle.
      if (induced_ && closes) continue;
      if (len + 1 >= max_len_) continue;
      path_.push_back(w);
      in_path_[static_cast<std::size_t>(w)] = true;
      const bool found = extend();
      in_path_[static_cast<std::size_t>(w)] = false;
      path_.pop_back();
      if (found) return true;
    }
    return false;
  }

  const DiGraph& g_;
  int max_len_;
  bool induced_;
  std::vector<int> comp_;
  std::vector<int> path_;
  std::vector<bool> in_path_;
};

bool any_self_loop(const DiGraph& g) {
  for (int v = 0; v < g.order(); ++v) {
    if (g.has_self_loop(v)) return true;
  }
  return false;
}

bool is_exact_chain(const DiGraph& g) {
  const int n = g.order();
  if (n < 2 || g.edge_count() != static_cast<std::size_t>(n - 1) || any_self_loop(g)) return false;
  int source = -1;
  for (int v = 0; v < n; ++v) {
    if (g.out_degree(v) > 1 || g.in_degree(v) > 1) return false;
    if (g.in_degree(v) == 0) {
      if (source >= 0) return false;
      source = v;
    }
  }
  if (source < 0) return false;
  int visited = 1;
  for (int v = source; g.out_degree(v) == 1; v = g.successors(v).front()) ++visited;
  return visited == n;
}

bool is_exact_loop(const DiGraph& g) {
  const int n = g.order();
  if (n < 3 || g.edge_count() != static_cast<std::size_t>(n) || any_self_loop(g)) return false;
  for (int v = 0; v < n; ++v) {
    if (g.out_degree(v) != 1 || g.in_degree(v) != 1) return false;
  }
  int steps = 0;
  int v = 0;
  do {
    v = g.successors(v).front();
    ++steps;
  } while (v != 0 && steps <= n);
  return v == 0 && steps == n;
}

bool is_exact_star(const DiGraph& g, bool outgoing) {
  const int n = g.order();
  if (n < 3 || g.edge_count() != static_cast<std::size_t>(n - 1) || any_self_loop(g)) return false;
  for (int c = 0; c < n; ++c) {
    const int spokes = outgoing ? g.out_degree(c) : g.in_degree(c);
    if (spokes == n - 1) {
      const int back = outgoing ? g.in_degree(c) : g.out_degree(c);
      return back == 0;
    }
  }
  return false;
}

// Two spokes around one centre; induced additionally forbids any other edge
// (including self-loops) among centre and the two leaves.
bool has_star(const DiGraph& g, bool outgoing, bool induced) {
  for (int c = 0; c < g.order(); ++c) {
    if (induced && g.has_self_loop(c)) continue;
    const auto& spokes = outgoing ? g.successors(c) : g.predecessors(c);
    if (!induced) {
      if (spokes.size() >= 2) return true;
      continue;
    }
    std::vector<int> leaves;
    for (int v : spokes) {
      const bool reverse = outgoing ? g.has_edge(v, c) : g.has_edge(c, v);
      if (!reverse && !g.has_self_loop(v)) leaves.push_back(v);
    }
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      for (std::size_t j = i + 1; j < leaves.size(); ++j) {
        if (!g.adjacent(leaves[i], leaves[j])) return true;
      }
    }
  }
  return false;
}

bool has_dyad(const DiGraph& g) {
  for (int u = 0; u < g.order(); ++u) {
    for (int v : g.successors(u)) {
      if (v > u && g.has_edge(v, u)) return true;
    }
  }
  return false;
}

MotifPresenceSet detect_fast(const DiGraph& g, int limit, int max_n, StarLoopSemantics semantics) {
  const int n = g.order();
  const bool induced = semantics == StarLoopSemantics::induced;
  const bool exact_allowed = n <= max_n;
  MotifPresenceSet out{};
  auto set = [&](Motif m, bool exact, bool sub) {
    out[index_of(m)] = exact ? MotifPresence::exact : sub ? MotifPresence::subgraph : MotifPresence::absent;
  };

  set(Motif::self_loop, exact_allowed && n == 1 && g.has_self_loop(0), limit >= 1 && any_self_loop(g));

  const bool dyad_exact = exact_allowed && n == 2 && g.edge_count() == 2 && g.has_edge(0, 1) && g.has_edge(1, 0);
  set(Motif::dyadic, dyad_exact, limit >= 2 && has_dyad(g));

  bool any_edge = false;
  for (int v = 0; v < n && !any_edge; ++v) any_edge = g.out_degree(v) > 0;
  set(Motif::chain, exact_allowed && is_exact_chain(g), limit >= 2 && any_edge);

  set(Motif::loop, exact_allowed && is_exact_loop(g), CycleSearch(g, limit, induced).run());

  set(Motif::outgoing_star, exact_allowed && is_exact_star(g, true), limit >= 3 && has_star(g, true, induced));
  set(Motif::incoming_star, exact_allowed && is_exact_star(g, false), limit >= 3 && has_star(g, false, induced));
  return out;
}

MotifPresenceSet detect_generic(const DiGraph& g, int limit, int max_n, StarLoopSemantics semantics) {
  const int n = g.order();
  MotifPresenceSet out{};
  for (const Motif m : kAllMotifs) {
    const int lo = min_template_size(m);
    const int hi = max_template_size(m) > 0 ? std::min(limit, max_template_size(m)) : limit;
    auto& slot = out[index_of(m)];
    slot = MotifPresence::absent;
    const bool size_ok = n >= lo && (max_template_size(m) == 0 || n <= max_template_size(m)) && n <= max_n;
    if (size_ok && vf2_match(motif_template(m, n), g, MatchKind::isomorphism)) {
      slot = MotifPresence::exact;
      continue;
    }
    const MatchKind kind = subgraph_match_kind(m, semantics);
    for (int k = lo; k <= hi; ++k) {
      if (vf2_match(motif_template(m, k), g, kind)) {
        slot = MotifPresence::subgraph;
        break;
      }
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Motif motif) {
  switch (motif) {
    case Motif::self_loop: return "self_loop";
    case Motif::dyadic: return "dyadic";
    case Motif::chain: return "chain";
    case Motif::loop: return "loop";
    case Motif::outgoing_star: return "outgoing_star";
    case Motif::incoming_star: return "incoming_star";
  }
  return "unknown";
}

std::optional<Motif> parse_motif(std::string_view name) {
  for (const Motif m : kAllMotifs) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

int min_template_size(Motif motif) {
  switch (motif) {
    case Motif::self_loop: return 1;
    case Motif::dyadic:
    case Motif::chain: return 2;
    default: return 3;
  }
}

int max_template_size(Motif motif) {
  switch (motif) {
    case Motif::self_loop: return 1;
    case Motif::dyadic: return 2;
    default: return 0;
  }
}

std::string_view to_string(MotifPresence presence) {
  switch (presence) {
    case MotifPresence::absent: return "absent";
    case MotifPresence::subgraph: return "subgraph";
    case MotifPresence::exact: return "exact";
  }
  return "unknown";
}

std::optional<MotifPresence> parse_motif_presence(std::string_view text) {
  if (text == "absent") return MotifPresence::absent;
  if (text == "subgraph") return MotifPresence::subgraph;
  if (text == "exact") return MotifPresence::exact;
  return std::nullopt;
}

DiGraph motif_template(Motif motif, int n) {
  const int hi = max_template_size(motif);
  if (n < min_template_size(motif) || (hi > 0 && n > hi)) {
    throw DomainError("no " + std::string(to_string(motif)) + " template with " + std::to_string(n) + " vertices");
  }
  DiGraph g(n);
  switch (motif) {
    case Motif::self_loop:
      g.add_edge(0, 0);
      break;
    case Motif::dyadic:
      g.add_edge(0, 1);
      g.add_edge(1, 0);
      break;
    case Motif::chain:
      for (int v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
      break;
    case Motif::loop:
      for (int v = 0; v < n; ++v) g.add_edge(v, (v + 1) % n);
      break;
    case Motif::outgoing_star:
      for (int v = 1; v < n; ++v) g.add_edge(0, v);
      break;
    case Motif::incoming_star:
      for (int v = 1; v < n; ++v) g.add_edge(v, 0);
      break;
  }
  return g;
}

MatchKind subgraph_match_kind(Motif motif, StarLoopSemantics semantics) {
  switch (motif) {
    case Motif::self_loop: return MatchKind::induced_subgraph;
    case Motif::dyadic:
    case Motif::chain: return MatchKind::monomorphism;
    default:
      return semantics == StarLoopSemantics::induced ? MatchKind::induced_subgraph : MatchKind::monomorphism;
  }
}

MotifPresenceSet detect_motifs(const DiGraph& graph, const MotifOptions& options) {
  const int n = graph.order();
  const int max_n = options.max_n > 0 ? options.max_n : n;
  const int limit = std::min(max_n, n);
  return options.strategy == MatchStrategy::fast ? detect_fast(graph, limit, max_n, options.star_loop)
                                                 : detect_generic(graph, limit, max_n, options.star_loop);
}

DiGraph UserGraph::graph() const {
  DiGraph g(static_cast<int>(vertices.size()));
  for (const auto& [u, v] : edges) g.add_edge(u, v);
  return g;
}

UserGraph user_graph(const Cascade& cascade) {
  UserGraph ug;
  ug.cascade_id = cascade.cascade_id;
  for (const auto& node : cascade.nodes) {
    if (node.user_id.empty()) {
      throw DataError("cascade '" + cascade.cascade_id + "': message '" + node.message_id + "' has no author");
    }
    ug.vertices.push_back(node.user_id);
  }
  std::sort(ug.vertices.begin(), ug.vertices.end());
  ug.vertices.erase(std::unique(ug.vertices.begin(), ug.vertices.end()), ug.vertices.end());
  auto vertex = [&](const std::string& user) {
    return static_cast<int>(std::lower_bound(ug.vertices.begin(), ug.vertices.end(), user) - ug.vertices.begin());
  };
  for (const auto& node : cascade.nodes) {
    if (node.parent < 0) continue;
    const auto& parent = cascade.nodes[static_cast<std::size_t>(node.parent)];
    ug.edges.emplace_back(vertex(node.user_id), vertex(parent.user_id));
  }
  std::sort(ug.edges.begin(), ug.edges.end());
  ug.edges.erase(std::unique(ug.edges.begin(), ug.edges.end()), ug.edges.end());
  return ug;
}

MotifReport detect_motifs(const UserGraph& graph, const MotifOptions& options) {
  return {graph.cascade_id, detect_motifs(graph.graph(), options)};
}

std::vector<MotifReport> detect_all_motifs(std::span<const Cascade> cascades, const MotifOptions& options,
                                           unsigned jobs) {
  std::vector<MotifReport> out(cascades.size());
  parallel_for(cascades.size(), jobs, [&](std::size_t i) { out[i] = detect_motifs(user_graph(cascades[i]), options); });
  return out;
}

std::size_t MotifTally::total_presences() const {
  std::size_t total = 0;
  for (auto c : present) total += c;
  return total;
}

std::array<double, kAllMotifs.size()> MotifTally::frequencies() const {
  std::array<double, kAllMotifs.size()> f{};
  const auto total = total_presences();
  if (total == 0) return f;
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(present[i]) / static_cast<double>(total);
  return f;
}

std::map<std::string, MotifTally> motif_frequencies(std::span<const MotifReport> reports,
                                                    std::span<const std::string> class_keys) {
  if (reports.size() != class_keys.size()) throw DomainError("motif_frequencies: one class key per report required");
  std::map<std::string, MotifTally> tallies;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    auto& t = tallies[class_keys[i]];
    ++t.cascades;
    for (std::size_t m = 0; m < kAllMotifs.size(); ++m) {
      const auto p = reports[i].present[m];
      if (p != MotifPresence::absent) ++t.present[m];
      if (p == MotifPresence::exact) ++t.exact[m];
    }
  }
  std::erase_if(tallies, [](const auto& kv) { return kv.second.total_presences() == 0; });
  return tallies;
}

void write_motif_reports(std::ostream& out, std::span<const MotifReport> reports) {
  std::vector<std::string> row{"cascade_id"};
  for (const Motif m : kAllMotifs) row.emplace_back(to_string(m));
  write_csv_row(out, row);
  for (const auto& r : reports) {
    row.assign(1, r.cascade_id);
    for (const auto p : r.present) row.emplace_back(to_string(p));
    write_csv_row(out, row);
  }
}

std::vector<MotifReport> read_motif_reports(std::istream& in, std::string_view source) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  std::vector<MotifReport> reports;
  if (!reader.next(fields)) return reports;
  const CsvHeader header(fields);
  const auto id = header.require("cascade_id", source);
  std::array<std::size_t, kAllMotifs.size()> cols{};
  for (const Motif m : kAllMotifs) cols[index_of(m)] = header.require(to_string(m), source);
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(reader.line());
    if (fields.size() != header.size()) throw DataError(where + ": wrong number of fields");
    MotifReport r;
    r.cascade_id = fields[id];
    for (std::size_t m = 0; m < cols.size(); ++m) {
      const auto p = parse_motif_presence(fields[cols[m]]);
      if (!p) throw DataError(where + ": bad motif presence '" + fields[cols[m]] + "'");
      r.present[m] = *p;
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace attn
