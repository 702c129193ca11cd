#include "attn/vf2.hpp"

#include <algorithm>

namespace attn {
namespace {

class Matcher {
 public:
  Matcher(const DiGraph& pattern, const DiGraph& target, MatchKind kind)
      : p_(pattern),
        t_(target),
        kind_(kind),
        core_p_(static_cast<std::size_t>(pattern.order()), -1),
        core_t_(static_cast<std::size_t>(target.order()), -1) {
    plan();
  }

  std::optional<std::vector<int>> solve() {
    if (extend(0)) return core_p_;
    return std::nullopt;
  }

 private:
  struct Step {
    int vertex = 0;
    int anchor = -1;         // earlier pattern vertex adjacent to `vertex`
    bool anchor_out = true;  // edge anchor -> vertex (else vertex -> anchor)
  };

  // Connectivity-first order: each next vertex maximises links to the
  // vertices already placed, breaking ties by total degree.
  void plan() {
    const int n = p_.order();
    std::vector<bool> placed(static_cast<std::size_t>(n), false);
    std::vector<int> links(static_cast<std::size_t>(n), 0);
    for (int step = 0; step < n; ++step) {
      int best = -1;
      for (int v = 0; v < n; ++v) {
        if (placed[static_cast<std::size_t>(v)]) continue;
        if (best < 0) {
          best = v;
          continue;
        }
        const auto lv = links[static_cast<std::size_t>(v)];
        const auto lb = links[static_cast<std::size_t>(best)];
        const int dv = p_.out_degree(v) + p_.in_degree(v);
        const int db = p_.out_degree(best) + p_.in_degree(best);
        if (lv > lb || (lv == lb && dv > db)) best = v;
      }
      Step s;
      s.vertex = best;
      for (const auto& prev : steps_) {
        if (p_.has_edge(prev.vertex, best)) {
          s.anchor = prev.vertex;
          s.anchor_out = true;
          break;
        }
        if (p_.has_edge(best, prev.vertex)) {
          s.anchor = prev.vertex;
          s.anchor_out = false;
          break;
        }
      }
      placed[static_cast<std::size_t>(best)] = true;
      for (int w : p_.successors(best)) ++links[static_cast<std::size_t>(w)];
      for (int w : p_.predecessors(best)) ++links[static_cast<std::size_t>(w)];
      steps_.push_back(s);
    }
  }

  bool preserves(bool pattern_edge, bool target_edge) const {
    return kind_ == MatchKind::monomorphism ? (!pattern_edge || target_edge) : pattern_edge == target_edge;
  }

  bool degree_ok(int pattern_degree, int target_degree) const {
    return kind_ == MatchKind::isomorphism ? pattern_degree == target_degree : pattern_degree <= target_degree;
  }

  int unmatched(const std::vector<int>& neighbours, const std::vector<int>& core) const {
    int count = 0;
    for (int w : neighbours) count += core[static_cast<std::size_t>(w)] < 0 ? 1 : 0;
    return count;
  }

  bool feasible(std::size_t depth, int pv, int tv) const {
    if (!preserves(p_.has_self_loop(pv), t_.has_self_loop(tv))) return false;
    if (!degree_ok(p_.out_degree(pv), t_.out_degree(tv))) return false;
    if (!degree_ok(p_.in_degree(pv), t_.in_degree(tv))) return false;
    for (std::size_t k = 0; k < depth; ++k) {
      const int pw = steps_[k].vertex;
      const int tw = core_p_[static_cast<std::size_t>(pw)];
      if (!preserves(p_.has_edge(pv, pw), t_.has_edge(tv, tw))) return false;
      if (!preserves(p_.has_edge(pw, pv), t_.has_edge(tw, tv))) return false;
    }
    // Look-ahead: unmatched neighbours must fit into unmatched neighbours.
    if (!degree_ok(unmatched(p_.successors(pv), core_p_), unmatched(t_.successors(tv), core_t_))) return false;
    if (!degree_ok(unmatched(p_.predecessors(pv), core_p_), unmatched(t_.predecessors(tv), core_t_))) return false;
    return true;
  }

  bool try_candidate(std::size_t depth, int pv, int tv) {
    if (core_t_[static_cast<std::size_t>(tv)] >= 0 || !feasible(depth, pv, tv)) return false;
    core_p_[static_cast<std::size_t>(pv)] = tv;
    core_t_[static_cast<std::size_t>(tv)] = pv;
    if (extend(depth + 1)) return true;
    core_p_[static_cast<std::size_t>(pv)] = -1;
    core_t_[static_cast<std::size_t>(tv)] = -1;
    return false;
  }

  bool extend(std::size_t depth) {
    if (depth == steps_.size()) return true;
    const Step& s = steps_[depth];
    if (s.anchor >= 0) {
      const int ta = core_p_[static_cast<std::size_t>(s.anchor)];
      const auto& candidates = s.anchor_out ? t_.successors(ta) : t_.predecessors(ta);
      for (int tv : candidates) {
        if (try_candidate(depth, s.vertex, tv)) return true;
      }
      return false;
    }
    for (int tv = 0; tv < t_.order(); ++tv) {
      if (try_candidate(depth, s.vertex, tv)) return true;
    }
    return false;
  }

  const DiGraph& p_;
  const DiGraph& t_;
  MatchKind kind_;
  std::vector<Step> steps_;
  std::vector<int> core_p_;
  std::vector<int> core_t_;
};

}  // namespace

std::optional<std::vector<int>> vf2_find(const DiGraph& pattern, const DiGraph& target, MatchKind kind) {
  if (pattern.order() > target.order()) return std::nullopt;
  if (kind == MatchKind::isomorphism &&
      (pattern.order() != target.order() || pattern.edge_count() != target.edge_count())) {
    return std::nullopt;
  }
  if (kind != MatchKind::isomorphism && pattern.edge_count() > target.edge_count()) return std::nullopt;
  return Matcher(pattern, target, kind).solve();
}

}  // namespace attn
