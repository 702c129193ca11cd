#pragma once

#include <optional>
#include <vector>

#include "attn/digraph.hpp"

namespace attn {

enum class MatchKind {
  // Bijection preserving edges and non-edges.
  isomorphism,
  // Injection preserving edges and non-edges among the matched vertices.
  induced_subgraph,
  // Injection preserving edges only.
  monomorphism,
};

// VF2-style state-space search: pattern vertices are matched in a
// connectivity-first order, candidates come from the neighbourhood of
// already-matched vertices, and partial states are pruned by adjacency
// consistency, self-loop agreement, degree bounds and unmatched-neighbour
// counts. Self-loops are part of the structure in every mode.
// Returns mapping[pattern_vertex] = target_vertex for the first match found.
std::optional<std::vector<int>> vf2_find(const DiGraph& pattern, const DiGraph& target, MatchKind kind);

inline bool vf2_match(const DiGraph& pattern, const DiGraph& target, MatchKind kind) {
  return vf2_find(pattern, target, kind).has_value();
}

}  // namespace attn
