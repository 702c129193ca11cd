#include "attn/digraph.hpp"

#include <algorithm>

#include "attn/errors.hpp"

namespace attn {

DiGraph::DiGraph(int order)
    : order_(order),
      adjacency_(static_cast<std::size_t>(order) * static_cast<std::size_t>(order), 0),
      out_(static_cast<std::size_t>(order)),
      in_(static_cast<std::size_t>(order)) {
  if (order < 0) throw DomainError("graph order must be non-negative");
}

void DiGraph::add_edge(int from, int to) {
  if (from < 0 || to < 0 || from >= order_ || to >= order_) {
    throw DomainError("edge (" + std::to_string(from) + "," + std::to_string(to) + ") outside graph of order " +
                      std::to_string(order_));
  }
  auto& cell = adjacency_[static_cast<std::size_t>(from) * static_cast<std::size_t>(order_) + static_cast<std::size_t>(to)];
  if (cell) return;
  cell = 1;
  ++edges_;
  if (from != to) {
    out_[static_cast<std::size_t>(from)].push_back(to);
    in_[static_cast<std::size_t>(to)].push_back(from);
  }
}

std::vector<std::pair<int, int>> DiGraph::edges() const {
  std::vector<std::pair<int, int>> list;
  list.reserve(edges_);
  for (int u = 0; u < order_; ++u) {
    for (int v = 0; v < order_; ++v) {
      if (has_edge(u, v)) list.emplace_back(u, v);
    }
  }
  return list;
}

DiGraph DiGraph::relabeled(std::span<const int> mapping) const {
  if (mapping.size() != static_cast<std::size_t>(order_)) throw DomainError("relabeling must cover every vertex");
  DiGraph g(order_);
  for (const auto& [u, v] : edges()) g.add_edge(mapping[static_cast<std::size_t>(u)], mapping[static_cast<std::size_t>(v)]);
  return g;
}

}  // namespace attn
