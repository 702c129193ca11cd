#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace attn {

// Small dense directed graph. Vertices are 0..order()-1; parallel edges
// collapse; self-loops are tracked separately from the neighbour lists.
class DiGraph {
 public:
  DiGraph() = default;
  explicit DiGraph(int order);

  int order() const { return order_; }
  std::size_t edge_count() const { return edges_; }

  void add_edge(int from, int to);
  bool has_edge(int from, int to) const {
    return adjacency_[static_cast<std::size_t>(from) * static_cast<std::size_t>(order_) + static_cast<std::size_t>(to)] != 0;
  }
  bool has_self_loop(int v) const { return has_edge(v, v); }

  // Neighbours other than v itself.
  const std::vector<int>& successors(int v) const { return out_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& predecessors(int v) const { return in_[static_cast<std::size_t>(v)]; }
  int out_degree(int v) const { return static_cast<int>(successors(v).size()); }
  int in_degree(int v) const { return static_cast<int>(predecessors(v).size()); }
  bool adjacent(int u, int v) const { return has_edge(u, v) || has_edge(v, u); }

  // Sorted (from, to) pairs, self-loops included.
  std::vector<std::pair<int, int>> edges() const;

  // Graph with vertex v renamed to mapping[v].
  DiGraph relabeled(std::span<const int> mapping) const;

  bool operator==(const DiGraph& other) const {
    return order_ == other.order_ && adjacency_ == other.adjacency_;
  }

 private:
  int order_ = 0;
  std::size_t edges_ = 0;
  std::vector<std::uint8_t> adjacency_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

}  // namespace attn
