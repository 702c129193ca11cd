#include <gtest/gtest.h>

#include <random>

#include "attn/digraph.hpp"
#include "attn/errors.hpp"
#include "attn/vf2.hpp"

namespace attn {
namespace {

DiGraph graph(int n, std::initializer_list<std::pair<int, int>> edges) {
  DiGraph g(n);
  for (const auto& [a, b] : edges) g.add_edge(a, b);
  return g;
}

DiGraph random_graph(std::mt19937_64& rng, int n, double p, bool loops) {
  DiGraph g(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if ((a != b || loops) && static_cast<double>(rng() % 1000) < p * 1000) g.add_edge(a, b);
    }
  }
  return g;
}

bool valid_mapping(const DiGraph& p, const DiGraph& t, const std::vector<int>& f, MatchKind kind) {
  std::vector<bool> used(static_cast<std::size_t>(t.order()), false);
  for (int v : f) {
    if (v < 0 || v >= t.order() || used[static_cast<std::size_t>(v)]) return false;
    used[static_cast<std::size_t>(v)] = true;
  }
  if (kind == MatchKind::isomorphism && p.order() != t.order()) return false;
  for (int a = 0; a < p.order(); ++a) {
    for (int b = 0; b < p.order(); ++b) {
      const bool pe = p.has_edge(a, b), te = t.has_edge(f[static_cast<std::size_t>(a)], f[static_cast<std::size_t>(b)]);
      if (pe && !te) return false;
      if (kind != MatchKind::monomorphism && te && !pe) return false;
    }
  }
  return true;
}

// Exhaustive reference over all injective maps.
bool exhaustive(const DiGraph& p, const DiGraph& t, MatchKind kind) {
  if (p.order() > t.order() || (kind == MatchKind::isomorphism && p.order() != t.order())) return false;
  std::vector<int> f;
  std::vector<bool> used(static_cast<std::size_t>(t.order()), false);
  auto rec = [&](auto& self) -> bool {
    if (static_cast<int>(f.size()) == p.order()) return valid_mapping(p, t, f, kind);
    for (int v = 0; v < t.order(); ++v) {
      if (used[static_cast<std::size_t>(v)]) continue;
      used[static_cast<std::size_t>(v)] = true;
      f.push_back(v);
      const bool ok = self(self);
      f.pop_back();
      used[static_cast<std::size_t>(v)] = false;
      if (ok) return true;
    }
    return false;
  };
  return rec(rec);
}

TEST(DiGraphTest, EdgesAndDegrees) {
  auto g = graph(3, {{0, 1}, {0, 1}, {1, 1}, {2, 0}});
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_TRUE(g.has_self_loop(1));
  EXPECT_EQ(g.out_degree(1), 0);
  EXPECT_EQ(g.in_degree(0), 1);
  EXPECT_TRUE(g.adjacent(1, 0));
  EXPECT_EQ(g.edges(), (std::vector<std::pair<int, int>>{{0, 1}, {1, 1}, {2, 0}}));
  EXPECT_THROW(g.add_edge(0, 3), DomainError);
  const std::vector<int> swap{1, 0, 2};
  EXPECT_EQ(g.relabeled(swap), graph(3, {{1, 0}, {0, 0}, {2, 1}}));
}

TEST(Vf2Test, InducedVersusMonomorphism) {
  const auto path = graph(3, {{0, 1}, {1, 2}});
  const auto triangle = graph(3, {{0, 1}, {1, 2}, {2, 0}});
  EXPECT_TRUE(vf2_match(path, triangle, MatchKind::monomorphism));
  EXPECT_FALSE(vf2_match(path, triangle, MatchKind::induced_subgraph));
  EXPECT_FALSE(vf2_match(path, triangle, MatchKind::isomorphism));
  EXPECT_TRUE(vf2_match(triangle, graph(3, {{1, 2}, {2, 0}, {0, 1}}), MatchKind::isomorphism));
}

TEST(Vf2Test, SelfLoopsAreStructure) {
  const auto edge = graph(2, {{0, 1}});
  const auto looped = graph(2, {{0, 1}, {1, 1}});
  EXPECT_TRUE(vf2_match(edge, looped, MatchKind::monomorphism));
  EXPECT_FALSE(vf2_match(edge, looped, MatchKind::induced_subgraph));
  EXPECT_FALSE(vf2_match(looped, edge, MatchKind::monomorphism));
}

TEST(Vf2Test, DisconnectedPattern) {
  const auto two_edges = graph(4, {{0, 1}, {2, 3}});
  EXPECT_TRUE(vf2_match(two_edges, graph(5, {{0, 1}, {1, 2}, {3, 4}}), MatchKind::induced_subgraph));
  EXPECT_FALSE(vf2_match(two_edges, graph(4, {{0, 1}, {1, 2}, {2, 3}}), MatchKind::induced_subgraph));
  EXPECT_TRUE(vf2_match(two_edges, graph(4, {{0, 1}, {1, 2}, {2, 3}}), MatchKind::monomorphism));
}

TEST(Vf2Test, EmptyPatternAlwaysMatches) {
  EXPECT_TRUE(vf2_match(DiGraph(0), graph(2, {{0, 1}}), MatchKind::induced_subgraph));
  EXPECT_TRUE(vf2_match(DiGraph(0), DiGraph(0), MatchKind::isomorphism));
}

// Property: agrees with exhaustive search and returns valid mappings.
TEST(Vf2Test, AgreesWithExhaustiveSearch) {
  std::mt19937_64 rng(31);
  const MatchKind kinds[] = {MatchKind::isomorphism, MatchKind::induced_subgraph, MatchKind::monomorphism};
  for (int trial = 0; trial < 3000; ++trial) {
    const int pn = 1 + static_cast<int>(rng() % 4);
    const int tn = pn + static_cast<int>(rng() % 3);
    const auto p = random_graph(rng, pn, 0.4, trial % 3 == 0);
    const auto t = random_graph(rng, tn, 0.45, trial % 2 == 0);
    for (const auto kind : kinds) {
      const auto found = vf2_find(p, t, kind);
      ASSERT_EQ(found.has_value(), exhaustive(p, t, kind)) << "trial " << trial << " kind " << static_cast<int>(kind);
      if (found) {
        EXPECT_TRUE(valid_mapping(p, t, *found, kind));
      }
    }
  }
}

TEST(Vf2Test, IsomorphismUnderRelabeling) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const auto g = random_graph(rng, n, 0.3, true);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    EXPECT_TRUE(vf2_match(g, g.relabeled(perm), MatchKind::isomorphism));
  }
}

}  // namespace
}  // namespace attn
