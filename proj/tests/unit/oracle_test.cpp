#include <gtest/gtest.h>

#include "attn/oracle.hpp"
#include "support.hpp"

namespace attn {
namespace {

using P = MotifPresence;

TEST(OracleTest, SampleChatComponents) {
  const auto messages = test::load_sample_chat();
  const auto comps = oracle::reply_components(messages);
  ASSERT_EQ(comps.size(), 1u);
  EXPECT_EQ(comps[0], (std::vector<std::string>{"M2", "M3", "M5", "M7"}));
  const auto depths = oracle::bfs_depths(messages, comps[0]);
  EXPECT_EQ(depths, (std::map<std::string, int>{{"M2", 0}, {"M3", 1}, {"M5", 2}, {"M7", 1}}));
}

TEST(OracleTest, ViralityClosedForms) {
  // Path on six vertices: sum of distances 35 over 15 pairs.
  EXPECT_DOUBLE_EQ(oracle::all_pairs_virality(std::vector<int>{-1, 0, 1, 2, 3, 4}), 35.0 / 15.0);
  // Star with five leaves: 2 (n - 1) / n.
  EXPECT_DOUBLE_EQ(oracle::all_pairs_virality(std::vector<int>{-1, 0, 0, 0, 0, 0}), 2.0 * 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(oracle::all_pairs_virality(std::vector<int>{-1, 0}), 1.0);
}

TEST(OracleTest, BruteForceMotifsHandCases) {
  const std::vector<std::pair<int, int>> triangle{{0, 1}, {1, 2}, {2, 0}};
  EXPECT_EQ(oracle::brute_force_motifs(3, triangle),
            (MotifPresenceSet{P::absent, P::absent, P::subgraph, P::exact, P::absent, P::absent}));
  const std::vector<std::pair<int, int>> loop_only{{0, 0}};
  EXPECT_EQ(oracle::brute_force_motifs(1, loop_only),
            (MotifPresenceSet{P::exact, P::absent, P::absent, P::absent, P::absent, P::absent}));
  const std::vector<std::pair<int, int>> in_star{{1, 0}, {2, 0}, {3, 0}};
  EXPECT_EQ(oracle::brute_force_motifs(4, in_star),
            (MotifPresenceSet{P::absent, P::absent, P::subgraph, P::absent, P::absent, P::exact}));
  // A cap below the order removes exact readings.
  EXPECT_EQ(oracle::brute_force_motifs(4, in_star, 3),
            (MotifPresenceSet{P::absent, P::absent, P::subgraph, P::absent, P::absent, P::subgraph}));
}

}  // namespace
}  // namespace attn
