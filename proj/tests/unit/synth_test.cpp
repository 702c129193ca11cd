#include <gtest/gtest.h>

#include <set>

#include "attn/cascade.hpp"
#include "attn/errors.hpp"
#include "attn/falsehood.hpp"
#include "attn/metrics.hpp"
#include "attn/synth.hpp"

namespace attn {
namespace {

using nlohmann::json;

SynthConfig small(std::uint64_t seed) {
  SynthConfig c;
  c.seed = seed;
  c.n_groups = 3;
  c.cascades_per_group = parse_count_distribution(json{{"uniform", {2, 6}}}, "cascades_per_group");
  c.offspring = parse_count_distribution(json{{"poisson", 1.1}, {"max", 4}}, "offspring");
  c.max_depth = 6;
  c.noise_messages = 5;
  c.planted_falsehood_rate = 0.5;
  return c;
}

TEST(CountDistributionTest, ParsesEveryForm) {
  EXPECT_EQ(parse_count_distribution(json(3), "x").value, 3);
  const auto u = parse_count_distribution(json{{"uniform", {1, 4}}}, "x");
  EXPECT_EQ(u.kind, CountDistribution::Kind::uniform);
  EXPECT_DOUBLE_EQ(u.expected(), 2.5);
  const auto w = parse_count_distribution(json{{"weights", {1.0, 1.0, 2.0}}}, "x");
  EXPECT_DOUBLE_EQ(w.expected(), 1.25);
  EXPECT_THROW(parse_count_distribution(json("many"), "x"), ConfigError);
  EXPECT_THROW(parse_count_distribution(json{{"uniform", {4, 1}}}, "x"), ConfigError);
  EXPECT_THROW(parse_count_distribution(json{{"poisson", 1.0}}, "x"), ConfigError);
  EXPECT_THROW(parse_count_distribution(json{{"weights", json::array()}}, "x"), ConfigError);
}

TEST(SynthConfigTest, RoundTripsAndRejectsBadFields) {
  const auto c = small(5);
  EXPECT_EQ(to_json(parse_synth_config(to_json(c))), to_json(c));
  EXPECT_THROW(parse_synth_config(json{{"n_gropus", 3}}), ConfigError);
  EXPECT_THROW(parse_synth_config(json{{"n_groups", -1}}), ConfigError);
  EXPECT_THROW(parse_synth_config(json{{"political_fraction", 1.5}}), ConfigError);
  EXPECT_THROW(parse_synth_config(json{{"start", "yesterday"}}), ConfigError);
  EXPECT_THROW(parse_synth_config(json::array()), ConfigError);
}

TEST(SynthTest, SameSeedSameCorpus) {
  const auto a = generate(small(42));
  const auto b = generate(small(42));
  EXPECT_EQ(a.messages, b.messages);
  EXPECT_EQ(a.truth.dump(), b.truth.dump());
  EXPECT_NE(generate(small(43)).truth.dump(), a.truth.dump());
}

TEST(SynthTest, NoOffspringMeansNoCascades) {
  auto c = small(1);
  c.offspring = parse_count_distribution(json(0), "offspring");
  c.noise_messages = 0;
  c.cascades_per_group = parse_count_distribution(json(7), "cascades_per_group");
  const auto out = generate(c);
  EXPECT_EQ(out.messages.size(), 21u);
  EXPECT_TRUE(out.truth["cascades"].empty());
  EXPECT_TRUE(build_all_cascades(out.messages).empty());
}

TEST(SynthTest, SingleChildGivesChains) {
  auto c = small(2);
  c.offspring = parse_count_distribution(json(1), "offspring");
  c.max_depth = 5;
  const auto out = generate(c);
  ASSERT_FALSE(out.truth["cascades"].empty());
  for (const auto& rec : out.truth["cascades"]) {
    EXPECT_EQ(rec["n_nodes"], 6);
    EXPECT_EQ(rec["max_depth"], 5);
    EXPECT_DOUBLE_EQ(rec["structural_virality"].get<double>(), 35.0 / 15.0);
  }
}

TEST(SynthTest, CapRecordsWarning) {
  auto c = small(3);
  c.offspring = parse_count_distribution(json(3), "offspring");
  c.max_depth = 0;
  c.max_nodes = 10;
  const auto out = generate(c);
  ASSERT_FALSE(out.warnings.empty());
  EXPECT_NE(out.warnings[0].find("capped at max_nodes=10"), std::string::npos);
  for (const auto& rec : out.truth["cascades"]) EXPECT_EQ(rec["n_nodes"], 10);
}

TEST(SynthTest, LabelsAndOrdering) {
  const auto out = generate(small(8));
  EXPECT_EQ(out.labels.size(), 3u);
  for (std::size_t i = 1; i < out.messages.size(); ++i) {
    const auto& a = out.messages[i - 1];
    const auto& b = out.messages[i];
    if (a.group_id == b.group_id) {
      EXPECT_TRUE(posted_before(a, b));
    } else {
      EXPECT_LT(a.group_id, b.group_id);
    }
  }
}

// Property: rebuilding cascades from the emitted log reproduces the truth.
TEST(SynthTest, CascadeRebuildMatchesTruth) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto out = generate(small(seed));
    const auto cascades = build_all_cascades(out.messages);
    const auto& truth = out.truth["cascades"];
    ASSERT_EQ(cascades.size(), truth.size()) << seed;
    std::map<std::string, const Cascade*> by_id;
    for (const auto& c : cascades) by_id[c.cascade_id] = &c;
    for (const auto& rec : truth) {
      const auto& c = *by_id.at(rec["cascade_id"].get<std::string>());
      std::vector<std::string> members;
      for (const auto& n : c.nodes) {
        members.push_back(n.message_id);
        EXPECT_EQ(n.depth, rec["depth"][n.message_id].get<int>());
      }
      EXPECT_EQ(members, rec["members"].get<std::vector<std::string>>());
      const auto m = compute_metrics(c);
      EXPECT_NEAR(m.structural_virality, rec["structural_virality"].get<double>(), 1e-9);
      EXPECT_EQ(m.max_breadth, rec["max_breadth"].get<int>());
    }
  }
}

TEST(SynthTest, PlantedMessagesAreRecovered) {
  const auto out = generate(small(11));
  const auto docs = collect_documents(out.messages, nullptr);
  const auto matches = match_corpus(docs, out.factchecks, TextResources{});
  std::set<std::tuple<std::string, std::string, std::string>> found;
  for (const auto& m : matches) found.emplace(m.group_id, m.message_id, m.factcheck_id);
  ASSERT_FALSE(out.truth["planted"].empty());
  for (const auto& p : out.truth["planted"]) {
    EXPECT_TRUE(found.contains({p["group_id"], p["message_id"], p["factcheck_id"]})) << p.dump();
  }
  EXPECT_EQ(found.size(), out.truth["planted"].size());
}

}  // namespace
}  // namespace attn
