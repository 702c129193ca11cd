#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "attn/errors.hpp"
#include "attn/pipeline.hpp"
#include "attn/report.hpp"
#include "support.hpp"

namespace attn {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

stages::PipelineArgs sample_args(const fs::path& out) {
  stages::PipelineArgs a;
  a.log = test::fixture("sample_chat.jsonl");
  a.labels = test::fixture("sample_chat_labels.csv");
  a.out_dir = out;
  return a;
}

TEST(PipelineTest, SampleChatEndToEnd) {
  test::TempDir dir;
  std::vector<std::string> warnings;
  stages::Common common;
  common.warn = [&](const std::string& w) { warnings.push_back(w); };
  stages::pipeline(sample_args(dir.path()), common);

  std::istringstream table(slurp(dir.path() / stages::kMetricsFile));
  const auto rows = read_metrics_table(table);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].cascade_id, "g1:M2");
  EXPECT_EQ(rows[0].depth, 2);
  EXPECT_EQ(rows[0].max_breadth, 2);
  EXPECT_EQ(rows[0].n_nodes, 4);
  EXPECT_EQ(rows[0].n_unique_users, 3);
  EXPECT_DOUBLE_EQ(rows[0].structural_virality, 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(rows[0].duration_minutes, 15.0);
  EXPECT_EQ(rows[0].category, GroupCategory::political);
  EXPECT_TRUE(fs::exists(dir.path() / "report" / "summary.json"));
  EXPECT_TRUE(fs::exists(dir.path() / stages::kMotifsFile));
  // No fact-checks were given, so the falsehood stage is skipped with a warning.
  EXPECT_FALSE(warnings.empty());
}

TEST(PipelineTest, RerunIsByteIdentical) {
  test::TempDir a, b;
  stages::pipeline(sample_args(a.path()));
  stages::pipeline(sample_args(b.path()));
  for (const char* f : {stages::kMessagesFile, stages::kCascadesFile, stages::kMetricsFile, stages::kMotifsFile}) {
    EXPECT_EQ(slurp(a.path() / f), slurp(b.path() / f)) << f;
  }
}

TEST(PipelineTest, EmptyCorpusGivesEmptyCascades) {
  test::TempDir dir;
  const auto messages = dir.path() / "messages.jsonl";
  test::write_file(messages, "");
  const auto result = stages::cascades({messages, dir.path() / "out"});
  EXPECT_EQ(slurp(dir.path() / "out" / stages::kCascadesFile), "");
  EXPECT_EQ(result.summary["cascades"], 0);
}

TEST(PipelineTest, StaleInputWarns) {
  test::TempDir dir;
  stages::ingest({test::fixture("sample_chat.jsonl"), LogFormat::jsonl, false, std::nullopt, std::nullopt, dir.path()});
  const auto messages = dir.path() / stages::kMessagesFile;
  stages::cascades({messages, dir.path()});
  // Drop the last message and run again.
  auto text = slurp(messages);
  text.erase(text.rfind('\n', text.size() - 2) + 1);
  test::write_file(messages, text);
  std::vector<std::string> warnings;
  stages::Common common;
  common.warn = [&](const std::string& w) { warnings.push_back(w); };
  stages::cascades({messages, dir.path()}, common);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("stale manifest"), std::string::npos);
}

TEST(PipelineTest, MetricsNeedsLabelsForEveryGroup) {
  test::TempDir dir;
  stages::ingest({test::fixture("sample_chat.jsonl"), LogFormat::jsonl, false, std::nullopt, std::nullopt, dir.path()});
  stages::cascades({dir.path() / stages::kMessagesFile, dir.path()});
  const auto labels = dir.path() / "labels.csv";
  test::write_file(labels, "group_id,category\ng9,political\n");
  EXPECT_THROW(stages::metrics({dir.path() / stages::kCascadesFile, labels, std::nullopt, dir.path()}),
               UnlabeledGroupsError);
}

TEST(PipelineTest, SynthCorpusRecoversTruth) {
  test::TempDir dir;
  const auto config = dir.path() / "synth.json";
  test::write_file(config, R"({"seed": 3, "n_groups": 5, "cascades_per_group": {"uniform": [3, 8]},
                               "offspring": {"poisson": 1.0, "max": 5}, "noise_messages": 10,
                               "planted_falsehood_rate": 0.3})");
  const auto corpus = dir.path() / "corpus.jsonl";
  stages::synth({config, corpus, dir.path() / "truth.json", dir.path() / "labels.csv", dir.path() / "fc.jsonl"});

  auto args = sample_args(dir.path() / "run");
  args.log = corpus;
  args.labels = dir.path() / "labels.csv";
  args.factchecks = dir.path() / "fc.jsonl";
  args.accept_candidates = true;
  stages::pipeline(args);

  const auto truth = nlohmann::json::parse(slurp(dir.path() / "truth.json"));
  std::istringstream table(slurp(dir.path() / "run" / stages::kMetricsFile));
  const auto rows = read_metrics_table(table);
  ASSERT_EQ(rows.size(), truth["cascades"].size());
  std::map<std::string, MetricsTableRow> by_id;
  for (const auto& r : rows) by_id[r.cascade_id] = r;
  for (const auto& rec : truth["cascades"]) {
    const auto& r = by_id.at(rec["cascade_id"].get<std::string>());
    EXPECT_EQ(r.depth, rec["max_depth"].get<int>());
    EXPECT_EQ(r.n_nodes, rec["n_nodes"].get<int>());
    EXPECT_NEAR(r.structural_virality, rec["structural_virality"].get<double>(), 1e-9);
    EXPECT_EQ(r.falsehood == CascadeFalsehood::falsehood, rec["falsehood"].get<bool>()) << r.cascade_id;
  }
}

}  // namespace
}  // namespace attn
