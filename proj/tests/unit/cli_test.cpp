#include <gtest/gtest.h>

#include <sys/wait.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "support.hpp"

namespace {

namespace fs = std::filesystem;
using attn::test::TempDir;
using attn::test::fixture;
using attn::test::write_file;

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const TempDir& dir, const std::string& args) {
  const auto out = dir.path() / "stdout.txt", err = dir.path() / "stderr.txt";
  const std::string cmd = std::string("'") + ATTN_CLI_PATH + "' " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

TEST(CliTest, VersionAndHelp) {
  TempDir dir;
  const auto v = run(dir, "--version");
  EXPECT_EQ(v.status, 0);
  EXPECT_FALSE(v.out.empty());
  EXPECT_EQ(run(dir, "--help").status, 0);
}

TEST(CliTest, UsageErrorsExitTwo) {
  TempDir dir;
  EXPECT_EQ(run(dir, "frobnicate").status, 2);
  EXPECT_EQ(run(dir, "ingest " + q(dir.path() / "absent.jsonl")).status, 2);
  EXPECT_EQ(run(dir, "motifs --cascades " + q(fixture("sample_chat.jsonl")) + " --strategy magic").status, 2);
}

TEST(CliTest, PipelineJsonSummary) {
  TempDir dir;
  const auto out = dir.path() / "run";
  const auto r = run(dir, "--format json pipeline " + q(fixture("sample_chat.jsonl")) + " --labels " +
                              q(fixture("sample_chat_labels.csv")) + " --out " + q(out));
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["stage"], "pipeline");
  EXPECT_TRUE(fs::exists(out / "metrics.csv"));
  EXPECT_NE(slurp(out / "metrics.csv").find("g1:M2,g1,political,unclassified,4,2,2,"), std::string::npos);
}

TEST(CliTest, StagesChainThroughFiles) {
  TempDir dir;
  const auto o = dir.path();
  ASSERT_EQ(run(dir, "ingest " + q(fixture("sample_chat.jsonl")) + " --out " + q(o)).status, 0);
  ASSERT_EQ(run(dir, "cascades --messages " + q(o / "messages.jsonl") + " --out " + q(o)).status, 0);
  ASSERT_EQ(run(dir, "metrics --cascades " + q(o / "cascades.jsonl") + " --labels " + q(fixture("sample_chat_labels.csv")) +
                         " --out " + q(o)).status, 0);
  ASSERT_EQ(run(dir, "motifs --cascades " + q(o / "cascades.jsonl") + " --strategy generic --out " + q(o)).status, 0);
  const auto r = run(dir, "report --metrics " + q(o / "metrics.csv") + " --motifs " + q(o / "motifs.csv") +
                              " --bucket week --out " + q(o / "report"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(o / "report" / "timeseries" / "week__political.csv"));
  EXPECT_TRUE(fs::exists(o / "manifest.json"));
}

TEST(CliTest, DataErrorsExitFour) {
  TempDir dir;
  const auto labels = dir.path() / "labels.csv";
  write_file(labels, "group,category\ng1,political\n");
  const auto r = run(dir, "pipeline " + q(fixture("sample_chat.jsonl")) + " --labels " + q(labels) + " --out " + q(dir.path() / "o"));
  EXPECT_EQ(r.status, 4);
  EXPECT_NE(r.err.find("group_id"), std::string::npos);
}

TEST(CliTest, ConfigErrorsExitTwo) {
  TempDir dir;
  const auto config = dir.path() / "synth.json";
  write_file(config, "{\"n_groups\": 0}");
  const auto r = run(dir, "synth --config " + q(config) + " --truth " + q(dir.path() / "t.json") + " --out " +
                              q(dir.path() / "c.jsonl"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("n_groups"), std::string::npos);
}

TEST(CliTest, SynthIsDeterministic) {
  TempDir dir;
  const auto config = dir.path() / "synth.json";
  write_file(config, "{\"seed\": 9, \"n_groups\": 2}");
  for (const char* name : {"a", "b"}) {
    ASSERT_EQ(run(dir, "synth --config " + q(config) + " --truth " + q(dir.path() / (std::string(name) + ".truth.json")) +
                           " --out " + q(dir.path() / name / "corpus.jsonl")).status, 0);
  }
  EXPECT_EQ(slurp(dir.path() / "a" / "corpus.jsonl"), slurp(dir.path() / "b" / "corpus.jsonl"));
  EXPECT_EQ(slurp(dir.path() / "a.truth.json"), slurp(dir.path() / "b.truth.json"));
}

}  // namespace
