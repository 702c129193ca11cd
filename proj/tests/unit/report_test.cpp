#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "attn/errors.hpp"
#include "attn/metrics.hpp"
#include "attn/report.hpp"
#include "support.hpp"

namespace attn {
namespace {

namespace fs = std::filesystem;

// Random cascades spread over ~three weeks in four groups with mixed labels.
std::vector<ReportRow> random_rows(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::vector<ReportRow> rows;
  for (int i = 0; i < n; ++i) {
    auto c = test::tree_cascade(test::random_tree(rng, 2 + static_cast<int>(rng() % 12)));
    const auto shift = std::chrono::minutes{static_cast<int>(rng() % (60 * 24 * 21))};
    for (auto& node : c.nodes) {
      node.message_id += "-" + std::to_string(i);
      node.timestamp += shift;
    }
    c.group_id = "g" + std::to_string(rng() % 4);
    c.cascade_id = make_cascade_id(c.group_id, c.nodes.front().message_id);
    ReportRow r;
    r.metrics = compute_metrics(c);
    r.category = rng() % 2 ? GroupCategory::political : GroupCategory::non_political;
    r.falsehood = rng() % 5 == 0 ? CascadeFalsehood::falsehood : CascadeFalsehood::unclassified;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(CcdfTest, StartsAtOneAndNeverIncreases) {
  const std::vector<double> v{3, 1, 2, 2, 5};
  const auto s = ccdf(v);
  EXPECT_EQ(s.n, 5u);
  EXPECT_EQ(s.points, (std::vector<std::pair<double, double>>{{1, 1.0}, {2, 0.8}, {3, 0.4}, {5, 0.2}}));
  EXPECT_THROW(ccdf(std::span<const double>{}), DomainError);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs(1 + rng() % 300);
    for (auto& x : xs) x = static_cast<double>(rng() % 40);
    const auto c = ccdf(xs);
    EXPECT_EQ(c.points.front().second, 1.0);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      EXPECT_LT(c.points[i - 1].first, c.points[i].first);
      EXPECT_LT(c.points[i].second, c.points[i - 1].second);
    }
    // P(X >= x) equals the direct count.
    for (const auto& [x, p] : c.points) {
      const auto ge = std::count_if(xs.begin(), xs.end(), [&](double y) { return y >= x; });
      EXPECT_DOUBLE_EQ(p, static_cast<double>(ge) / static_cast<double>(xs.size()));
    }
  }
}

TEST(BucketTest, ParseAndName) {
  EXPECT_EQ(parse_bucket("week"), Bucket::week);
  EXPECT_EQ(to_string(Bucket::day), "day");
  EXPECT_THROW(parse_bucket("month"), ConfigError);
}

// Oracle: group by calendar day (or Monday-start week) directly.
TEST(TimeseriesTest, MatchesDirectGrouping) {
  const auto rows = random_rows(9, 400);
  for (const auto bucket : {Bucket::day, Bucket::week}) {
    const auto series = daily_counts(rows, bucket);
    ASSERT_EQ(series.size(), 6u);
    auto key_of = [&](Timestamp t) {
      auto d = std::chrono::floor<std::chrono::days>(t);
      if (bucket == Bucket::week) d -= std::chrono::days{(d.time_since_epoch().count() + 3) % 7};
      return d;
    };
    std::map<std::string, std::map<std::chrono::sys_days, std::size_t>> expected;
    std::map<std::string, std::size_t> totals;
    for (const auto& r : rows) {
      for (const auto& k : {topic_class(r), sub_class(r)}) {
        ++expected[k][key_of(r.metrics.start)];
        ++totals[k];
      }
    }
    for (const auto& [key, counts] : series) {
      std::size_t sum = 0;
      for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i > 0) {
          EXPECT_EQ((counts[i].start - counts[i - 1].start).count(), bucket == Bucket::day ? 1 : 7);
        }
        if (bucket == Bucket::week) {
          EXPECT_EQ(std::chrono::weekday(counts[i].start), std::chrono::Monday);
        }
        const auto it = expected[key].find(counts[i].start);
        EXPECT_EQ(counts[i].count, it == expected[key].end() ? 0u : it->second);
        sum += counts[i].count;
      }
      EXPECT_EQ(sum, totals[key]) << key;
    }
  }
  for (const auto& [key, counts] : daily_counts(std::span<const ReportRow>{})) EXPECT_TRUE(counts.empty()) << key;
}

// Oracle: classify every pair with the Allen relation.
TEST(OverlapTest, MatchesPairwiseAllenRelations) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    std::map<std::string, std::vector<Interval>> groups;
    const auto t0 = parse_timestamp("2020-01-01T00:00:00Z", false);
    for (int i = 0; i < 60; ++i) {
      const auto s = t0 + std::chrono::minutes{static_cast<int>(rng() % 50)};
      groups["g" + std::to_string(rng() % 3)].push_back({s, s + std::chrono::minutes{static_cast<int>(rng() % 8)}});
    }
    const auto stats = overlap_stats(groups);
    OverlapCount corpus;
    for (const auto& [g, ivs] : groups) {
      OverlapCount c;
      for (std::size_t a = 0; a < ivs.size(); ++a) {
        for (std::size_t b = a + 1; b < ivs.size(); ++b) {
          ++c.pairs;
          if (disjoint(allen_relation(ivs[a], ivs[b]))) ++c.disjoint_pairs;
        }
      }
      EXPECT_EQ(stats.groups.at(g).pairs, c.pairs);
      EXPECT_EQ(stats.groups.at(g).disjoint_pairs, c.disjoint_pairs);
      corpus.pairs += c.pairs;
      corpus.disjoint_pairs += c.disjoint_pairs;
    }
    EXPECT_EQ(stats.corpus.pairs, corpus.pairs);
    EXPECT_EQ(stats.corpus.disjoint_pairs, corpus.disjoint_pairs);
  }
}

TEST(MetricsTableTest, RoundTrips) {
  const auto rows = random_rows(3, 40);
  std::ostringstream out;
  write_metrics_table(out, rows);
  std::istringstream in(out.str());
  const auto back = read_metrics_table(in);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& m = rows[i].metrics;
    EXPECT_EQ(back[i].cascade_id, m.cascade_id);
    EXPECT_EQ(back[i].category, rows[i].category);
    EXPECT_EQ(back[i].falsehood, rows[i].falsehood);
    EXPECT_EQ(back[i].depth, m.depth);
    EXPECT_EQ(back[i].structural_virality, m.structural_virality);
    EXPECT_EQ(back[i].duration_minutes, m.duration_minutes);
  }
  std::istringstream bad("cascade_id,group_id,category,falsehood,n_nodes,depth,max_breadth,structural_virality,"
                         "duration_minutes,n_unique_users\ng:a,g,leftist,unclassified,2,1,1,1,1,2\n");
  EXPECT_THROW(read_metrics_table(bad, "m.csv"), DataError);
}

TEST(WriteReportTest, DeterministicAndComplete) {
  ReportInputs inputs;
  inputs.rows = random_rows(11, 150);
  test::TempDir a, b;
  const auto ra = write_report(inputs, a.path());
  const auto rb = write_report(inputs, b.path());
  ASSERT_EQ(ra.written.size(), rb.written.size());
  for (const auto& p : ra.written) {
    const auto rel = fs::relative(p, a.path());
    EXPECT_EQ(slurp(p), slurp(b.path() / rel)) << rel;
  }
  for (const auto key : kTopicClasses) EXPECT_TRUE(fs::exists(a.path() / "timeseries" / ("day__" + std::string(key) + ".csv")));
  for (const auto key : kSubClasses) EXPECT_TRUE(fs::exists(a.path() / "timeseries" / ("day__" + std::string(key) + ".csv")));
  EXPECT_TRUE(fs::exists(a.path() / "ccdf" / "structural_virality__political.csv"));
  EXPECT_TRUE(fs::exists(a.path() / "summary.json"));

  std::istringstream ccdf_csv(slurp(a.path() / "ccdf" / "depth__political.csv"));
  std::string line;
  std::getline(ccdf_csv, line);
  EXPECT_EQ(line, "x,p_ge,n");
  std::getline(ccdf_csv, line);
  EXPECT_NE(line.find(",1,"), std::string::npos) << line;
}

TEST(WriteReportTest, EmptyClassesProduceNotices) {
  ReportInputs inputs;
  inputs.rows = random_rows(2, 20);
  for (auto& r : inputs.rows) {
    r.category = GroupCategory::political;
    r.falsehood = CascadeFalsehood::unclassified;
  }
  test::TempDir dir;
  const auto result = write_report(inputs, dir.path());
  EXPECT_FALSE(fs::exists(dir.path() / "ccdf" / "depth__non_political.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "timeseries" / "day__non_political.csv"));
  const auto has = [&](const std::string& s) {
    return std::any_of(result.notices.begin(), result.notices.end(),
                       [&](const std::string& n) { return n.find(s) != std::string::npos; });
  };
  EXPECT_TRUE(has("class non_political is empty"));
  EXPECT_TRUE(has("class political__falsehood is empty"));
}

}  // namespace
}  // namespace attn
