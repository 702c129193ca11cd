#pragma once

#include <chrono>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "attn/cascade.hpp"
#include "attn/falsehood.hpp"
#include "attn/ingest.hpp"
#include "attn/metrics.hpp"
#include "attn/motifs.hpp"

namespace attn {

// One cascade with its class labels.
struct ReportRow {
  CascadeMetrics metrics;
  GroupCategory category = GroupCategory::non_political;
  CascadeFalsehood falsehood = CascadeFalsehood::unclassified;
};

// Class keys: the two topic classes and the four topic x falsehood classes.
inline constexpr std::string_view kTopicClasses[] = {"political", "non_political"};
inline constexpr std::string_view kSubClasses[] = {"political__falsehood", "political__unclassified",
                                                   "non_political__falsehood", "non_political__unclassified"};

std::string topic_class(const ReportRow& row);
std::string sub_class(const ReportRow& row);

struct CCDFSeries {
  std::string attribute;
  std::string class_key;
  std::size_t n = 0;
  // (x, P(X >= x)) for each distinct x, x strictly increasing.
  std::vector<std::pair<double, double>> points;
};

// Empirical P(X >= x). Throws DomainError on empty input.
CCDFSeries ccdf(std::span<const double> values);

enum class Bucket { day, week };

std::string_view to_string(Bucket bucket);
// Throws ConfigError for anything but "day" or "week".
Bucket parse_bucket(std::string_view text);

struct BucketCount {
  std::chrono::sys_days start;
  std::size_t count = 0;
};

// Cascade counts per class keyed by the UTC bucket of the root timestamp,
// zero-filled over the whole corpus range. Every class key is present.
// Weeks start on Monday.
std::map<std::string, std::vector<BucketCount>> daily_counts(std::span<const ReportRow> rows,
                                                             Bucket bucket = Bucket::day);

struct OverlapCount {
  std::size_t pairs = 0;
  std::size_t disjoint_pairs = 0;
  double fraction() const {
    return pairs == 0 ? 0.0 : static_cast<double>(disjoint_pairs) / static_cast<double>(pairs);
  }
};

struct OverlapStats {
  std::map<std::string, OverlapCount> groups;
  OverlapCount corpus;
};

// Pairs of cascades within the same group that do not overlap in time
// (AllenRelation before/after). Counted by sorting endpoints, O(n log n).
OverlapStats overlap_stats(const std::map<std::string, std::vector<Interval>>& intervals_by_group);
OverlapStats overlap_stats(std::span<const ReportRow> rows);

// cascade_id,group_id,category,falsehood,n_nodes,depth,max_breadth,
// structural_virality,duration_minutes,n_unique_users
void write_metrics_table(std::ostream& out, std::span<const ReportRow> rows);

struct MetricsTableRow {
  std::string cascade_id;
  std::string group_id;
  GroupCategory category = GroupCategory::non_political;
  CascadeFalsehood falsehood = CascadeFalsehood::unclassified;
  int n_nodes = 0;
  int depth = 0;
  int max_breadth = 0;
  double structural_virality = 0.0;
  double duration_minutes = 0.0;
  int n_unique_users = 0;
};

std::vector<MetricsTableRow> read_metrics_table(std::istream& in, std::string_view source = "metrics");

struct ReportInputs {
  std::vector<ReportRow> rows;
  // Optional; motif frequencies are skipped when absent.
  std::optional<std::vector<MotifReport>> motifs;
};

struct ReportOptions {
  Bucket bucket = Bucket::day;
};

struct ReportResult {
  std::vector<std::filesystem::path> written;
  std::vector<std::string> notices;
};

// Writes ccdf/, profiles/, timeseries/, motifs/, figures/ and summary.json
// under out_dir. CSV outputs are byte-identical for identical inputs.
// Throws IoError when out_dir cannot be created or written.
ReportResult write_report(const ReportInputs& inputs, const std::filesystem::path& out_dir,
                          const ReportOptions& options = {});

}  // namespace attn
