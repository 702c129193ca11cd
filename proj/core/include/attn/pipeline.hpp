#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "attn/ingest.hpp"
#include "attn/motifs.hpp"
#include "attn/report.hpp"

// File-to-file stages. Each reads only documented files, writes its
// artifacts, and records itself in <manifest> (by default manifest.json next
// to its outputs). Fatal problems surface as attn::Error subclasses whose
// messages name the file and record.
namespace attn::stages {

using Notify = std::function<void(const std::string&)>;

struct Common {
  unsigned jobs = 1;
  // Receives non-fatal warnings (stale manifest, skipped records, ...).
  Notify warn = [](const std::string&) {};
};

struct StageResult {
  std::vector<std::filesystem::path> outputs;
  nlohmann::json summary = nlohmann::json::object();
};

inline constexpr const char* kMessagesFile = "messages.jsonl";
inline constexpr const char* kIngestSummaryFile = "ingest_summary.json";
inline constexpr const char* kCascadesFile = "cascades.jsonl";
inline constexpr const char* kMetricsFile = "metrics.csv";
inline constexpr const char* kSeriesFile = "metrics_series.jsonl";
inline constexpr const char* kMotifsFile = "motifs.csv";
inline constexpr const char* kMatchesFile = "matches.jsonl";
inline constexpr const char* kFalsehoodFile = "falsehood_labels.csv";
inline constexpr const char* kManifestFile = "manifest.json";

struct IngestArgs {
  std::filesystem::path log;
  LogFormat format = LogFormat::jsonl;
  bool assume_utc = false;
  std::optional<std::filesystem::path> salt_file;
  // When given, every group must be labeled.
  std::optional<std::filesystem::path> labels;
  std::filesystem::path out_dir;
};
StageResult ingest(const IngestArgs& args, const Common& common = {});

struct CascadesArgs {
  std::filesystem::path messages;
  std::filesystem::path out_dir;
};
StageResult cascades(const CascadesArgs& args, const Common& common = {});

struct MetricsArgs {
  std::filesystem::path cascades;
  std::filesystem::path labels;
  // Absent: every cascade is unclassified.
  std::optional<std::filesystem::path> falsehood;
  std::filesystem::path out_dir;
};
StageResult metrics(const MetricsArgs& args, const Common& common = {});

struct MotifsArgs {
  std::filesystem::path cascades;
  MotifOptions options;
  std::filesystem::path out_dir;
};
StageResult motifs(const MotifsArgs& args, const Common& common = {});

struct FalsehoodArgs {
  std::filesystem::path messages;
  std::filesystem::path cascades;
  std::filesystem::path factchecks;
  std::optional<std::filesystem::path> stopwords;
  std::optional<std::filesystem::path> lemmas;
  // URL-text cache; read when present, rewritten after fetching.
  std::optional<std::filesystem::path> articles;
  bool fetch = false;
  double threshold = 0.5;
  // Reviewed candidates; confirmed entries drive the cascade labels.
  std::optional<std::filesystem::path> review;
  // Treat every candidate as confirmed (unsupervised runs).
  bool accept_candidates = false;
  std::filesystem::path out_dir;
};
StageResult falsehood(const FalsehoodArgs& args, const Common& common = {});

struct ReportArgs {
  std::filesystem::path metrics;
  // Defaults to metrics_series.jsonl beside the metrics table.
  std::optional<std::filesystem::path> series;
  // Override the table's category / falsehood columns when given.
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> falsehood;
  std::optional<std::filesystem::path> motifs;
  Bucket bucket = Bucket::day;
  std::filesystem::path out_dir;
};
StageResult report(const ReportArgs& args, const Common& common = {});

struct SynthArgs {
  std::filesystem::path config;
  std::filesystem::path corpus;
  std::filesystem::path truth;
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> factchecks;
};
StageResult synth(const SynthArgs& args, const Common& common = {});

struct PipelineArgs {
  std::filesystem::path log;
  LogFormat format = LogFormat::jsonl;
  bool assume_utc = false;
  std::optional<std::filesystem::path> salt_file;
  std::filesystem::path labels;
  // Without fact-checks the falsehood stage is skipped and every cascade is
  // unclassified.
  std::optional<std::filesystem::path> factchecks;
  std::optional<std::filesystem::path> stopwords;
  std::optional<std::filesystem::path> lemmas;
  std::optional<std::filesystem::path> articles;
  bool fetch = false;
  double threshold = 0.5;
  std::optional<std::filesystem::path> review;
  bool accept_candidates = false;
  MotifOptions motif_options;
  Bucket bucket = Bucket::day;
  std::filesystem::path out_dir;
};
// ingest -> cascades -> falsehood -> metrics -> motifs -> report, writing
// the report under out_dir/report.
StageResult pipeline(const PipelineArgs& args, const Common& common = {});

std::string version();

}  // namespace attn::stages
