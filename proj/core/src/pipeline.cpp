#include "attn/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "attn/article.hpp"
#include "attn/cascade.hpp"
#include "attn/errors.hpp"
#include "attn/falsehood.hpp"
#include "attn/io.hpp"
#include "attn/manifest.hpp"
#include "attn/metrics.hpp"
#include "attn/synth.hpp"
#include "attn/text.hpp"

#ifndef ATTN_VERSION
#define ATTN_VERSION "0.0.0"
#endif

namespace attn::stages {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string path_key(const fs::path& p) { return p.lexically_normal().generic_string(); }

// Loads the manifest, warns about changed inputs, and records the stage
// once its outputs are written.
class Recorder {
 public:
  Recorder(std::string stage, fs::path manifest_path, const std::vector<fs::path>& inputs, json params,
           const Common& common)
      : manifest_path_(std::move(manifest_path)), manifest_(PipelineManifest::load(manifest_path_)) {
    entry_.stage = std::move(stage);
    entry_.params = std::move(params);
    entry_.version = ATTN_VERSION;
    for (const auto& p : inputs) {
      if (!fs::exists(p)) throw IoError("input '" + p.string() + "' does not exist");
      entry_.inputs.push_back({path_key(p), file_digest(p)});
    }
    for (const auto& w : manifest_.stale_inputs(entry_.stage, entry_.inputs)) common.warn(w);
  }

  void commit(const std::vector<fs::path>& outputs) {
    for (const auto& p : outputs) entry_.outputs.push_back(path_key(p));
    manifest_.record(std::move(entry_));
    manifest_.save(manifest_path_);
  }

 private:
  fs::path manifest_path_;
  PipelineManifest manifest_;
  ManifestEntry entry_;
};

void write_text(const fs::path& path, const std::string& content) {
  auto out = open_output(path);
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

template <typename Fn>
void write_with(const fs::path& path, Fn&& fn) {
  std::ostringstream buffer;
  fn(buffer);
  write_text(path, buffer.str());
}

std::vector<Message> read_canonical_messages(const fs::path& path) {
  auto in = open_input(path);
  auto parsed = parse_log(in, LogFormat::jsonl, {});
  if (!parsed.warnings.empty()) {
    const auto& w = parsed.warnings.front();
    throw DataError(path.string() + ":" + std::to_string(w.line) + ": " + w.message);
  }
  return std::move(parsed.messages);
}

std::vector<Cascade> read_cascade_file(const fs::path& path) {
  auto in = open_input(path);
  return read_cascades(in, path.string());
}

std::vector<GroupLabel> read_labels_file(const fs::path& path) {
  auto in = open_input(path);
  return read_group_labels(in, path.string());
}

std::map<std::string, CascadeFalsehood> read_falsehood_file(const fs::path& path) {
  auto in = open_input(path);
  return read_falsehood_labels(in, path.string());
}

std::string read_salt(const fs::path& path) {
  auto salt = read_file(path);
  while (!salt.empty() && (salt.back() == '\n' || salt.back() == '\r')) salt.pop_back();
  if (salt.empty()) throw ConfigError("salt file '" + path.string() + "' is empty");
  return salt;
}

TextResources load_resources(const std::optional<fs::path>& stopwords, const std::optional<fs::path>& lemmas) {
  std::istringstream empty_stop, empty_lemmas;
  std::ifstream stop_file, lemma_file;
  auto open = [](std::ifstream& f, const fs::path& p) {
    f.open(p);
    if (!f) throw ConfigError("cannot read resource file '" + p.string() + "'");
  };
  if (stopwords) open(stop_file, *stopwords);
  if (lemmas) open(lemma_file, *lemmas);
  return TextResources::parse(stopwords ? static_cast<std::istream&>(stop_file) : empty_stop,
                              lemmas ? static_cast<std::istream&>(lemma_file) : empty_lemmas);
}

json optional_path(const std::optional<fs::path>& p) { return p ? json(path_key(*p)) : json(nullptr); }

}  // namespace

std::string version() { return ATTN_VERSION; }

StageResult ingest(const IngestArgs& args, const Common& common) {
  std::vector<fs::path> inputs{args.log};
  if (args.salt_file) inputs.push_back(*args.salt_file);
  if (args.labels) inputs.push_back(*args.labels);
  ensure_directory(args.out_dir);
  Recorder recorder("ingest", args.out_dir / kManifestFile, inputs,
                    {{"format", args.format == LogFormat::jsonl ? "jsonl" : "csv"},
                     {"assume_utc", args.assume_utc},
                     {"salted", args.salt_file.has_value()},
                     {"labels", optional_path(args.labels)}},
                    common);

  IngestOptions options;
  options.assume_utc = args.assume_utc;
  if (args.salt_file) options.salt = read_salt(*args.salt_file);
  auto in = open_input(args.log);
  auto parsed = parse_log(in, args.format, options);
  for (const auto& w : parsed.warnings) common.warn(args.log.string() + ":" + std::to_string(w.line) + ": " + w.message);

  std::vector<GroupLabel> labels;
  if (args.labels) {
    labels = read_labels_file(*args.labels);
  } else {
    std::set<std::string> groups;
    for (const auto& m : parsed.messages) groups.insert(m.group_id);
    for (const auto& g : groups) labels.push_back({g, GroupCategory::non_political});
  }
  auto summary = validate_corpus(parsed.messages, labels);
  if (!args.labels) summary.labeled_groups = 0;

  // Canonical order: group, then (timestamp, seq).
  std::stable_sort(parsed.messages.begin(), parsed.messages.end(), [](const Message& a, const Message& b) {
    if (a.group_id != b.group_id) return a.group_id < b.group_id;
    return posted_before(a, b);
  });

  const auto messages_path = args.out_dir / kMessagesFile;
  const auto summary_path = args.out_dir / kIngestSummaryFile;
  write_with(messages_path, [&](std::ostream& out) { write_messages(out, parsed.messages); });

  StageResult result;
  json groups = json::object();
  for (const auto& [id, g] : summary.groups) {
    groups[id] = {{"messages", g.messages}, {"replies", g.replies}, {"dangling_replies", g.dangling_replies}};
  }
  result.summary = {{"messages", summary.total_messages},
                    {"replies", summary.total_replies},
                    {"dangling_replies", summary.dangling_replies},
                    {"groups", summary.groups.size()},
                    {"labeled_groups", summary.labeled_groups},
                    {"unused_labels", summary.unused_labels},
                    {"warnings", parsed.warnings.size()},
                    {"first", summary.first ? json(format_timestamp(*summary.first)) : json(nullptr)},
                    {"last", summary.last ? json(format_timestamp(*summary.last)) : json(nullptr)},
                    {"per_group", groups}};
  write_text(summary_path, result.summary.dump(2) + "\n");
  result.outputs = {messages_path, summary_path};
  recorder.commit(result.outputs);
  return result;
}

StageResult cascades(const CascadesArgs& args, const Common& common) {
  ensure_directory(args.out_dir);
  Recorder recorder("cascades", args.out_dir / kManifestFile, {args.messages}, json::object(), common);
  const auto messages = read_canonical_messages(args.messages);
  const auto built = build_all_cascades(messages, common.jobs);
  const auto path = args.out_dir / kCascadesFile;
  write_with(path, [&](std::ostream& out) { write_cascades(out, built); });

  StageResult result;
  std::size_t in_cascades = 0;
  for (const auto& c : built) in_cascades += c.size();
  result.summary = {{"messages", messages.size()}, {"cascades", built.size()}, {"messages_in_cascades", in_cascades}};
  result.outputs = {path};
  recorder.commit(result.outputs);
  return result;
}

StageResult metrics(const MetricsArgs& args, const Common& common) {
  std::vector<fs::path> inputs{args.cascades, args.labels};
  if (args.falsehood) inputs.push_back(*args.falsehood);
  ensure_directory(args.out_dir);
  Recorder recorder("metrics", args.out_dir / kManifestFile, inputs, {{"falsehood", optional_path(args.falsehood)}},
                    common);

  const auto cascades = read_cascade_file(args.cascades);
  const auto label_map = to_label_map(read_labels_file(args.labels));
  std::map<std::string, CascadeFalsehood> falsehood;
  if (args.falsehood) falsehood = read_falsehood_file(*args.falsehood);

  std::vector<std::string> unlabeled;
  for (const auto& c : cascades) {
    if (!label_map.contains(c.group_id) &&
        (unlabeled.empty() || std::find(unlabeled.begin(), unlabeled.end(), c.group_id) == unlabeled.end())) {
      unlabeled.push_back(c.group_id);
    }
  }
  if (!unlabeled.empty()) {
    std::sort(unlabeled.begin(), unlabeled.end());
    throw UnlabeledGroupsError(unlabeled);
  }
  for (const auto& [id, label] : falsehood) {
    if (std::none_of(cascades.begin(), cascades.end(), [&](const Cascade& c) { return c.cascade_id == id; })) {
      throw DataError(args.falsehood->string() + ": label for unknown cascade '" + id + "'");
    }
  }

  const auto computed = compute_all_metrics(cascades, common.jobs);
  std::vector<ReportRow> rows;
  rows.reserve(computed.size());
  for (const auto& m : computed) {
    const auto f = falsehood.find(m.cascade_id);
    rows.push_back({m, label_map.find(m.group_id)->second, f == falsehood.end() ? CascadeFalsehood::unclassified : f->second});
  }
  const auto table_path = args.out_dir / kMetricsFile;
  const auto series_path = args.out_dir / kSeriesFile;
  write_with(table_path, [&](std::ostream& out) { write_metrics_table(out, rows); });
  write_with(series_path, [&](std::ostream& out) { write_metrics_series(out, computed); });

  StageResult result;
  result.summary = {{"cascades", computed.size()}};
  result.outputs = {table_path, series_path};
  recorder.commit(result.outputs);
  return result;
}

StageResult motifs(const MotifsArgs& args, const Common& common) {
  ensure_directory(args.out_dir);
  Recorder recorder("motifs", args.out_dir / kManifestFile, {args.cascades},
                    {{"max_n", args.options.max_n},
                     {"star_loop", args.options.star_loop == StarLoopSemantics::induced ? "induced" : "edge_subgraph"},
                     {"strategy", args.options.strategy == MatchStrategy::fast ? "fast" : "generic"}},
                    common);
  const auto cascades = read_cascade_file(args.cascades);
  const auto reports = detect_all_motifs(cascades, args.options, common.jobs);
  const auto path = args.out_dir / kMotifsFile;
  write_with(path, [&](std::ostream& out) { write_motif_reports(out, reports); });

  StageResult result;
  json present = json::object();
  for (std::size_t i = 0; i < kAllMotifs.size(); ++i) {
    std::size_t count = 0;
    for (const auto& r : reports) count += r.present[i] != MotifPresence::absent ? 1 : 0;
    present[std::string(to_string(kAllMotifs[i]))] = count;
  }
  result.summary = {{"cascades", reports.size()}, {"present", present}};
  result.outputs = {path};
  recorder.commit(result.outputs);
  return result;
}

StageResult falsehood(const FalsehoodArgs& args, const Common& common) {
  std::vector<fs::path> inputs{args.messages, args.cascades, args.factchecks};
  for (const auto* p : {&args.stopwords, &args.lemmas, &args.review}) {
    if (*p) inputs.push_back(**p);
  }
  if (args.articles && fs::exists(*args.articles)) inputs.push_back(*args.articles);
  ensure_directory(args.out_dir);
  Recorder recorder("falsehood", args.out_dir / kManifestFile, inputs,
                    {{"threshold", args.threshold},
                     {"fetch", args.fetch},
                     {"accept_candidates", args.accept_candidates},
                     {"review", optional_path(args.review)}},
                    common);
  if (args.review && args.accept_candidates) throw ConfigError("--review and --accept-candidates are exclusive");

  const auto messages = read_canonical_messages(args.messages);
  const auto cascades = read_cascade_file(args.cascades);
  std::vector<FactCheck> factchecks;
  {
    auto in = open_input(args.factchecks);
    factchecks = read_factchecks(in, args.factchecks.string());
  }
  const auto resources = load_resources(args.stopwords, args.lemmas);

  ArticleCache cache;
  bool use_cache = false;
  std::vector<fs::path> outputs;
  if (args.articles) {
    use_cache = true;
    if (fs::exists(*args.articles)) {
      auto in = open_input(*args.articles);
      cache.load(in, args.articles->string());
    }
    std::vector<std::string> urls;
    for (const auto& m : messages) urls.insert(urls.end(), m.urls.begin(), m.urls.end());
    std::sort(urls.begin(), urls.end());
    urls.erase(std::unique(urls.begin(), urls.end()), urls.end());
    const auto before = cache.size();
    cache.fetch_missing(urls, !args.fetch);
    if (cache.size() != before) {
      write_with(*args.articles, [&](std::ostream& out) { cache.save(out); });
      outputs.push_back(*args.articles);
    }
  }

  const auto documents = collect_documents(messages, use_cache ? &cache : nullptr);
  MatchOptions options;
  options.threshold = args.threshold;
  options.jobs = common.jobs;
  auto matches = match_corpus(documents, factchecks, resources, options);
  if (args.review) {
    auto in = open_input(*args.review);
    const auto reviewed = read_matches(in, args.review->string());
    matches = apply_review(matches, reviewed);
  } else if (args.accept_candidates) {
    for (auto& m : matches) m.status = MatchStatus::confirmed;
  }
  const auto labeling = label_cascades(cascades, matches, messages);

  const auto matches_path = args.out_dir / kMatchesFile;
  const auto labels_path = args.out_dir / kFalsehoodFile;
  write_with(matches_path, [&](std::ostream& out) { write_matches(out, matches); });
  write_with(labels_path, [&](std::ostream& out) { write_falsehood_labels(out, labeling); });

  StageResult result;
  std::size_t confirmed = 0;
  for (const auto& m : matches) confirmed += m.status == MatchStatus::confirmed ? 1 : 0;
  result.summary = {{"documents", documents.size()},
                    {"factchecks", factchecks.size()},
                    {"candidates", matches.size()},
                    {"confirmed", confirmed},
                    {"falsehood_cascades", labeling.falsehood_cascades},
                    {"root_matched_fraction", labeling.root_matched_fraction()}};
  outputs.push_back(matches_path);
  outputs.push_back(labels_path);
  result.outputs = outputs;
  recorder.commit(result.outputs);
  return result;
}

StageResult report(const ReportArgs& args, const Common& common) {
  const fs::path series_path = args.series ? *args.series : args.metrics.parent_path() / kSeriesFile;
  std::vector<fs::path> inputs{args.metrics, series_path};
  for (const auto* p : {&args.labels, &args.falsehood, &args.motifs}) {
    if (*p) inputs.push_back(**p);
  }
  ensure_directory(args.out_dir);
  Recorder recorder("report", args.out_dir / kManifestFile, inputs, {{"bucket", to_string(args.bucket)}}, common);

  std::vector<MetricsTableRow> table;
  {
    auto in = open_input(args.metrics);
    table = read_metrics_table(in, args.metrics.string());
  }
  std::vector<CascadeMetrics> series;
  {
    auto in = open_input(series_path);
    series = read_metrics_series(in, series_path.string());
  }
  std::map<std::string, const CascadeMetrics*> by_id;
  for (const auto& m : series) by_id.emplace(m.cascade_id, &m);
  if (by_id.size() != table.size()) {
    throw DataError(series_path.string() + ": " + std::to_string(by_id.size()) + " cascades, but " + args.metrics.string() +
                    " has " + std::to_string(table.size()));
  }

  std::optional<LabelMap> labels;
  if (args.labels) labels = to_label_map(read_labels_file(*args.labels));
  std::optional<std::map<std::string, CascadeFalsehood>> falsehood;
  if (args.falsehood) falsehood = read_falsehood_file(*args.falsehood);

  ReportInputs inputs_data;
  std::vector<std::string> unlabeled;
  for (const auto& row : table) {
    const auto it = by_id.find(row.cascade_id);
    if (it == by_id.end()) throw DataError(series_path.string() + ": no series for cascade '" + row.cascade_id + "'");
    ReportRow r{*it->second, row.category, row.falsehood};
    if (labels) {
      const auto l = labels->find(row.group_id);
      if (l == labels->end()) {
        unlabeled.push_back(row.group_id);
      } else {
        r.category = l->second;
      }
    }
    if (falsehood) {
      const auto f = falsehood->find(row.cascade_id);
      r.falsehood = f == falsehood->end() ? CascadeFalsehood::unclassified : f->second;
    }
    inputs_data.rows.push_back(std::move(r));
  }
  if (!unlabeled.empty()) {
    std::sort(unlabeled.begin(), unlabeled.end());
    unlabeled.erase(std::unique(unlabeled.begin(), unlabeled.end()), unlabeled.end());
    throw UnlabeledGroupsError(unlabeled);
  }
  if (args.motifs) {
    auto in = open_input(*args.motifs);
    inputs_data.motifs = read_motif_reports(in, args.motifs->string());
  }

  ReportOptions options;
  options.bucket = args.bucket;
  const auto written = write_report(inputs_data, args.out_dir, options);
  for (const auto& n : written.notices) common.warn(n);

  StageResult result;
  for (const auto& p : written.written) result.outputs.push_back(args.out_dir / p);
  result.summary = json::parse(read_file(args.out_dir / "summary.json"));
  recorder.commit(result.outputs);
  return result;
}

StageResult synth(const SynthArgs& args, const Common& common) {
  const auto manifest_path = (args.corpus.has_parent_path() ? args.corpus.parent_path() : fs::path(".")) / kManifestFile;
  Recorder recorder("synth", manifest_path, {args.config}, json::object(), common);
  SynthConfig config;
  try {
    config = parse_synth_config(json::parse(read_file(args.config)));
  } catch (const json::parse_error& e) {
    throw ConfigError(args.config.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(args.config.string() + ": " + e.what());
  }
  const auto out = generate(config);
  for (const auto& w : out.warnings) common.warn(w);

  write_with(args.corpus, [&](std::ostream& o) { write_messages(o, out.messages); });
  write_text(args.truth, out.truth.dump(1) + "\n");
  StageResult result;
  result.outputs = {args.corpus, args.truth};
  if (args.labels) {
    write_with(*args.labels, [&](std::ostream& o) {
      o << "group_id,category\n";
      for (const auto& l : out.labels) o << l.group_id << ',' << to_string(l.category) << '\n';
    });
    result.outputs.push_back(*args.labels);
  }
  if (args.factchecks) {
    write_with(*args.factchecks, [&](std::ostream& o) { write_factchecks(o, out.factchecks); });
    result.outputs.push_back(*args.factchecks);
  }
  result.summary = {{"messages", out.messages.size()},
                    {"groups", out.labels.size()},
                    {"cascades", out.truth["cascades"].size()},
                    {"planted", out.truth["planted"].size()},
                    {"warnings", out.warnings.size()}};
  recorder.commit(result.outputs);
  return result;
}

StageResult pipeline(const PipelineArgs& args, const Common& common) {
  const auto& dir = args.out_dir;
  StageResult result;
  auto absorb = [&](const char* stage, StageResult r) {
    result.outputs.insert(result.outputs.end(), r.outputs.begin(), r.outputs.end());
    result.summary[stage] = std::move(r.summary);
  };

  absorb("ingest", ingest({args.log, args.format, args.assume_utc, args.salt_file, args.labels, dir}, common));
  absorb("cascades", cascades({dir / kMessagesFile, dir}, common));
  std::optional<fs::path> falsehood_labels;
  if (args.factchecks) {
    FalsehoodArgs f;
    f.messages = dir / kMessagesFile;
    f.cascades = dir / kCascadesFile;
    f.factchecks = *args.factchecks;
    f.stopwords = args.stopwords;
    f.lemmas = args.lemmas;
    f.articles = args.articles;
    f.fetch = args.fetch;
    f.threshold = args.threshold;
    f.review = args.review;
    f.accept_candidates = args.accept_candidates;
    f.out_dir = dir;
    absorb("falsehood", falsehood(f, common));
    falsehood_labels = dir / kFalsehoodFile;
  } else {
    common.warn("no fact-check corpus given: falsehood stage skipped, every cascade unclassified");
  }
  absorb("metrics", metrics({dir / kCascadesFile, args.labels, falsehood_labels, dir}, common));
  absorb("motifs", motifs({dir / kCascadesFile, args.motif_options, dir}, common));
  ReportArgs r;
  r.metrics = dir / kMetricsFile;
  r.motifs = dir / kMotifsFile;
  r.bucket = args.bucket;
  r.out_dir = dir / "report";
  absorb("report", report(r, common));
  return result;
}

}  // namespace attn::stages
