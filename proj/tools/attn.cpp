#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "attn/errors.hpp"
#include "attn/pipeline.hpp"

namespace fs = std::filesystem;
using attn::stages::StageResult;

namespace {

// Exit codes: 0 success, 1 unexpected failure, 2 usage or configuration,
// 3 I/O, 4 data or validation.
enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kIo = 3, kData = 4 };

struct Globals {
  unsigned jobs = 1;
  std::string out;
  std::string log_level = "info";
  std::string summary_format = "text";
};

// Nested blocks that do not fit on a line are left to --format json.
void print_text(const nlohmann::json& value, const std::string& prefix, int level) {
  for (const auto& [key, item] : value.items()) {
    if (item.is_object() && level == 0 && prefix.empty() && item.dump().size() > 160) {
      print_text(item, key + ".", level + 1);
      continue;
    }
    std::string text = item.is_string() ? item.get<std::string>() : item.dump();
    if (item.is_structured() && text.size() > 160) text = "(" + std::to_string(item.size()) + " entries)";
    std::cout << prefix << key << ": " << text << '\n';
  }
}

void print_summary(const std::string& stage, const StageResult& result, const Globals& globals) {
  if (globals.summary_format == "json") {
    nlohmann::json j = {{"stage", stage}, {"summary", result.summary}, {"outputs", nlohmann::json::array()}};
    for (const auto& p : result.outputs) j["outputs"].push_back(p.generic_string());
    std::cout << j.dump(2) << '\n';
    return;
  }
  print_text(result.summary, "", 0);
  std::cout << "wrote " << result.outputs.size() << " file(s)\n";
}

std::optional<fs::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

fs::path require_out(const Globals& g, const std::string& subcommand) {
  if (g.out.empty()) throw CLI::RequiredError("--out (required by " + subcommand + ")");
  return g.out;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("attn");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("%^%l%$: %v");

  CLI::App app{"Attention-cascade reconstruction and analysis for group-chat logs", "attn"};
  app.set_version_flag("--version", attn::stages::version());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--jobs,-j", g.jobs, "Worker threads inside a stage")->check(CLI::Range(1u, 1024u));
  app.add_option("--out,-o", g.out, "Output directory (synth: corpus file)");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error, off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  app.add_option("--format", g.summary_format, "Summary format on stdout (before the subcommand)")
      ->check(CLI::IsMember({"text", "json"}));

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse an exported log into canonical messages.jsonl");
  std::string ingest_log, ingest_format = "jsonl", ingest_salt, ingest_labels;
  bool ingest_utc = false;
  ingest->add_option("log", ingest_log, "Exported chat log")->required()->check(CLI::ExistingFile);
  ingest->add_option("--format", ingest_format, "Log format")->check(CLI::IsMember({"jsonl", "csv"}));
  ingest->add_flag("--assume-utc", ingest_utc, "Read timestamps without a zone as UTC");
  ingest->add_option("--salt-file", ingest_salt, "Salt for anonymising user_key fields")->check(CLI::ExistingFile);
  ingest->add_option("--labels", ingest_labels, "Group labels CSV; every group must be labeled")
      ->check(CLI::ExistingFile);

  // cascades
  auto* cascades = app.add_subcommand("cascades", "Extract reply trees from canonical messages");
  std::string cascades_messages;
  cascades->add_option("--messages", cascades_messages, "Canonical messages.jsonl")->required()->check(CLI::ExistingFile);

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Per-cascade structural and temporal metrics");
  std::string metrics_cascades, metrics_labels, metrics_falsehood;
  metrics->add_option("--cascades", metrics_cascades, "Cascade dump")->required()->check(CLI::ExistingFile);
  metrics->add_option("--labels", metrics_labels, "Group labels CSV")->required()->check(CLI::ExistingFile);
  metrics->add_option("--falsehood", metrics_falsehood, "Cascade falsehood labels CSV")->check(CLI::ExistingFile);

  // motifs
  auto* motifs = app.add_subcommand("motifs", "Detect communication motifs in user graphs");
  std::string motifs_cascades, motifs_star_loop = "induced", motifs_strategy = "fast";
  int motifs_max_n = 0;
  motifs->add_option("--cascades", motifs_cascades, "Cascade dump")->required()->check(CLI::ExistingFile);
  motifs->add_option("--max-n", motifs_max_n, "Largest template size (0: graph order)")->check(CLI::NonNegativeNumber);
  motifs->add_option("--star-loop", motifs_star_loop, "Star/loop matching")
      ->check(CLI::IsMember({"induced", "edge_subgraph"}));
  motifs->add_option("--strategy", motifs_strategy, "Matcher")->check(CLI::IsMember({"fast", "generic"}));

  // falsehood
  auto* falsehood = app.add_subcommand("falsehood", "Match messages against fact-checks and label cascades");
  std::string f_messages, f_cascades, f_factchecks, f_stop, f_lemmas, f_articles, f_review;
  double f_threshold = 0.5;
  bool f_fetch = false, f_accept = false;
  falsehood->add_option("--messages", f_messages, "Canonical messages.jsonl")->required()->check(CLI::ExistingFile);
  falsehood->add_option("--cascades", f_cascades, "Cascade dump")->required()->check(CLI::ExistingFile);
  falsehood->add_option("--factchecks", f_factchecks, "Fact-check corpus JSONL")->required()->check(CLI::ExistingFile);
  falsehood->add_option("--stopwords", f_stop, "Stopword list")->check(CLI::ExistingFile);
  falsehood->add_option("--lemmas", f_lemmas, "Lemma table (surface<TAB>lemma)")->check(CLI::ExistingFile);
  falsehood->add_option("--articles", f_articles, "URL-text cache JSONL");
  falsehood->add_flag("--fetch", f_fetch, "Download uncached links (otherwise offline)");
  falsehood->add_option("--threshold", f_threshold, "Similarity must exceed this")->check(CLI::Range(0.0, 1.0));
  falsehood->add_option("--review", f_review, "Reviewed candidates JSONL")->check(CLI::ExistingFile);
  falsehood->add_flag("--accept-candidates", f_accept, "Treat every candidate as confirmed");

  // report
  auto* report = app.add_subcommand("report", "Aggregate metrics into CCDFs, profiles, time series and figures");
  std::string r_metrics, r_series, r_labels, r_falsehood, r_motifs, r_bucket = "day";
  report->add_option("--metrics", r_metrics, "Metrics table CSV")->required()->check(CLI::ExistingFile);
  report->add_option("--series", r_series, "Metrics series JSONL (default: beside --metrics)")->check(CLI::ExistingFile);
  report->add_option("--labels", r_labels, "Group labels CSV overriding the table")->check(CLI::ExistingFile);
  report->add_option("--falsehood", r_falsehood, "Falsehood labels CSV overriding the table")->check(CLI::ExistingFile);
  report->add_option("--motifs", r_motifs, "Motif report CSV")->check(CLI::ExistingFile);
  report->add_option("--bucket", r_bucket, "Time-series bucket")->check(CLI::IsMember({"day", "week"}));

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  std::string s_config, s_truth, s_labels, s_factchecks;
  synth->add_option("--config", s_config, "Generator config JSON")->required()->check(CLI::ExistingFile);
  synth->add_option("--truth", s_truth, "Ground-truth JSON output")->required();
  synth->add_option("--labels", s_labels, "Also write group labels CSV here");
  synth->add_option("--factchecks", s_factchecks, "Also write the fact-check corpus here");

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Run every analysis stage in order");
  std::string p_log, p_format = "jsonl", p_salt, p_labels, p_factchecks, p_stop, p_lemmas, p_articles, p_review,
                     p_star_loop = "induced", p_strategy = "fast", p_bucket = "day";
  bool p_utc = false, p_fetch = false, p_accept = false;
  double p_threshold = 0.5;
  int p_max_n = 0;
  pipeline->add_option("log", p_log, "Exported chat log")->required()->check(CLI::ExistingFile);
  pipeline->add_option("--format", p_format, "Log format")->check(CLI::IsMember({"jsonl", "csv"}));
  pipeline->add_flag("--assume-utc", p_utc, "Read timestamps without a zone as UTC");
  pipeline->add_option("--salt-file", p_salt, "Salt for anonymising user_key fields")->check(CLI::ExistingFile);
  pipeline->add_option("--labels", p_labels, "Group labels CSV")->required()->check(CLI::ExistingFile);
  pipeline->add_option("--factchecks", p_factchecks, "Fact-check corpus JSONL")->check(CLI::ExistingFile);
  pipeline->add_option("--stopwords", p_stop, "Stopword list")->check(CLI::ExistingFile);
  pipeline->add_option("--lemmas", p_lemmas, "Lemma table")->check(CLI::ExistingFile);
  pipeline->add_option("--articles", p_articles, "URL-text cache JSONL");
  pipeline->add_flag("--fetch", p_fetch, "Download uncached links");
  pipeline->add_option("--threshold", p_threshold, "Similarity must exceed this")->check(CLI::Range(0.0, 1.0));
  pipeline->add_option("--review", p_review, "Reviewed candidates JSONL")->check(CLI::ExistingFile);
  pipeline->add_flag("--accept-candidates", p_accept, "Treat every candidate as confirmed");
  pipeline->add_option("--max-n", p_max_n, "Largest motif template size")->check(CLI::NonNegativeNumber);
  pipeline->add_option("--star-loop", p_star_loop, "Star/loop matching")
      ->check(CLI::IsMember({"induced", "edge_subgraph"}));
  pipeline->add_option("--strategy", p_strategy, "Motif matcher")->check(CLI::IsMember({"fast", "generic"}));
  pipeline->add_option("--bucket", p_bucket, "Time-series bucket")->check(CLI::IsMember({"day", "week"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  spdlog::set_level(spdlog::level::from_str(g.log_level));
  attn::stages::Common common;
  common.jobs = g.jobs;
  common.warn = [](const std::string& message) { spdlog::warn("{}", message); };

  auto motif_options = [](int max_n, const std::string& star_loop, const std::string& strategy) {
    attn::MotifOptions o;
    o.max_n = max_n;
    o.star_loop = star_loop == "induced" ? attn::StarLoopSemantics::induced : attn::StarLoopSemantics::edge_subgraph;
    o.strategy = strategy == "fast" ? attn::MatchStrategy::fast : attn::MatchStrategy::generic;
    return o;
  };

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    StageResult result;
    if (name == "ingest") {
      result = attn::stages::ingest({ingest_log, attn::parse_log_format(ingest_format), ingest_utc, opt_path(ingest_salt),
                                     opt_path(ingest_labels), require_out(g, name)},
                                    common);
    } else if (name == "cascades") {
      result = attn::stages::cascades({cascades_messages, require_out(g, name)}, common);
    } else if (name == "metrics") {
      result = attn::stages::metrics({metrics_cascades, metrics_labels, opt_path(metrics_falsehood), require_out(g, name)},
                                     common);
    } else if (name == "motifs") {
      result = attn::stages::motifs(
          {motifs_cascades, motif_options(motifs_max_n, motifs_star_loop, motifs_strategy), require_out(g, name)}, common);
    } else if (name == "falsehood") {
      attn::stages::FalsehoodArgs a;
      a.messages = f_messages;
      a.cascades = f_cascades;
      a.factchecks = f_factchecks;
      a.stopwords = opt_path(f_stop);
      a.lemmas = opt_path(f_lemmas);
      a.articles = opt_path(f_articles);
      a.fetch = f_fetch;
      a.threshold = f_threshold;
      a.review = opt_path(f_review);
      a.accept_candidates = f_accept;
      a.out_dir = require_out(g, name);
      result = attn::stages::falsehood(a, common);
    } else if (name == "report") {
      attn::stages::ReportArgs a;
      a.metrics = r_metrics;
      a.series = opt_path(r_series);
      a.labels = opt_path(r_labels);
      a.falsehood = opt_path(r_falsehood);
      a.motifs = opt_path(r_motifs);
      a.bucket = attn::parse_bucket(r_bucket);
      a.out_dir = require_out(g, name);
      result = attn::stages::report(a, common);
    } else if (name == "synth") {
      result = attn::stages::synth({s_config, require_out(g, name), s_truth, opt_path(s_labels), opt_path(s_factchecks)},
                                   common);
    } else {
      attn::stages::PipelineArgs a;
      a.log = p_log;
      a.format = attn::parse_log_format(p_format);
      a.assume_utc = p_utc;
      a.salt_file = opt_path(p_salt);
      a.labels = p_labels;
      a.factchecks = opt_path(p_factchecks);
      a.stopwords = opt_path(p_stop);
      a.lemmas = opt_path(p_lemmas);
      a.articles = opt_path(p_articles);
      a.fetch = p_fetch;
      a.threshold = p_threshold;
      a.review = opt_path(p_review);
      a.accept_candidates = p_accept;
      a.motif_options = motif_options(p_max_n, p_star_loop, p_strategy);
      a.bucket = attn::parse_bucket(p_bucket);
      a.out_dir = require_out(g, name);
      result = attn::stages::pipeline(a, common);
    }
    print_summary(name, result, g);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  } catch (const attn::ConfigError& e) {
    spdlog::error("{}: {}", name, e.what());
    return kUsage;
  } catch (const attn::IoError& e) {
    spdlog::error("{}: {}", name, e.what());
    return kIo;
  } catch (const attn::Error& e) {
    spdlog::error("{}: {}", name, e.what());
    return kData;
  } catch (const std::exception& e) {
    spdlog::error("{}: unexpected failure: {}", name, e.what());
    return kFailure;
  }
}
