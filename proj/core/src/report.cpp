#include "attn/report.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "attn/csv.hpp"
#include "attn/errors.hpp"
#include "attn/io.hpp"
#include "attn/svg.hpp"

namespace attn {
namespace {

using nlohmann::json;

struct Attribute {
  std::string_view name;
  double (*get)(const CascadeMetrics&);
};

constexpr Attribute kAttributes[] = {
    {"depth", [](const CascadeMetrics& m) { return static_cast<double>(m.depth); }},
    {"max_breadth", [](const CascadeMetrics& m) { return static_cast<double>(m.max_breadth); }},
    {"structural_virality", [](const CascadeMetrics& m) { return m.structural_virality; }},
    {"n_nodes", [](const CascadeMetrics& m) { return static_cast<double>(m.n_nodes); }},
    {"duration_minutes", [](const CascadeMetrics& m) { return m.duration_minutes; }},
    {"n_unique_users", [](const CascadeMetrics& m) { return static_cast<double>(m.n_unique_users); }},
};

constexpr std::pair<ProfileX, ProfileY> kProfiles[] = {
    {ProfileX::depth_pct, ProfileY::breadth},      {ProfileX::depth_pct, ProfileY::unique_users},
    {ProfileX::depth_pct, ProfileY::minutes},      {ProfileX::time_pct, ProfileY::depth},
    {ProfileX::time_pct, ProfileY::unique_users},  {ProfileX::time_pct, ProfileY::breadth},
};

std::vector<std::string> all_classes() {
  std::vector<std::string> keys;
  for (auto k : kTopicClasses) keys.emplace_back(k);
  for (auto k : kSubClasses) keys.emplace_back(k);
  return keys;
}


std::chrono::sys_days bucket_of(Timestamp t, Bucket bucket) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  if (bucket == Bucket::day) return day;
  const unsigned iso = std::chrono::weekday{day}.iso_encoding();  // Monday = 1
  return day - std::chrono::days{iso - 1};
}

std::size_t zero_duration_count(std::span<const ReportRow> rows) {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ReportRow& r) { return r.metrics.end == r.metrics.start; }));
}

class Writer {
 public:
  explicit Writer(std::filesystem::path root) : root_(std::move(root)) {}

  void file(const std::filesystem::path& relative, const std::string& content) {
    auto out = open_output(root_ / relative);
    out << content;
    if (!out) throw IoError("failed writing '" + (root_ / relative).string() + "'");
    result.written.push_back(relative);
  }

  ReportResult result;

 private:
  std::filesystem::path root_;
};

}  // namespace

std::string topic_class(const ReportRow& row) { return std::string(to_string(row.category)); }

std::string sub_class(const ReportRow& row) {
  return std::string(to_string(row.category)) + "__" + std::string(to_string(row.falsehood));
}

CCDFSeries ccdf(std::span<const double> values) {
  if (values.empty()) throw DomainError("CCDF of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  CCDFSeries s;
  s.n = sorted.size();
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    s.points.emplace_back(sorted[i], static_cast<double>(sorted.size() - i) / n);
    i = j;
  }
  return s;
}

std::string_view to_string(Bucket bucket) { return bucket == Bucket::day ? "day" : "week"; }

Bucket parse_bucket(std::string_view text) {
  if (text == "day") return Bucket::day;
  if (text == "week") return Bucket::week;
  throw ConfigError("unknown bucket '" + std::string(text) + "' (expected day or week)");
}

std::map<std::string, std::vector<BucketCount>> daily_counts(std::span<const ReportRow> rows, Bucket bucket) {
  std::map<std::string, std::vector<BucketCount>> series;
  for (const auto& key : all_classes()) series[key];
  if (rows.empty()) return series;
  auto first = bucket_of(rows.front().metrics.start, bucket);
  auto last = first;
  for (const auto& r : rows) {
    const auto b = bucket_of(r.metrics.start, bucket);
    first = std::min(first, b);
    last = std::max(last, b);
  }
  const auto step = std::chrono::days{bucket == Bucket::day ? 1 : 7};
  const auto slots = static_cast<std::size_t>((last - first) / step) + 1;
  for (auto& [key, counts] : series) {
    counts.reserve(slots);
    for (std::size_t i = 0; i < slots; ++i) counts.push_back({first + step * static_cast<int>(i), 0});
  }
  for (const auto& r : rows) {
    const auto slot = static_cast<std::size_t>((bucket_of(r.metrics.start, bucket) - first) / step);
    ++series[topic_class(r)][slot].count;
    ++series[sub_class(r)][slot].count;
  }
  return series;
}

OverlapStats overlap_stats(const std::map<std::string, std::vector<Interval>>& intervals_by_group) {
  OverlapStats stats;
  for (const auto& [group, intervals] : intervals_by_group) {
    OverlapCount count;
    const std::size_t n = intervals.size();
    count.pairs = n * (n - (n > 0 ? 1 : 0)) / 2;
    std::vector<Timestamp> ends;
    ends.reserve(n);
    for (const auto& iv : intervals) ends.push_back(iv.end);
    std::sort(ends.begin(), ends.end());
    // A pair is disjoint iff one interval ends strictly before the other
    // starts; at most one orientation can hold, so each pair counts once.
    for (const auto& iv : intervals) {
      count.disjoint_pairs += static_cast<std::size_t>(std::lower_bound(ends.begin(), ends.end(), iv.start) - ends.begin());
    }
    stats.corpus.pairs += count.pairs;
    stats.corpus.disjoint_pairs += count.disjoint_pairs;
    stats.groups.emplace(group, count);
  }
  return stats;
}

OverlapStats overlap_stats(std::span<const ReportRow> rows) {
  std::map<std::string, std::vector<Interval>> by_group;
  for (const auto& r : rows) by_group[r.metrics.group_id].push_back({r.metrics.start, r.metrics.end});
  return overlap_stats(by_group);
}

void write_metrics_table(std::ostream& out, std::span<const ReportRow> rows) {
  write_csv_row(out, {"cascade_id", "group_id", "category", "falsehood", "n_nodes", "depth", "max_breadth",
                      "structural_virality", "duration_minutes", "n_unique_users"});
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    write_csv_row(out, {m.cascade_id, m.group_id, std::string(to_string(r.category)),
                        std::string(to_string(r.falsehood)), std::to_string(m.n_nodes), std::to_string(m.depth),
                        std::to_string(m.max_breadth), format_double(m.structural_virality),
                        format_double(m.duration_minutes), std::to_string(m.n_unique_users)});
  }
}

std::vector<MetricsTableRow> read_metrics_table(std::istream& in, std::string_view source) {
  CsvReader reader(in);
  std::vector<std::string> f;
  std::vector<MetricsTableRow> rows;
  if (!reader.next(f)) return rows;
  const CsvHeader h(f);
  const auto c_id = h.require("cascade_id", source), c_group = h.require("group_id", source),
             c_cat = h.require("category", source), c_false = h.require("falsehood", source),
             c_nodes = h.require("n_nodes", source), c_depth = h.require("depth", source),
             c_breadth = h.require("max_breadth", source), c_vir = h.require("structural_virality", source),
             c_dur = h.require("duration_minutes", source), c_users = h.require("n_unique_users", source);
  while (reader.next(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(reader.line());
    if (f.size() != h.size()) throw DataError(where + ": wrong number of fields");
    try {
      MetricsTableRow r;
      r.cascade_id = f[c_id];
      r.group_id = f[c_group];
      const auto cat = parse_group_category(f[c_cat]);
      const auto fl = parse_cascade_falsehood(f[c_false]);
      if (!cat || !fl) throw DataError("bad category/falsehood value");
      r.category = *cat;
      r.falsehood = *fl;
      r.n_nodes = std::stoi(f[c_nodes]);
      r.depth = std::stoi(f[c_depth]);
      r.max_breadth = std::stoi(f[c_breadth]);
      r.structural_virality = std::stod(f[c_vir]);
      r.duration_minutes = std::stod(f[c_dur]);
      r.n_unique_users = std::stoi(f[c_users]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw DataError(where + ": bad numeric field: " + e.what());
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return rows;
}

ReportResult write_report(const ReportInputs& inputs, const std::filesystem::path& out_dir,
                          const ReportOptions& options) {
  ensure_directory(out_dir);
  Writer w(out_dir);
  const auto& rows = inputs.rows;
  const auto classes = all_classes();

  std::map<std::string, std::vector<const ReportRow*>> members;
  for (const auto& key : classes) members[key];
  for (const auto& r : rows) {
    members[topic_class(r)].push_back(&r);
    members[sub_class(r)].push_back(&r);
  }

  for (const auto& key : classes) {
    if (members[key].empty()) w.result.notices.push_back("class " + key + " is empty; its ccdf and profile CSVs are omitted");
  }
  if (zero_duration_count(rows) > 0) {
    w.result.notices.push_back(std::to_string(zero_duration_count(rows)) +
                               " zero-duration cascade(s) left out of time_pct profiles");
  }

  // CCDFs: one CSV per attribute and class, one figure per attribute and row.
  for (const auto& attr : kAttributes) {
    svg::LinePlot upper{"CCDF of " + std::string(attr.name) + " by topic", std::string(attr.name), "P(X >= x)", true,
                        true, {}};
    svg::LinePlot lower{"CCDF of " + std::string(attr.name) + " by topic and falsehood", std::string(attr.name),
                        "P(X >= x)", true, true, {}};
    for (const auto& key : classes) {
      const auto& rs = members[key];
      if (rs.empty()) continue;
      std::vector<double> values;
      values.reserve(rs.size());
      for (const auto* r : rs) values.push_back(attr.get(r->metrics));
      auto series = ccdf(values);
      std::ostringstream csv;
      write_csv_row(csv, {"x", "p_ge", "n"});
      for (const auto& [x, p] : series.points) write_csv_row(csv, {format_double(x), format_double(p), std::to_string(series.n)});
      w.file(std::filesystem::path("ccdf") / (std::string(attr.name) + "__" + key + ".csv"), csv.str());
      const bool topic = key.find("__") == std::string::npos;
      (topic ? upper : lower).series.push_back({key, std::move(series.points), {}, true});
    }
    for (auto* plot : {&upper, &lower}) {
      if (plot->series.empty()) continue;
      const auto name = std::string("ccdf_") + std::string(attr.name) + (plot == &upper ? "_topic" : "_class") + ".svg";
      w.file(std::filesystem::path("figures") / name, svg::render(*plot));
    }
  }

  // Normalised profiles.
  for (const auto& [x, y] : kProfiles) {
    const std::string stem = std::string(to_string(x)) + "__" + std::string(to_string(y));
    svg::LinePlot plot{std::string(to_string(y)) + " vs " + std::string(to_string(x)), std::string(to_string(x)),
                       std::string(to_string(y)), false, false, {}};
    for (const auto& key : classes) {
      std::vector<CascadeMetrics> ms;
      for (const auto* r : members[key]) {
        if (x == ProfileX::time_pct && r->metrics.end == r->metrics.start) continue;
        ms.push_back(r->metrics);
      }
      if (ms.empty()) continue;
      const auto bins = normalized_profile(ms, x, y);
      std::ostringstream csv;
      write_csv_row(csv, {"bin_pct", "mean", "stderr", "n"});
      svg::Series series{key, {}, {}, false};
      for (const auto& b : bins) {
        write_csv_row(csv, {format_double(b.bin_pct), format_double(b.mean), format_double(b.stderr_mean),
                            std::to_string(b.n)});
        series.points.emplace_back(b.bin_pct, b.mean);
        series.errors.push_back(b.stderr_mean);
      }
      w.file(std::filesystem::path("profiles") / (stem + "__" + key + ".csv"), csv.str());
      plot.series.push_back(std::move(series));
    }
    if (!plot.series.empty()) w.file(std::filesystem::path("figures") / ("profile_" + stem + ".svg"), svg::render(plot));
  }

  // Time series.
  const auto counts = daily_counts(rows, options.bucket);
  svg::LinePlot timeline{"Cascades per " + std::string(to_string(options.bucket)), "bucket index", "cascades", false,
                         false, {}};
  for (const auto& [key, series] : counts) {
    std::ostringstream csv;
    write_csv_row(csv, {"date", "count"});
    svg::Series s{key, {}, {}, false};
    for (std::size_t i = 0; i < series.size(); ++i) {
      write_csv_row(csv, {format_date(series[i].start), std::to_string(series[i].count)});
      s.points.emplace_back(static_cast<double>(i), static_cast<double>(series[i].count));
    }
    w.file(std::filesystem::path("timeseries") / (std::string(to_string(options.bucket)) + "__" + key + ".csv"),
           csv.str());
    timeline.series.push_back(std::move(s));
  }
  if (!rows.empty()) w.file(std::filesystem::path("figures") / "cascades_over_time.svg", svg::render(timeline));

  const auto overlap = overlap_stats(rows);
  {
    std::ostringstream csv;
    write_csv_row(csv, {"group_id", "pairs", "disjoint_pairs", "fraction"});
    for (const auto& [group, c] : overlap.groups) {
      write_csv_row(csv, {group, std::to_string(c.pairs), std::to_string(c.disjoint_pairs), format_double(c.fraction())});
    }
    w.file(std::filesystem::path("timeseries") / "overlap_by_group.csv", csv.str());
  }

  // Motif frequencies.
  json motif_summary = nullptr;
  if (inputs.motifs) {
    std::map<std::string, const ReportRow*> by_id;
    for (const auto& r : rows) by_id.emplace(r.metrics.cascade_id, &r);
    std::vector<MotifReport> reports;
    std::vector<std::string> keys;
    for (const auto& m : *inputs.motifs) {
      const auto it = by_id.find(m.cascade_id);
      if (it == by_id.end()) throw DataError("motif report for unknown cascade '" + m.cascade_id + "'");
      reports.push_back(m);
      keys.push_back(topic_class(*it->second));
      reports.push_back(m);
      keys.push_back(sub_class(*it->second));
    }
    const auto tallies = motif_frequencies(reports, keys);
    std::ostringstream csv;
    write_csv_row(csv, {"class", "motif", "present", "exact", "cascades", "frequency"});
    std::vector<svg::BarGroup> bars;
    std::vector<std::string> names;
    for (const Motif m : kAllMotifs) names.emplace_back(to_string(m));
    motif_summary = json::object();
    for (const auto& [key, t] : tallies) {
      const auto freq = t.frequencies();
      svg::BarGroup bar{key, {}};
      for (std::size_t i = 0; i < kAllMotifs.size(); ++i) {
        write_csv_row(csv, {key, names[i], std::to_string(t.present[i]), std::to_string(t.exact[i]),
                            std::to_string(t.cascades), format_double(freq[i])});
        bar.values.push_back(freq[i]);
        motif_summary[key][names[i]] = freq[i];
      }
      bars.push_back(std::move(bar));
    }
    for (const auto& key : classes) {
      if (!members[key].empty() && !tallies.contains(key)) {
        w.result.notices.push_back("class " + key + " has no motif presences; omitted from motifs/");
      }
    }
    w.file(std::filesystem::path("motifs") / "frequencies.csv", csv.str());
    if (!bars.empty()) w.file(std::filesystem::path("figures") / "motif_frequencies.svg", svg::render_bars("Motif relative frequency", names, bars));
  }

  json summary = json::object();
  summary["cascades"] = rows.size();
  std::size_t messages = 0;
  for (const auto& r : rows) messages += static_cast<std::size_t>(r.metrics.n_nodes);
  summary["messages_in_cascades"] = messages;
  json by_class = json::object();
  for (const auto& key : classes) by_class[key] = members[key].size();
  summary["by_class"] = by_class;
  summary["falsehood_cascades"] = members["political__falsehood"].size() + members["non_political__falsehood"].size();
  summary["unclassified_cascades"] =
      members["political__unclassified"].size() + members["non_political__unclassified"].size();
  summary["overlap"] = {{"pairs", overlap.corpus.pairs},
                        {"disjoint_pairs", overlap.corpus.disjoint_pairs},
                        {"disjoint_fraction", overlap.corpus.fraction()}};
  summary["zero_duration_cascades_excluded_from_time_profiles"] = zero_duration_count(rows);
  summary["bucket"] = to_string(options.bucket);
  summary["motif_frequencies"] = motif_summary;
  summary["notices"] = w.result.notices;
  w.file("summary.json", summary.dump(2) + "\n");
  return std::move(w.result);
}

}  // namespace attn
