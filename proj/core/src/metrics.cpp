#include "attn/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "attn/errors.hpp"
#include "attn/parallel.hpp"

namespace attn {
namespace {

using nlohmann::json;

std::vector<int> parents_of(const Cascade& c) {
  std::vector<int> parent;
  parent.reserve(c.nodes.size());
  for (const auto& n : c.nodes) parent.push_back(n.parent);
  return parent;
}

// Sample of one cascade for one bin, accumulated across its levels.
struct BinAccumulator {
  double sum = 0.0;
  int count = 0;
};

}  // namespace

std::vector<int> breadth_profile(const Cascade& cascade) {
  std::vector<int> breadth(static_cast<std::size_t>(depth(cascade)) + 1, 0);
  for (const auto& n : cascade.nodes) ++breadth[static_cast<std::size_t>(n.depth)];
  return breadth;
}

double structural_virality(std::span<const int> parent) {
  const std::size_t n = parent.size();
  if (n < 2) throw DomainError("structural virality needs at least two nodes, got " + std::to_string(n));
  if (parent[0] != -1) throw DomainError("structural virality: node 0 must be the root");
  for (std::size_t i = 1; i < n; ++i) {
    if (parent[i] < 0 || static_cast<std::size_t>(parent[i]) >= i) {
      throw DomainError("structural virality: parents must precede children");
    }
  }
  // Each edge (i, parent[i]) lies on the path of size[i] * (n - size[i]) pairs.
  std::vector<std::uint64_t> subtree(n, 1);
  std::uint64_t wiener = 0;
  for (std::size_t i = n - 1; i >= 1; --i) {
    wiener += subtree[i] * (n - subtree[i]);
    subtree[static_cast<std::size_t>(parent[i])] += subtree[i];
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return static_cast<double>(wiener) / pairs;
}

double structural_virality(const Cascade& cascade) {
  const auto parent = parents_of(cascade);
  return structural_virality(std::span<const int>(parent));
}

double duration(const Cascade& cascade) { return minutes_between(cascade.start(), cascade.end()); }

CascadeMetrics compute_metrics(const Cascade& c) {
  CascadeMetrics m;
  m.cascade_id = c.cascade_id;
  m.group_id = c.group_id;
  m.n_nodes = static_cast<int>(c.size());
  m.depth = depth(c);
  m.breadth_at = breadth_profile(c);
  m.max_breadth = *std::max_element(m.breadth_at.begin(), m.breadth_at.end());
  m.structural_virality = structural_virality(c);
  m.start = c.start();
  m.end = c.end();
  m.duration_minutes = minutes_between(m.start, m.end);

  const auto levels = static_cast<std::size_t>(m.depth) + 1;
  std::vector<std::unordered_set<std::string_view>> level_users(levels);
  m.time_to_depth.assign(levels, -1.0);
  std::unordered_set<std::string_view> seen;
  m.timeline.reserve(c.size());
  // Nodes are already in (timestamp, seq) order.
  for (const auto& node : c.nodes) {
    const auto d = static_cast<std::size_t>(node.depth);
    level_users[d].insert(node.user_id);
    if (m.time_to_depth[d] < 0.0) m.time_to_depth[d] = minutes_between(m.start, node.timestamp);
    const bool fresh = seen.insert(node.user_id).second;
    m.timeline.push_back({(node.timestamp - m.start).count(), node.depth, fresh});
  }
  m.n_unique_users = static_cast<int>(seen.size());

  std::unordered_set<std::string_view> cumulative;
  m.users_at_depth.reserve(levels);
  m.users_by_depth.reserve(levels);
  for (const auto& users : level_users) {
    m.users_at_depth.push_back(static_cast<int>(users.size()));
    cumulative.insert(users.begin(), users.end());
    m.users_by_depth.push_back(static_cast<int>(cumulative.size()));
  }
  return m;
}

std::vector<CascadeMetrics> compute_all_metrics(std::span<const Cascade> cascades, unsigned jobs) {
  std::vector<CascadeMetrics> out(cascades.size());
  parallel_for(cascades.size(), jobs, [&](std::size_t i) { out[i] = compute_metrics(cascades[i]); });
  return out;
}

std::string_view to_string(ProfileX x) { return x == ProfileX::depth_pct ? "depth_pct" : "time_pct"; }

std::string_view to_string(ProfileY y) {
  switch (y) {
    case ProfileY::breadth: return "breadth";
    case ProfileY::unique_users: return "unique_users";
    case ProfileY::minutes: return "minutes";
    case ProfileY::depth: return "depth";
  }
  return "unknown";
}

std::vector<ProfileBin> normalized_profile(std::span<const CascadeMetrics> cascades, ProfileX x, ProfileY y) {
  std::array<std::vector<double>, kProfileBins> samples;

  for (const auto& m : cascades) {
    std::array<BinAccumulator, kProfileBins> acc{};
    if (x == ProfileX::depth_pct) {
      if (m.depth <= 0) throw DomainError("normalized profile: cascade '" + m.cascade_id + "' has depth 0");
      for (int d = 0; d <= m.depth; ++d) {
        const int bin = (40 * d + m.depth) / (2 * m.depth);  // round(20 d / depth), halves up
        const auto level = static_cast<std::size_t>(d);
        double value = 0.0;
        switch (y) {
          case ProfileY::breadth: value = m.breadth_at.at(level); break;
          case ProfileY::unique_users: value = m.users_by_depth.at(level); break;
          case ProfileY::minutes: value = m.time_to_depth.at(level); break;
          case ProfileY::depth: value = d; break;
        }
        acc[static_cast<std::size_t>(bin)].sum += value;
        ++acc[static_cast<std::size_t>(bin)].count;
      }
    } else {
      const std::int64_t total = (m.end - m.start).count();
      if (total <= 0) throw DomainError("normalized profile: cascade '" + m.cascade_id + "' has zero duration");
      std::size_t prefix = 0;
      int max_depth = 0;
      int users = 0;
      int max_breadth = 0;
      std::vector<int> breadth(static_cast<std::size_t>(m.depth) + 1, 0);
      for (int bin = 0; bin < kProfileBins; ++bin) {
        // Messages with offset <= bin/20 of the duration.
        while (prefix < m.timeline.size() && m.timeline[prefix].offset_us * (kProfileBins - 1) <= bin * total) {
          const auto& p = m.timeline[prefix++];
          max_depth = std::max(max_depth, p.depth);
          if (p.new_user) ++users;
          max_breadth = std::max(max_breadth, ++breadth[static_cast<std::size_t>(p.depth)]);
        }
        double value = 0.0;
        switch (y) {
          case ProfileY::breadth: value = max_breadth; break;
          case ProfileY::unique_users: value = users; break;
          case ProfileY::minutes: value = m.duration_minutes * bin / (kProfileBins - 1); break;
          case ProfileY::depth: value = max_depth; break;
        }
        acc[static_cast<std::size_t>(bin)] = {value, 1};
      }
    }
    for (std::size_t b = 0; b < acc.size(); ++b) {
      if (acc[b].count > 0) samples[b].push_back(acc[b].sum / acc[b].count);
    }
  }

  std::vector<ProfileBin> bins;
  for (std::size_t b = 0; b < samples.size(); ++b) {
    const auto& s = samples[b];
    if (s.empty()) continue;
    ProfileBin bin;
    bin.bin_pct = 5.0 * static_cast<double>(b);
    bin.n = s.size();
    double sum = 0.0;
    for (double v : s) sum += v;
    bin.mean = sum / static_cast<double>(s.size());
    if (s.size() > 1) {
      double ss = 0.0;
      for (double v : s) ss += (v - bin.mean) * (v - bin.mean);
      const double sd = std::sqrt(ss / static_cast<double>(s.size() - 1));
      bin.stderr_mean = sd / std::sqrt(static_cast<double>(s.size()));
    }
    bins.push_back(bin);
  }
  return bins;
}

std::string to_jsonl(const CascadeMetrics& m) {
  json obj = json::object();
  obj["cascade_id"] = m.cascade_id;
  obj["group_id"] = m.group_id;
  obj["start"] = format_timestamp(m.start);
  obj["end"] = format_timestamp(m.end);
  obj["n_nodes"] = m.n_nodes;
  obj["depth"] = m.depth;
  obj["max_breadth"] = m.max_breadth;
  obj["breadth_at"] = m.breadth_at;
  obj["structural_virality"] = m.structural_virality;
  obj["duration_minutes"] = m.duration_minutes;
  obj["n_unique_users"] = m.n_unique_users;
  obj["users_by_depth"] = m.users_by_depth;
  obj["users_at_depth"] = m.users_at_depth;
  obj["time_to_depth"] = m.time_to_depth;
  json timeline = json::array();
  for (const auto& p : m.timeline) timeline.push_back(json::array({p.offset_us, p.depth, p.new_user ? 1 : 0}));
  obj["timeline"] = std::move(timeline);
  return obj.dump();
}

void write_metrics_series(std::ostream& out, std::span<const CascadeMetrics> metrics) {
  for (const auto& m : metrics) out << to_jsonl(m) << '\n';
}

std::vector<CascadeMetrics> read_metrics_series(std::istream& in, std::string_view source) {
  std::vector<CascadeMetrics> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json obj = json::parse(line);
      CascadeMetrics m;
      m.cascade_id = obj.at("cascade_id").get<std::string>();
      m.group_id = obj.at("group_id").get<std::string>();
      m.start = parse_timestamp(obj.at("start").get<std::string>(), false);
      m.end = parse_timestamp(obj.at("end").get<std::string>(), false);
      m.n_nodes = obj.at("n_nodes").get<int>();
      m.depth = obj.at("depth").get<int>();
      m.max_breadth = obj.at("max_breadth").get<int>();
      m.breadth_at = obj.at("breadth_at").get<std::vector<int>>();
      m.structural_virality = obj.at("structural_virality").get<double>();
      m.duration_minutes = obj.at("duration_minutes").get<double>();
      m.n_unique_users = obj.at("n_unique_users").get<int>();
      m.users_by_depth = obj.at("users_by_depth").get<std::vector<int>>();
      m.users_at_depth = obj.at("users_at_depth").get<std::vector<int>>();
      m.time_to_depth = obj.at("time_to_depth").get<std::vector<double>>();
      for (const auto& p : obj.at("timeline")) {
        m.timeline.push_back({p.at(0).get<std::int64_t>(), p.at(1).get<int>(), p.at(2).get<int>() != 0});
      }
      const auto levels = static_cast<std::size_t>(m.depth) + 1;
      if (m.breadth_at.size() != levels || m.users_by_depth.size() != levels || m.time_to_depth.size() != levels) {
        throw DataError("per-depth vectors do not match depth " + std::to_string(m.depth));
      }
      out.push_back(std::move(m));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": malformed series record: " + e.what());
    } catch (const DataError& e) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace attn
