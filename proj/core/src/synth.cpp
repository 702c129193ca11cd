#include "attn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "attn/cascade.hpp"
#include "attn/errors.hpp"
#include "attn/oracle.hpp"

namespace attn {
namespace {

using nlohmann::json;

// Platform-independent draws on top of mt19937_64, whose output sequence
// is fixed by the standard (the standard distributions are not).
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi], rejection-sampled to avoid modulo bias.
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return lo + static_cast<std::int64_t>(rng_());
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x;
    do x = rng_();
    while (x >= limit);
    return lo + static_cast<std::int64_t>(x % range);
  }

  double exponential(double mean) { return -mean * std::log1p(-unit()); }

  int count(const CountDistribution& d) {
    switch (d.kind) {
      case CountDistribution::Kind::fixed: return d.value;
      case CountDistribution::Kind::uniform: return static_cast<int>(integer(d.min, d.max));
      case CountDistribution::Kind::poisson: {
        const double limit = std::exp(-d.mean);
        int k = 0;
        for (double p = unit(); p > limit && k < d.max; p *= unit()) ++k;
        return k;
      }
      case CountDistribution::Kind::weights: {
        double total = 0;
        for (double w : d.weights) total += w;
        double x = unit() * total;
        for (std::size_t k = 0; k < d.weights.size(); ++k) {
          if (x < d.weights[k]) return static_cast<int>(k);
          x -= d.weights[k];
        }
        for (std::size_t k = d.weights.size(); k-- > 0;) {
          if (d.weights[k] > 0) return static_cast<int>(k);
        }
        return 0;
      }
    }
    return 0;
  }

 private:
  std::mt19937_64 rng_;
};

// Pronounceable, stopword-free pseudo-words: three consonant-vowel syllables.
std::string word(std::size_t index) {
  static constexpr std::string_view consonants = "bdfgklmnprstvz";
  static constexpr std::string_view vowels = "aeiou";
  constexpr std::size_t syllables = consonants.size() * vowels.size();
  std::string w;
  for (int i = 0; i < 3; ++i) {
    const std::size_t s = index % syllables;
    index /= syllables;
    w += consonants[s / vowels.size()];
    w += vowels[s % vowels.size()];
  }
  if (index > 0) w += std::to_string(index);
  return w;
}

constexpr std::size_t kNoiseVocabulary = 5000;
// Fact-check tokens live in their own range, so unplanted text never shares
// a lemma with any fact-check.
constexpr std::size_t kFactcheckVocabularyBase = 100000;

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::string two_digits(int value, int width) {
  auto s = std::to_string(value);
  if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError("synth config: " + message);
}

int get_int(const json& j, const char* field, int fallback) {
  if (!j.contains(field)) return fallback;
  require(j[field].is_number_integer(), std::string(field) + " must be an integer");
  return j[field].get<int>();
}

double get_real(const json& j, const char* field, double fallback) {
  if (!j.contains(field)) return fallback;
  require(j[field].is_number(), std::string(field) + " must be a number");
  return j[field].get<double>();
}

json distribution_json(const CountDistribution& d) {
  switch (d.kind) {
    case CountDistribution::Kind::fixed: return {{"fixed", d.value}};
    case CountDistribution::Kind::uniform: return {{"uniform", {d.min, d.max}}};
    case CountDistribution::Kind::poisson: return {{"poisson", d.mean}, {"max", d.max}};
    case CountDistribution::Kind::weights: return {{"weights", d.weights}};
  }
  return nullptr;
}

struct Node {
  int parent = -1;
  int depth = 0;
  Timestamp time{};
  int user = 0;
  std::string text;
  std::optional<int> planted_factcheck;
};

}  // namespace

double CountDistribution::expected() const {
  switch (kind) {
    case Kind::fixed: return value;
    case Kind::uniform: return (min + max) / 2.0;
    case Kind::poisson: return mean;
    case Kind::weights: {
      double total = 0, sum = 0;
      for (std::size_t k = 0; k < weights.size(); ++k) {
        total += weights[k];
        sum += weights[k] * static_cast<double>(k);
      }
      return total > 0 ? sum / total : 0.0;
    }
  }
  return 0.0;
}

CountDistribution parse_count_distribution(const json& j, const std::string& field) {
  CountDistribution d;
  if (j.is_number_integer()) {
    d.value = j.get<int>();
    require(d.value >= 0, field + " must be non-negative");
    return d;
  }
  require(j.is_object() && !j.empty(), field + " must be an integer or a distribution object");
  if (j.contains("fixed")) {
    require(j.size() == 1 && j["fixed"].is_number_integer() && j["fixed"].get<int>() >= 0,
            field + ".fixed must be a non-negative integer");
    d.value = j["fixed"].get<int>();
  } else if (j.contains("uniform")) {
    const auto& u = j["uniform"];
    require(j.size() == 1 && u.is_array() && u.size() == 2 && u[0].is_number_integer() && u[1].is_number_integer(),
            field + ".uniform must be [min, max]");
    d.kind = CountDistribution::Kind::uniform;
    d.min = u[0].get<int>();
    d.max = u[1].get<int>();
    require(d.min >= 0 && d.min <= d.max, field + ".uniform needs 0 <= min <= max");
  } else if (j.contains("poisson")) {
    require(j.size() == 2 && j.contains("max"), field + ".poisson needs a declared max");
    d.kind = CountDistribution::Kind::poisson;
    require(j["poisson"].is_number() && j["max"].is_number_integer(), field + ".poisson/max must be numbers");
    d.mean = j["poisson"].get<double>();
    d.max = j["max"].get<int>();
    require(d.mean >= 0 && d.mean <= 50 && d.max >= 0, field + ".poisson needs 0 <= mean <= 50 and max >= 0");
  } else if (j.contains("weights")) {
    require(j.size() == 1 && j["weights"].is_array() && !j["weights"].empty(), field + ".weights must be a list");
    d.kind = CountDistribution::Kind::weights;
    double total = 0;
    for (const auto& w : j["weights"]) {
      require(w.is_number() && w.get<double>() >= 0, field + ".weights must be non-negative numbers");
      d.weights.push_back(w.get<double>());
      total += d.weights.back();
    }
    require(total > 0, field + ".weights must not all be zero");
  } else {
    require(false, field + ": unknown distribution kind");
  }
  return d;
}

SynthConfig parse_synth_config(const json& j) {
  static const std::set<std::string> known = {
      "seed",      "n_groups",         "political_fraction", "cascades_per_group", "offspring",
      "max_depth", "max_nodes",        "delay_mean_minutes", "n_users",            "self_reply_prob",
      "planted_falsehood_rate",        "noise_messages",     "span_days",          "start",
      "n_factchecks", "factcheck_tokens", "message_tokens",  "motif_truth_max_vertices"};
  require(j.is_object(), "top level must be an object");
  for (const auto& [key, value] : j.items()) require(known.contains(key), "unknown field '" + key + "'");
  SynthConfig c;
  if (j.contains("seed")) {
    require(j["seed"].is_number_unsigned() || (j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0),
            "seed must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  c.n_groups = get_int(j, "n_groups", c.n_groups);
  c.political_fraction = get_real(j, "political_fraction", c.political_fraction);
  if (j.contains("cascades_per_group")) c.cascades_per_group = parse_count_distribution(j["cascades_per_group"], "cascades_per_group");
  if (j.contains("offspring")) c.offspring = parse_count_distribution(j["offspring"], "offspring");
  c.max_depth = get_int(j, "max_depth", c.max_depth);
  c.max_nodes = get_int(j, "max_nodes", c.max_nodes);
  c.delay_mean_minutes = get_real(j, "delay_mean_minutes", c.delay_mean_minutes);
  c.n_users = get_int(j, "n_users", c.n_users);
  c.self_reply_prob = get_real(j, "self_reply_prob", c.self_reply_prob);
  c.planted_falsehood_rate = get_real(j, "planted_falsehood_rate", c.planted_falsehood_rate);
  c.noise_messages = get_int(j, "noise_messages", c.noise_messages);
  c.span_days = get_int(j, "span_days", c.span_days);
  if (j.contains("start")) {
    require(j["start"].is_string(), "start must be a timestamp string");
    c.start = j["start"].get<std::string>();
  }
  c.n_factchecks = get_int(j, "n_factchecks", c.n_factchecks);
  c.factcheck_tokens = get_int(j, "factcheck_tokens", c.factcheck_tokens);
  c.message_tokens = get_int(j, "message_tokens", c.message_tokens);
  c.motif_truth_max_vertices = get_int(j, "motif_truth_max_vertices", c.motif_truth_max_vertices);

  require(c.n_groups >= 1 && c.n_groups <= 9999, "n_groups must be in [1, 9999]");
  require(c.political_fraction >= 0 && c.political_fraction <= 1, "political_fraction must be in [0, 1]");
  require(c.self_reply_prob >= 0 && c.self_reply_prob <= 1, "self_reply_prob must be in [0, 1]");
  require(c.planted_falsehood_rate >= 0 && c.planted_falsehood_rate <= 1, "planted_falsehood_rate must be in [0, 1]");
  require(c.max_depth >= 0, "max_depth must be non-negative");
  require(c.max_nodes >= 1, "max_nodes must be positive");
  require(c.delay_mean_minutes > 0, "delay_mean_minutes must be positive");
  require(c.n_users >= 1, "n_users must be positive");
  require(c.n_users >= 2 || c.self_reply_prob == 1.0 || c.offspring.expected() == 0,
          "n_users = 1 requires self_reply_prob = 1");
  require(c.noise_messages >= 0, "noise_messages must be non-negative");
  require(c.span_days >= 1, "span_days must be positive");
  require(c.n_factchecks >= 0, "n_factchecks must be non-negative");
  require(c.planted_falsehood_rate == 0 || c.n_factchecks >= 1, "planting falsehoods needs n_factchecks >= 1");
  require(c.factcheck_tokens >= 5, "factcheck_tokens must be at least 5");
  require(c.message_tokens >= 1, "message_tokens must be positive");
  require(c.motif_truth_max_vertices >= 0 && c.motif_truth_max_vertices <= 8,
          "motif_truth_max_vertices must be in [0, 8]");
  try {
    parse_timestamp(c.start, false);
  } catch (const DataError& e) {
    require(false, std::string("start: ") + e.what());
  }
  return c;
}

json to_json(const SynthConfig& c) {
  return {{"seed", c.seed},
          {"n_groups", c.n_groups},
          {"political_fraction", c.political_fraction},
          {"cascades_per_group", distribution_json(c.cascades_per_group)},
          {"offspring", distribution_json(c.offspring)},
          {"max_depth", c.max_depth},
          {"max_nodes", c.max_nodes},
          {"delay_mean_minutes", c.delay_mean_minutes},
          {"n_users", c.n_users},
          {"self_reply_prob", c.self_reply_prob},
          {"planted_falsehood_rate", c.planted_falsehood_rate},
          {"noise_messages", c.noise_messages},
          {"span_days", c.span_days},
          {"start", c.start},
          {"n_factchecks", c.n_factchecks},
          {"factcheck_tokens", c.factcheck_tokens},
          {"message_tokens", c.message_tokens},
          {"motif_truth_max_vertices", c.motif_truth_max_vertices}};
}

SynthOutput generate(const SynthConfig& config) {
  Draw draw(config.seed);
  SynthOutput out;
  const Timestamp start = parse_timestamp(config.start, false);
  const std::int64_t span_seconds = static_cast<std::int64_t>(config.span_days) * 86400;

  auto noise_text = [&](int tokens) {
    std::vector<std::string> words;
    for (int i = 0; i < tokens; ++i) words.push_back(word(static_cast<std::size_t>(draw.integer(0, kNoiseVocabulary - 1))));
    return join(words);
  };

  std::vector<std::vector<std::string>> fc_tokens(static_cast<std::size_t>(config.n_factchecks));
  for (int f = 0; f < config.n_factchecks; ++f) {
    for (int k = 0; k < config.factcheck_tokens; ++k) {
      fc_tokens[static_cast<std::size_t>(f)].push_back(
          word(kFactcheckVocabularyBase + static_cast<std::size_t>(f * config.factcheck_tokens + k)));
    }
    out.factchecks.push_back({"fc" + two_digits(f, 4), "synthetic", join(fc_tokens[static_cast<std::size_t>(f)])});
  }
  // 80 % of the fact-check's tokens plus unrelated filler to the same length.
  const int kept = config.factcheck_tokens * 4 / 5;
  auto planted_text = [&](int f) {
    auto tokens = fc_tokens[static_cast<std::size_t>(f)];
    for (std::size_t i = tokens.size(); i > 1; --i) {
      std::swap(tokens[i - 1], tokens[static_cast<std::size_t>(draw.integer(0, static_cast<std::int64_t>(i) - 1))]);
    }
    tokens.resize(static_cast<std::size_t>(kept));
    for (int i = kept; i < config.factcheck_tokens; ++i) {
      tokens.push_back(word(static_cast<std::size_t>(draw.integer(0, kNoiseVocabulary - 1))));
    }
    return join(tokens);
  };

  json truth_cascades = json::array();
  json truth_planted = json::array();
  json truth_groups = json::array();
  const auto delay_us = [&]() {
    const double minutes = draw.exponential(config.delay_mean_minutes);
    const auto seconds = std::max<std::int64_t>(1, static_cast<std::int64_t>(minutes * 60.0));
    return std::chrono::seconds{seconds};
  };

  for (int g = 0; g < config.n_groups; ++g) {
    const std::string group_id = "g" + two_digits(g, 4);
    const auto category = draw.unit() < config.political_fraction ? GroupCategory::political : GroupCategory::non_political;
    out.labels.push_back({group_id, category});
    truth_groups.push_back({{"group_id", group_id}, {"category", to_string(category)}});
    auto user_name = [&](int u) { return group_id + "-u" + two_digits(u, 4); };

    struct Pending {
      Message message;
      std::size_t order;
    };
    std::vector<Pending> pending;
    auto emit = [&](Message m) { pending.push_back({std::move(m), pending.size()}); };

    const int trees = draw.count(config.cascades_per_group);
    for (int t = 0; t < trees; ++t) {
      std::vector<Node> nodes(1);
      nodes[0].time = start + std::chrono::seconds{draw.integer(0, span_seconds - 1)};
      nodes[0].user = static_cast<int>(draw.integer(0, config.n_users - 1));
      bool capped = false;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (config.max_depth > 0 && nodes[i].depth >= config.max_depth) continue;
        const int children = draw.count(config.offspring);
        for (int c = 0; c < children; ++c) {
          if (static_cast<int>(nodes.size()) >= config.max_nodes) {
            capped = true;
            break;
          }
          Node child;
          child.parent = static_cast<int>(i);
          child.depth = nodes[i].depth + 1;
          child.time = nodes[i].time + delay_us();
          if (config.n_users == 1 || draw.unit() < config.self_reply_prob) {
            child.user = nodes[i].user;
          } else {
            // Uniform over the other users.
            const int other = static_cast<int>(draw.integer(0, config.n_users - 2));
            child.user = other >= nodes[i].user ? other + 1 : other;
          }
          nodes.push_back(child);
        }
      }
      if (capped) {
        out.warnings.push_back(group_id + " tree " + std::to_string(t) + ": capped at max_nodes=" +
                               std::to_string(config.max_nodes));
      }
      for (auto& n : nodes) n.text = noise_text(config.message_tokens);
      if (config.planted_falsehood_rate > 0 && draw.unit() < config.planted_falsehood_rate) {
        const auto target = static_cast<std::size_t>(draw.integer(0, static_cast<std::int64_t>(nodes.size()) - 1));
        const int f = static_cast<int>(draw.integer(0, config.n_factchecks - 1));
        nodes[target].planted_factcheck = f;
        nodes[target].text = planted_text(f);
      }

      const std::string prefix = "m" + two_digits(t, 4) + "-";
      auto id_of = [&](std::size_t i) { return prefix + std::to_string(i); };
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        Message m;
        m.group_id = group_id;
        m.message_id = id_of(i);
        m.user_id = user_name(nodes[i].user);
        m.timestamp = nodes[i].time;
        m.text = nodes[i].text;
        if (nodes[i].parent >= 0) m.reply_to = id_of(static_cast<std::size_t>(nodes[i].parent));
        emit(std::move(m));
        if (nodes[i].planted_factcheck) {
          truth_planted.push_back({{"group_id", group_id},
                                   {"message_id", id_of(i)},
                                   {"factcheck_id", out.factchecks[static_cast<std::size_t>(*nodes[i].planted_factcheck)].factcheck_id}});
        }
      }
      if (nodes.size() < 2) continue;

      // Ground truth from the generated structure and the naive oracles.
      json record;
      record["cascade_id"] = make_cascade_id(group_id, id_of(0));
      record["group_id"] = group_id;
      record["root"] = id_of(0);
      std::vector<std::size_t> order(nodes.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return nodes[a].time < nodes[b].time; });
      json members = json::array();
      json depths = json::object();
      std::map<int, int> level_sizes;
      std::vector<int> parent;
      bool falsehood = false;
      Timestamp last = nodes[0].time;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        parent.push_back(nodes[i].parent);
        depths[id_of(i)] = nodes[i].depth;
        ++level_sizes[nodes[i].depth];
        falsehood = falsehood || nodes[i].planted_factcheck.has_value();
        last = std::max(last, nodes[i].time);
      }
      for (auto i : order) members.push_back(id_of(i));
      int max_breadth = 0, max_depth = 0;
      for (const auto& [d, count] : level_sizes) {
        max_breadth = std::max(max_breadth, count);
        max_depth = std::max(max_depth, d);
      }
      std::set<int> user_set;
      std::set<std::pair<int, int>> user_edges;
      for (const auto& n : nodes) {
        user_set.insert(n.user);
        if (n.parent >= 0) user_edges.emplace(n.user, nodes[static_cast<std::size_t>(n.parent)].user);
      }
      // User ids sort like their indices (fixed-width numbering).
      std::vector<int> users(user_set.begin(), user_set.end());
      auto vertex = [&](int u) { return static_cast<int>(std::lower_bound(users.begin(), users.end(), u) - users.begin()); };
      std::vector<std::pair<int, int>> edges;
      for (const auto& [a, b] : user_edges) edges.emplace_back(vertex(a), vertex(b));
      json vertices = json::array();
      for (int u : users) vertices.push_back(user_name(u));
      json edge_json = json::array();
      for (const auto& [a, b] : edges) edge_json.push_back({a, b});

      record["members"] = std::move(members);
      record["depth"] = std::move(depths);
      record["max_depth"] = max_depth;
      record["max_breadth"] = max_breadth;
      record["n_nodes"] = nodes.size();
      record["n_unique_users"] = users.size();
      record["structural_virality"] = oracle::all_pairs_virality(parent);
      record["duration_minutes"] = minutes_between(nodes[0].time, last);
      record["user_graph"] = {{"vertices", std::move(vertices)}, {"edges", std::move(edge_json)}};
      if (static_cast<int>(users.size()) <= config.motif_truth_max_vertices) {
        const auto presence = oracle::brute_force_motifs(static_cast<int>(users.size()), edges);
        json motifs = json::object();
        for (std::size_t i = 0; i < kAllMotifs.size(); ++i) motifs[std::string(to_string(kAllMotifs[i]))] = to_string(presence[i]);
        record["motifs"] = std::move(motifs);
      } else {
        record["motifs"] = nullptr;
      }
      record["falsehood"] = falsehood;
      truth_cascades.push_back(std::move(record));
    }

    for (int i = 0; i < config.noise_messages; ++i) {
      Message m;
      m.group_id = group_id;
      m.message_id = "n" + two_digits(i, 5);
      m.user_id = user_name(static_cast<int>(draw.integer(0, config.n_users - 1)));
      m.timestamp = start + std::chrono::seconds{draw.integer(0, span_seconds - 1)};
      m.text = noise_text(config.message_tokens);
      emit(std::move(m));
    }

    std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
      return a.message.timestamp != b.message.timestamp ? a.message.timestamp < b.message.timestamp : a.order < b.order;
    });
    for (std::size_t i = 0; i < pending.size(); ++i) {
      pending[i].message.seq = static_cast<std::int64_t>(i);
      out.messages.push_back(std::move(pending[i].message));
    }
  }

  std::sort(truth_cascades.begin(), truth_cascades.end(),
            [](const json& a, const json& b) { return a["cascade_id"].get<std::string>() < b["cascade_id"].get<std::string>(); });
  out.truth = {{"config", to_json(config)},
               {"groups", std::move(truth_groups)},
               {"messages", out.messages.size()},
               {"cascades", std::move(truth_cascades)},
               {"planted", std::move(truth_planted)},
               {"warnings", out.warnings}};
  return out;
}

}  // namespace attn
