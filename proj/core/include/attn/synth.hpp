#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "attn/falsehood.hpp"
#include "attn/ingest.hpp"

namespace attn {

// Integer distribution with finite support.
struct CountDistribution {
  enum class Kind { fixed, uniform, poisson, weights };
  Kind kind = Kind::fixed;
  int value = 0;            // fixed
  int min = 0, max = 0;     // uniform; poisson draws above max are clamped
  double mean = 0.0;        // poisson
  std::vector<double> weights;  // weights[k] is the relative weight of k

  double expected() const;
};

// JSON form: {"fixed": 2}, {"uniform": [0, 3]}, {"poisson": 1.2, "max": 8}
// or {"weights": [0.5, 0.3, 0.2]}; a bare integer means fixed.
// Throws ConfigError on anything else.
CountDistribution parse_count_distribution(const nlohmann::json& j, const std::string& field);

struct SynthConfig {
  std::uint64_t seed = 1;
  int n_groups = 4;
  double political_fraction = 0.5;
  CountDistribution cascades_per_group{CountDistribution::Kind::fixed, 10, 0, 0, 0.0, {}};
  CountDistribution offspring{CountDistribution::Kind::poisson, 0, 0, 6, 0.9, {}};
  // Deepest reply level generated; 0 means unbounded.
  int max_depth = 8;
  // Trees stop growing at this many nodes; reaching it records a warning.
  int max_nodes = 5000;
  // Exponential reply delay; delays are at least one second.
  double delay_mean_minutes = 10.0;
  int n_users = 12;
  double self_reply_prob = 0.1;
  double planted_falsehood_rate = 0.1;
  // Messages outside any tree, per group.
  int noise_messages = 0;
  int span_days = 30;
  std::string start = "2018-08-01T00:00:00Z";
  int n_factchecks = 20;
  int factcheck_tokens = 20;
  int message_tokens = 12;
  // Ground-truth motif presence is brute-forced only for user graphs up to
  // this many vertices.
  int motif_truth_max_vertices = 6;
};

// Throws ConfigError naming the offending field.
SynthConfig parse_synth_config(const nlohmann::json& j);
nlohmann::json to_json(const SynthConfig& config);

struct SynthOutput {
  std::vector<Message> messages;  // grouped, each group in (timestamp, seq) order
  std::vector<GroupLabel> labels;
  std::vector<FactCheck> factchecks;
  nlohmann::json truth;
  std::vector<std::string> warnings;
};

// Deterministic for a given config: identical seeds give identical output
// on every platform (no standard-library distributions are used).
SynthOutput generate(const SynthConfig& config);

}  // namespace attn
