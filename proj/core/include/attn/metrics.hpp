#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attn/cascade.hpp"

namespace attn {

// One message of a cascade as seen on the clock: offset from the root, the
// level it sits on and whether its author appears for the first time.
struct TimelinePoint {
  std::int64_t offset_us = 0;
  int depth = 0;
  bool new_user = false;

  bool operator==(const TimelinePoint&) const = default;
};

// Per-depth vectors are dense maps indexed by depth level 0..depth.
struct CascadeMetrics {
  std::string cascade_id;
  std::string group_id;
  int n_nodes = 0;
  int depth = 0;
  int max_breadth = 0;
  std::vector<int> breadth_at;
  double structural_virality = 0.0;
  double duration_minutes = 0.0;
  int n_unique_users = 0;
  // Distinct authors seen on levels 0..d (cumulative).
  std::vector<int> users_by_depth;
  // Distinct authors on level d alone.
  std::vector<int> users_at_depth;
  // Minutes from the root to the first message reaching level d.
  std::vector<double> time_to_depth;
  Timestamp start{};
  Timestamp end{};
  // Messages ordered by (timestamp, seq).
  std::vector<TimelinePoint> timeline;

  bool operator==(const CascadeMetrics&) const = default;
};

std::vector<int> breadth_profile(const Cascade& cascade);

// Mean shortest-path distance over unordered node pairs of the undirected
// tree, computed from subtree sizes (Wiener index) in linear time.
// Throws DomainError for fewer than two nodes.
double structural_virality(const Cascade& cascade);
double structural_virality(std::span<const int> parent);

double duration(const Cascade& cascade);

CascadeMetrics compute_metrics(const Cascade& cascade);
std::vector<CascadeMetrics> compute_all_metrics(std::span<const Cascade> cascades, unsigned jobs = 1);

enum class ProfileX { depth_pct, time_pct };
enum class ProfileY { breadth, unique_users, minutes, depth };

std::string_view to_string(ProfileX x);
std::string_view to_string(ProfileY y);

struct ProfileBin {
  double bin_pct = 0.0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::size_t n = 0;

  bool operator==(const ProfileBin&) const = default;
};

inline constexpr int kProfileBins = 21;  // 0 %, 5 %, ..., 100 %

// Normalises x to percent of each cascade's own maximum (depth or
// duration), snaps it to the nearest 5 % bin, and averages y per bin across
// cascades. A cascade contributes one sample per bin it reaches (the mean of
// its levels landing in that bin). Bins no cascade reaches are omitted.
// Throws DomainError if a cascade's x-maximum is zero.
std::vector<ProfileBin> normalized_profile(std::span<const CascadeMetrics> cascades, ProfileX x, ProfileY y);

// Per-cascade series sidecar (JSONL) carrying what the flat metrics table
// cannot: depth-indexed vectors, the timeline, and the cascade interval.
std::string to_jsonl(const CascadeMetrics& metrics);
void write_metrics_series(std::ostream& out, std::span<const CascadeMetrics> metrics);
std::vector<CascadeMetrics> read_metrics_series(std::istream& in, std::string_view source = "series");

}  // namespace attn
