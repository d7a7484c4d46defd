#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lightplan/transport.hpp"

namespace lightplan {

/// Find every luminaire subset whose summed contribution lies within
/// `epsilon` lux of `target`.
struct PerfectSumQuery {
  std::vector<double> contributions;
  double target = 0.0;
  double epsilon = 0.0;
};

/// Above this many luminaires perfect_sum switches to meet-in-the-middle.
inline constexpr std::size_t kMeetInTheMiddleThreshold = 20;

/// All subsets S with |sum(S) - K| <= epsilon, ascending by configuration
/// index. Sums are compared in canonical index order (see subset_sum).
std::vector<LightConfig> perfect_sum(const PerfectSumQuery& query);

/// Depth-first search over contributions sorted descending, pruned by running
/// sum and suffix sums.
std::vector<LightConfig> perfect_sum_dfs(const PerfectSumQuery& query);

/// Half-enumeration with sorted merge.
std::vector<LightConfig> perfect_sum_meet_in_middle(const PerfectSumQuery& query);

/// Mean Jaccard index between the truth's on-set and each candidate's on-set.
/// Two empty on-sets score 1. An empty candidate list scores 0.
double jaccard_accuracy(const LightConfig& truth, std::span<const LightConfig> candidates);

struct InferenceResult {
  std::vector<LightConfig> candidates;
  double mean_accuracy = 0.0;
  bool no_solution = false;
};

/// perfect_sum plus accuracy against `truth`. With `nearest_fallback`, an empty
/// solution set is replaced by the subsets whose sum is closest to the target
/// (no_solution stays true so callers can tell).
InferenceResult infer(const PerfectSumQuery& query, const LightConfig& truth, bool nearest_fallback = false);

/// Per-luminaire verdict from one sensor: +1 on, -1 off, 0 undetectable.
struct VoteVector {
  std::vector<int> votes;
};

/// Majority vote of a sensor's candidates per luminaire. Luminaires outside
/// `range_mask` and per-sensor ties vote 0.
VoteVector sensor_votes(const ContributionVector& x, std::span<const LightConfig> candidates,
                        const std::vector<bool>& range_mask);

/// Range mask where every non-zero contribution counts as in range.
std::vector<bool> in_range(const ContributionVector& x);

struct FusedVerdict {
  LightConfig config;
  std::vector<std::size_t> ties;  // luminaires whose summed vote was exactly 0
};

/// Sums votes per luminaire: > 0 on, otherwise off. Ties are reported.
/// Throws ValidationError for an empty list or mismatched lengths.
FusedVerdict fuse_votes(std::span<const VoteVector> all_votes);

/// One row of the inference report.
struct InferenceRecord {
  std::size_t point_index = 0;
  std::size_t door_state = 0;
  std::size_t config_p = 0;
  std::size_t n_candidates = 0;
  double accuracy = 0.0;
  bool no_solution = false;
};

/// `point_index,door_state,config_p,n_candidates,accuracy,no_solution`
std::string inference_report_csv(std::span<const InferenceRecord> records);

}  // namespace lightplan
