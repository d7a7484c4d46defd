#include "lightplan/inference.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "lightplan/errors.hpp"
#include "lightplan/text.hpp"

namespace lightplan {
namespace {

// Search paths accumulate in a different order than subset_sum, so they prune
// with a little slack and every hit is re-checked canonically.
double search_slack(std::span<const double> x, double target, double epsilon) {
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  return 1e-9 * (total + std::abs(target) + epsilon) + 1e-12;
}

bool accepts(std::span<const double> x, std::uint32_t mask, double target, double epsilon) {
  return std::abs(subset_sum(x, mask) - target) <= epsilon;
}

void validate(const PerfectSumQuery& q) {
  if (q.contributions.size() > kMaxLuminaires)
    throw ValidationError("perfect sum supports at most " + std::to_string(kMaxLuminaires) + " contributions");
  if (!(q.epsilon >= 0.0)) throw ValidationError("epsilon must be non-negative");
  for (double v : q.contributions)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("contributions must be finite and non-negative");
}

std::vector<LightConfig> finish(std::vector<std::uint32_t> masks, std::size_t n) {
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
  std::vector<LightConfig> out;
  out.reserve(masks.size());
  for (auto m : masks) out.push_back({m, n});
  return out;
}

}  // namespace

std::vector<LightConfig> perfect_sum(const PerfectSumQuery& query) {
  return query.contributions.size() > kMeetInTheMiddleThreshold ? perfect_sum_meet_in_middle(query)
                                                                : perfect_sum_dfs(query);
}

std::vector<LightConfig> perfect_sum_dfs(const PerfectSumQuery& query) {
  validate(query);
  const auto& x = query.contributions;
  const std::size_t n = x.size();
  const double slack = search_slack(x, query.target, query.epsilon);
  const double lo = query.target - query.epsilon - slack;
  const double hi = query.target + query.epsilon + slack;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) suffix[k] = suffix[k + 1] + x[order[k]];

  std::vector<std::uint32_t> hits;
  // Explicit stack of (depth, running sum, mask).
  struct Frame {
    std::size_t depth;
    double sum;
    std::uint32_t mask;
  };
  std::vector<Frame> stack{{0, 0.0, 0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.sum > hi || f.sum + suffix[f.depth] < lo) continue;
    if (f.depth == n) {
      if (accepts(x, f.mask, query.target, query.epsilon)) hits.push_back(f.mask);
      continue;
    }
    const std::size_t i = order[f.depth];
    stack.push_back({f.depth + 1, f.sum, f.mask});
    stack.push_back({f.depth + 1, f.sum + x[i], f.mask | (std::uint32_t{1} << i)});
  }
  return finish(std::move(hits), n);
}

std::vector<LightConfig> perfect_sum_meet_in_middle(const PerfectSumQuery& query) {
  validate(query);
  const auto& x = query.contributions;
  const std::size_t n = x.size();
  const std::size_t left_n = n / 2;
  const double slack = search_slack(x, query.target, query.epsilon);

  struct Half {
    double sum;
    std::uint32_t mask;
  };
  const auto enumerate = [&](std::size_t begin, std::size_t count) {
    std::vector<Half> out(std::size_t{1} << count);
    out[0] = {0.0, 0};
    for (std::size_t m = 1; m < out.size(); ++m) {
      const auto top = static_cast<std::size_t>(std::bit_width(m) - 1);
      const auto& prev = out[m & ~(std::size_t{1} << top)];
      out[m] = {prev.sum + x[begin + top], prev.mask | (std::uint32_t{1} << (begin + top))};
    }
    return out;
  };
  const auto left = enumerate(0, left_n);
  auto right = enumerate(left_n, n - left_n);
  std::sort(right.begin(), right.end(), [](const Half& a, const Half& b) { return a.sum < b.sum; });

  std::vector<std::uint32_t> hits;
  for (const auto& l : left) {
    const double lo = query.target - query.epsilon - slack - l.sum;
    const double hi = query.target + query.epsilon + slack - l.sum;
    auto it = std::lower_bound(right.begin(), right.end(), lo, [](const Half& h, double v) { return h.sum < v; });
    for (; it != right.end() && it->sum <= hi; ++it) {
      const std::uint32_t mask = l.mask | it->mask;
      if (accepts(x, mask, query.target, query.epsilon)) hits.push_back(mask);
    }
  }
  return finish(std::move(hits), n);
}

double jaccard_accuracy(const LightConfig& truth, std::span<const LightConfig> candidates) {
  if (candidates.empty()) return 0.0;
  double total = 0.0;
  for (const auto& c : candidates) {
    const auto inter = std::popcount(truth.mask & c.mask);
    const auto uni = std::popcount(truth.mask | c.mask);
    total += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  }
  return total / static_cast<double>(candidates.size());
}

InferenceResult infer(const PerfectSumQuery& query, const LightConfig& truth, bool nearest_fallback) {
  InferenceResult r;
  r.candidates = perfect_sum(query);
  if (r.candidates.empty()) {
    r.no_solution = true;
    if (nearest_fallback) {
      const std::size_t n = query.contributions.size();
      double best = std::numeric_limits<double>::infinity();
      std::vector<std::uint32_t> masks;
      for (std::uint32_t m = 0; m < (std::uint32_t{1} << n); ++m) {
        const double gap = std::abs(subset_sum(query.contributions, m) - query.target);
        if (gap < best) {
          best = gap;
          masks.assign(1, m);
        } else if (gap == best) {
          masks.push_back(m);
        }
      }
      for (auto m : masks) r.candidates.push_back({m, n});
    }
  }
  r.mean_accuracy = jaccard_accuracy(truth, r.candidates);
  return r;
}

std::vector<bool> in_range(const ContributionVector& x) {
  std::vector<bool> mask(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) mask[i] = x.values[i] > 0.0;
  return mask;
}

VoteVector sensor_votes(const ContributionVector& x, std::span<const LightConfig> candidates,
                        const std::vector<bool>& range_mask) {
  const std::size_t n = x.size();
  if (range_mask.size() != n) throw ValidationError("range mask length does not match contribution vector");
  VoteVector v{std::vector<int>(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    if (!range_mask[i]) continue;
    std::size_t on = 0;
    for (const auto& c : candidates) on += c.on(i) ? 1 : 0;
    const std::size_t off = candidates.size() - on;
    v.votes[i] = on > off ? 1 : (off > on ? -1 : 0);
  }
  return v;
}

FusedVerdict fuse_votes(std::span<const VoteVector> all_votes) {
  if (all_votes.empty()) throw ValidationError("fuse_votes needs at least one vote vector");
  const std::size_t n = all_votes.front().votes.size();
  FusedVerdict out{LightConfig::all_off(n), {}};
  for (std::size_t i = 0; i < n; ++i) {
    int total = 0;
    for (const auto& v : all_votes) {
      if (v.votes.size() != n) throw ValidationError("vote vectors differ in length");
      total += v.votes[i];
    }
    if (total > 0) out.config.mask |= std::uint32_t{1} << i;
    if (total == 0) out.ties.push_back(i);
  }
  return out;
}

std::string inference_report_csv(std::span<const InferenceRecord> records) {
  std::string out = "point_index,door_state,config_p,n_candidates,accuracy,no_solution\n";
  for (const auto& r : records) {
    out += std::to_string(r.point_index) + "," + std::to_string(r.door_state) + "," + std::to_string(r.config_p) +
           "," + std::to_string(r.n_candidates) + "," + sig6(r.accuracy) + "," + (r.no_solution ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace lightplan
