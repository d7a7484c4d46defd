#include "lightplan/planning.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "lightplan/errors.hpp"
#include "lightplan/parallel.hpp"
#include "lightplan/text.hpp"

namespace lightplan {

std::size_t DistinctnessVector::score() const {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), std::uint8_t{1}));
}

DistinctnessVector distinctness_vector(std::span<const double> values, double tau) {
  if (values.empty()) throw ValidationError("distinctness needs at least one value");
  if (!(tau >= 0.0)) throw ValidationError("tau must be non-negative");
  const std::size_t k = values.size();
  DistinctnessVector out{std::vector<std::uint8_t>(k, 0), tau};
  if (k == 1) {
    out.flags[0] = 1;
    return out;
  }

  std::vector<std::uint32_t> order(k);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });
  // fl(a - b) is monotone in b, so the nearest value is always a sorted neighbour.
  for (std::size_t r = 0; r < k; ++r) {
    const double v = values[order[r]];
    bool distinct = true;
    if (r > 0 && !(std::abs(v - values[order[r - 1]]) > tau)) distinct = false;
    if (r + 1 < k && !(std::abs(v - values[order[r + 1]]) > tau)) distinct = false;
    out.flags[order[r]] = distinct ? 1 : 0;
  }
  return out;
}

std::vector<double> configuration_sums(std::span<const double> x) {
  if (x.size() > kMaxLuminaires) throw ValidationError("too many luminaires for 2^n enumeration");
  std::vector<double> sums(std::size_t{1} << x.size(), 0.0);
  // Adding the highest bit last reproduces subset_sum's ascending accumulation.
  for (std::size_t p = 1; p < sums.size(); ++p) {
    const auto top = static_cast<std::size_t>(std::bit_width(p) - 1);
    sums[p] = sums[p & ~(std::size_t{1} << top)] + x[top];
  }
  return sums;
}

DistinctnessVector state_distinctness(std::span<const double> x, double tau) {
  const auto sums = configuration_sums(x);
  return distinctness_vector(sums, tau);
}

std::size_t aggregate_distinctness(const ContributionMatrix& matrix, double tau, std::size_t point) {
  std::size_t total = 0;
  for (std::size_t q = 0; q < matrix.door_states(); ++q) total += state_distinctness(matrix.at(point, q), tau).score();
  return total;
}

std::vector<std::vector<std::size_t>> distinctness_table(const ContributionMatrix& matrix, double tau,
                                                         unsigned threads) {
  std::vector<std::vector<std::size_t>> table(matrix.door_states(), std::vector<std::size_t>(matrix.points(), 0));
  parallel_for(
      matrix.points(),
      [&](std::size_t p) {
        for (std::size_t q = 0; q < matrix.door_states(); ++q)
          table[q][p] = state_distinctness(matrix.at(p, q), tau).score();
      },
      threads);
  return table;
}

CoverInstance build_cover_instance(const ContributionMatrix& matrix, double tau,
                                   std::span<const std::size_t> door_states, unsigned threads) {
  std::vector<std::size_t> qs(door_states.begin(), door_states.end());
  if (qs.empty()) {
    qs.resize(matrix.door_states());
    std::iota(qs.begin(), qs.end(), std::size_t{0});
  }
  for (std::size_t q : qs)
    if (q >= matrix.door_states()) throw ValidationError("door state index out of range");

  const std::size_t configs = std::size_t{1} << matrix.luminaires();
  CoverInstance inst;
  inst.universe_size = configs * qs.size();
  inst.labels.reserve(inst.universe_size);
  for (std::size_t q : qs)
    for (std::size_t p = 0; p < configs; ++p) inst.labels.emplace_back(p, q);

  inst.sets.assign(matrix.points(), DynamicBitset(inst.universe_size));
  parallel_for(
      matrix.points(),
      [&](std::size_t point) {
        for (std::size_t k = 0; k < qs.size(); ++k) {
          const auto d = state_distinctness(matrix.at(point, qs[k]), tau);
          for (std::size_t p = 0; p < configs; ++p)
            if (d.flags[p]) inst.sets[point].set(k * configs + p);
        }
      },
      threads);
  return inst;
}

CoverSolution greedy_set_cover(const CoverInstance& instance) {
  CoverSolution sol;
  sol.covered = DynamicBitset(instance.universe_size);
  while (true) {
    std::size_t best = instance.sets.size();
    std::size_t best_gain = 0;
    for (std::size_t s = 0; s < instance.sets.size(); ++s) {
      const std::size_t gain = instance.sets[s].count_minus(sol.covered);
      if (gain > best_gain) {
        best_gain = gain;
        best = s;
      }
    }
    if (best_gain == 0) break;
    sol.chosen.push_back(best);
    sol.gains.push_back(best_gain);
    sol.covered |= instance.sets[best];
  }
  sol.complete = sol.covered.count() == instance.universe_size;
  return sol;
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(std::vector<std::uint64_t> sets, std::uint64_t target) : sets_(std::move(sets)), target_(target) {}

  std::vector<std::size_t> solve(std::vector<std::size_t> incumbent) {
    best_ = std::move(incumbent);
    std::vector<std::size_t> chosen;
    search(target_, chosen);
    return best_;
  }

 private:
  void search(std::uint64_t uncovered, std::vector<std::size_t>& chosen) {
    if (uncovered == 0) {
      if (chosen.size() < best_.size()) best_ = chosen;
      return;
    }
    if (chosen.size() + 1 >= best_.size()) return;

    int max_gain = 0;
    for (auto s : sets_) max_gain = std::max(max_gain, std::popcount(s & uncovered));
    const auto need = static_cast<std::size_t>((std::popcount(uncovered) + max_gain - 1) / max_gain);
    if (chosen.size() + need >= best_.size()) return;

    // Branch on the uncovered element with the fewest covering sets.
    std::uint64_t pick = 0;
    std::size_t fewest = sets_.size() + 1;
    for (std::uint64_t rest = uncovered; rest; rest &= rest - 1) {
      const std::uint64_t bit = rest & (~rest + 1);
      std::size_t c = 0;
      for (auto s : sets_) c += (s & bit) ? 1 : 0;
      if (c < fewest) {
        fewest = c;
        pick = bit;
      }
    }
    std::vector<std::size_t> branch;
    for (std::size_t i = 0; i < sets_.size(); ++i)
      if (sets_[i] & pick) branch.push_back(i);
    std::stable_sort(branch.begin(), branch.end(), [&](std::size_t a, std::size_t b) {
      return std::popcount(sets_[a] & uncovered) > std::popcount(sets_[b] & uncovered);
    });
    for (std::size_t i : branch) {
      chosen.push_back(i);
      search(uncovered & ~sets_[i], chosen);
      chosen.pop_back();
    }
  }

  std::vector<std::uint64_t> sets_;
  std::uint64_t target_;
  std::vector<std::size_t> best_;
};

}  // namespace

CoverSolution exact_min_cover(const CoverInstance& instance, std::size_t limit) {
  limit = std::min<std::size_t>(limit, 64);
  if (instance.universe_size > limit)
    throw ValidationError("exact cover limited to " + std::to_string(limit) + " elements; instance has " +
                          std::to_string(instance.universe_size));

  std::vector<std::uint64_t> masks;
  masks.reserve(instance.sets.size());
  std::uint64_t coverable = 0;
  for (const auto& s : instance.sets) {
    std::uint64_t m = 0;
    for (std::size_t e : s.indices()) m |= std::uint64_t{1} << e;
    masks.push_back(m);
    coverable |= m;
  }

  // Greedy gives the initial incumbent; one extra slot so equal-size covers are not pruned away.
  CoverSolution greedy = greedy_set_cover(instance);
  std::vector<std::size_t> incumbent = greedy.chosen;
  incumbent.push_back(instance.sets.size());
  BranchAndBound bb(masks, coverable);
  std::vector<std::size_t> best = bb.solve(std::move(incumbent));
  if (!best.empty() && best.back() == instance.sets.size()) best = greedy.chosen;

  CoverSolution sol;
  sol.covered = DynamicBitset(instance.universe_size);
  for (std::size_t s : best) {
    sol.chosen.push_back(s);
    sol.gains.push_back(instance.sets[s].count_minus(sol.covered));
    sol.covered |= instance.sets[s];
  }
  sol.complete = sol.covered.count() == instance.universe_size;
  return sol;
}

std::vector<std::size_t> open_door_states(const Scene& scene, std::span<const DoorState> states) {
  std::vector<std::size_t> out;
  for (std::size_t q = 0; q < states.size(); ++q) {
    bool open = true;
    for (std::size_t d = 0; d < scene.doors.size(); ++d) {
      const auto& allowed = scene.doors[d].allowed_angles_deg;
      if (states[q].angles_deg[d] != *std::max_element(allowed.begin(), allowed.end())) open = false;
    }
    if (open) out.push_back(q);
  }
  return out;
}

std::string heatmap_csv(std::span<const CandidatePoint> candidates, std::span<const std::size_t> scores) {
  if (candidates.size() != scores.size()) throw ValidationError("heatmap needs one score per candidate");
  std::string out = "x,y,score\n";
  for (std::size_t i = 0; i < candidates.size(); ++i)
    out += sig6(candidates[i].position.x) + "," + sig6(candidates[i].position.y) + "," + std::to_string(scores[i]) + "\n";
  return out;
}

std::string heatmap_pgm(std::span<const CandidatePoint> candidates, std::span<const std::size_t> scores,
                        std::size_t maxval, std::size_t grid_index) {
  if (candidates.size() != scores.size()) throw ValidationError("heatmap needs one score per candidate");
  std::size_t width = 0, height = 0;
  for (const auto& c : candidates) {
    if (c.grid != grid_index) continue;
    width = std::max(width, c.col + 1);
    height = std::max(height, c.row + 1);
  }
  std::vector<std::size_t> pixels(width * height, 0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (c.grid != grid_index) continue;
    pixels[(height - 1 - c.row) * width + c.col] = std::min(scores[i], maxval);
  }
  std::string out = "P2\n" + std::to_string(width) + " " + std::to_string(height) + "\n" +
                    std::to_string(std::max<std::size_t>(maxval, 1)) + "\n";
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      if (c) out += ' ';
      out += std::to_string(pixels[r * width + c]);
    }
    out += '\n';
  }
  return out;
}

std::string cover_report(const CoverSolution& solution, const CoverInstance& instance,
                         std::span<const CandidatePoint> candidates) {
  std::string out = "step,point_index,x,y,gain,covered\n";
  std::size_t running = 0;
  for (std::size_t k = 0; k < solution.chosen.size(); ++k) {
    const std::size_t s = solution.chosen[k];
    running += solution.gains[k];
    const bool have_pos = s < candidates.size();
    out += std::to_string(k + 1) + "," + std::to_string(s) + "," +
           (have_pos ? sig6(candidates[s].position.x) : std::string("")) + "," +
           (have_pos ? sig6(candidates[s].position.y) : std::string("")) + "," + std::to_string(solution.gains[k]) +
           "," + std::to_string(running) + "\n";
  }
  out += "# sensors=" + std::to_string(solution.chosen.size()) + " covered=" + std::to_string(solution.covered.count()) +
         "/" + std::to_string(instance.universe_size) + " complete=" + (solution.complete ? "true" : "false") + "\n";
  return out;
}

}  // namespace lightplan
