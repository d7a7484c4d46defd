#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lightplan/bitset.hpp"
#include "lightplan/scene.hpp"
#include "lightplan/transport.hpp"

namespace lightplan {

/// Default resolution threshold (lux) for distinctness.
inline constexpr double kDefaultTau = 0.01;

/// e_i = 1 iff value i differs from every other value by more than tau.
struct DistinctnessVector {
  std::vector<std::uint8_t> flags;
  double tau = 0.0;

  std::size_t score() const;
};

/// Flags values whose nearest other value is farther than `tau` (strict). A
/// lone value is distinct. Runs in O(k log k) by checking sorted neighbours.
/// Throws ValidationError for an empty list or negative tau.
DistinctnessVector distinctness_vector(std::span<const double> values, double tau);

/// Noise-free readings S_p for all 2^n configurations, indexed by p.
std::vector<double> configuration_sums(std::span<const double> x);

/// Distinctness over the 2^n configuration readings of one contribution vector.
DistinctnessVector state_distinctness(std::span<const double> x, double tau);

/// Sum of per-door-state distinctness scores at one point; in [0, 2^n * |Q|].
std::size_t aggregate_distinctness(const ContributionMatrix& matrix, double tau, std::size_t point);

/// Per-door-state scores for every point: result[q][point].
std::vector<std::vector<std::size_t>> distinctness_table(const ContributionMatrix& matrix, double tau,
                                                         unsigned threads = 0);

/// Light configurations x door states. Application state id = q * 2^n + p.
struct StateSpace {
  std::size_t luminaires = 0;
  std::size_t door_states = 0;

  std::size_t configs() const { return std::size_t{1} << luminaires; }
  std::size_t total() const { return configs() * door_states; }
  std::size_t id(std::size_t p, std::size_t q) const { return q * configs() + p; }
};

struct CoverInstance {
  std::size_t universe_size = 0;
  std::vector<std::pair<std::size_t, std::size_t>> labels;  // element -> (p, q)
  std::vector<DynamicBitset> sets;                            // one per candidate point
};

struct CoverSolution {
  std::vector<std::size_t> chosen;  // in selection order
  std::vector<std::size_t> gains;   // newly covered elements per chosen set
  DynamicBitset covered;
  bool complete = false;
};

/// Universe = every (p, q) with q in `door_states` (all when empty). A point
/// covers (p, q) iff its configuration reading S_p is distinct at that door state.
CoverInstance build_cover_instance(const ContributionMatrix& matrix, double tau,
                                   std::span<const std::size_t> door_states = {}, unsigned threads = 0);

/// Picks the set with the most uncovered elements until nothing more can be
/// covered; ties go to the lowest index.
CoverSolution greedy_set_cover(const CoverInstance& instance);

/// Minimum-cardinality cover of every coverable element by branch and bound.
/// Throws ValidationError when the universe exceeds `limit` (at most 64).
CoverSolution exact_min_cover(const CoverInstance& instance, std::size_t limit = 24);

/// Door states where every door sits at its widest allowed angle.
std::vector<std::size_t> open_door_states(const Scene& scene, std::span<const DoorState> states);

/// `x,y,score` per candidate.
std::string heatmap_csv(std::span<const CandidatePoint> candidates, std::span<const std::size_t> scores);

/// Plain (P2) graymap of one grid's scores; `maxval` is the state count.
/// Cells without a candidate are 0. Row 0 is the grid's top (largest y).
std::string heatmap_pgm(std::span<const CandidatePoint> candidates, std::span<const std::size_t> scores,
                        std::size_t maxval, std::size_t grid_index = 0);

/// Human-readable ordered list of chosen points with marginal gains.
std::string cover_report(const CoverSolution& solution, const CoverInstance& instance,
                         std::span<const CandidatePoint> candidates);

}  // namespace lightplan
