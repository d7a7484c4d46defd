#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lightplan/scene.hpp"

namespace lightplan {

/// On/off state of all n luminaires. Bit i of `mask` is luminaire i, so the
/// configuration index p equals `mask`.
struct LightConfig {
  std::uint32_t mask = 0;
  std::size_t n = 0;

  bool on(std::size_t i) const { return (mask >> i) & 1u; }
  std::size_t index() const { return mask; }
  std::size_t count_on() const;

  static LightConfig from_bits(std::span<const int> bits);
  static LightConfig all_off(std::size_t n) { return {0, n}; }
  static LightConfig all_on(std::size_t n);

  friend bool operator==(const LightConfig&, const LightConfig&) = default;
  friend auto operator<=>(const LightConfig&, const LightConfig&) = default;
};

/// Per-luminaire illuminance (lux) at one candidate point under one door state.
struct ContributionVector {
  std::vector<double> values;
  std::size_t point_index = 0;
  std::size_t door_state_index = 0;

  std::size_t size() const { return values.size(); }
};

struct NoiseModel {
  enum class Kind { none, gaussian };

  Kind kind = Kind::none;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  static NoiseModel none() { return {}; }
  static NoiseModel gaussian(double sigma, std::uint64_t seed) { return {Kind::gaussian, sigma, seed}; }
};

/// Sum of x_i over the set bits of `mask`, accumulated in ascending index
/// order. Every subset sum in the library goes through this order so that
/// results compare bitwise.
double subset_sum(std::span<const double> x, std::uint32_t mask);

/// Direct illuminance from one luminaire at one point, given the opaque
/// segments in effect. Zero when any occluder crosses the plan-view sight line.
/// Throws ValidationError when point and luminaire coincide.
double contribution(std::span<const WallSegment> occluders, const Luminaire& luminaire, const CandidatePoint& point);

double contribution(const Scene& scene, const DoorState& door_state, const Luminaire& luminaire,
                    const CandidatePoint& point);

ContributionVector contribution_vector(const Scene& scene, const DoorState& door_state, const CandidatePoint& point,
                                       std::size_t point_index = 0, std::size_t door_state_index = 0);

/// Summed reading for a configuration. Gaussian noise is drawn from a stream
/// keyed by (seed, point, door state, config) and the result is clamped at 0.
double reading(const ContributionVector& x, const LightConfig& config, const NoiseModel& noise = NoiseModel::none());

/// Dense points x door-states x luminaires table of contributions.
class ContributionMatrix {
 public:
  ContributionMatrix() = default;
  ContributionMatrix(std::size_t points, std::size_t door_states, std::size_t luminaires)
      : points_(points), door_states_(door_states), luminaires_(luminaires),
        data_(points * door_states * luminaires, 0.0) {}

  std::size_t points() const { return points_; }
  std::size_t door_states() const { return door_states_; }
  std::size_t luminaires() const { return luminaires_; }

  std::span<const double> at(std::size_t point, std::size_t q) const {
    return {data_.data() + offset(point, q), luminaires_};
  }
  std::span<double> at(std::size_t point, std::size_t q) { return {data_.data() + offset(point, q), luminaires_}; }

  ContributionVector vector(std::size_t point, std::size_t q) const;

  friend bool operator==(const ContributionMatrix&, const ContributionMatrix&) = default;

 private:
  std::size_t offset(std::size_t point, std::size_t q) const { return (point * door_states_ + q) * luminaires_; }

  std::size_t points_ = 0;
  std::size_t door_states_ = 0;
  std::size_t luminaires_ = 0;
  std::vector<double> data_;
};

/// Contributions for every (candidate, door state) pair, computed in parallel
/// over candidates. Output does not depend on `threads`.
ContributionMatrix sweep(const Scene& scene, std::span<const DoorState> door_states,
                         std::span<const CandidatePoint> candidates, unsigned threads = 0);

/// CSV with header `point_index,door_state,lum_0..lum_{n-1}`, 6 significant digits.
std::string contributions_csv(const ContributionMatrix& m);

/// Inverse of contributions_csv (values carry the 6-digit rounding).
ContributionMatrix parse_contributions_csv(std::string_view text);

}  // namespace lightplan
