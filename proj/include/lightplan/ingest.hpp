#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lightplan/inference.hpp"
#include "lightplan/transport.hpp"

namespace lightplan {

/// Upper end of the logged sensor range (lux).
inline constexpr double kMaxLux = 88000.0;

struct Sample {
  double t = 0.0;
  std::size_t location = 0;
  double lux = 0.0;
};

struct SampleLog {
  std::vector<Sample> rows;
};

struct Command {
  double t = 0.0;
  LightConfig config;
};

struct CommandLog {
  std::vector<Command> rows;
};

/// `t,location,lux`. Throws ParseError on malformed rows and ValidationError
/// when lux leaves [0, 88000] or a location's timestamps go backwards.
SampleLog parse_samples_csv(std::string_view text);

/// `t,bitmask` where bitmask is the configuration index p (bit i = luminaire i).
/// Timestamps must be strictly increasing and p < 2^n.
CommandLog parse_commands_csv(std::string_view text, std::size_t luminaires);

std::string samples_csv(const SampleLog& log);
std::string commands_csv(const CommandLog& log);

struct BaselineCell {
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::size_t count = 0;
};

/// A command interval that could not contribute to its cell.
struct BaselineIssue {
  std::size_t location = 0;
  std::uint32_t config = 0;
  double t = 0.0;
  std::string reason;
};

struct BaselineTable {
  std::size_t luminaires = 0;
  std::map<std::pair<std::size_t, std::uint32_t>, BaselineCell> cells;  // (location, p)
  std::vector<BaselineIssue> issues;

  const BaselineCell* find(std::size_t location, std::uint32_t config) const;
  std::vector<std::size_t> locations() const;
};

/// Averages each location's samples over [t + settle, t + settle + window)
/// after every command at time t. A window never reaches past the next
/// command; intervals shorter than settle + window are reported as issues and
/// left out. Repeated commands for the same configuration pool their samples.
BaselineTable extract_baselines(const SampleLog& samples, const CommandLog& commands, double settle = 3.0,
                                double window = 3.0);

struct Calibration {
  ContributionVector x;
  double background = 0.0;           // all-off baseline
  std::vector<std::size_t> clamped;  // luminaires whose single-on baseline fell below background
};

/// x_i = baseline(only i on) - baseline(all off), clamped at 0. Throws
/// ValidationError when a required configuration is missing.
Calibration calibrate_contributions(const BaselineTable& table, std::size_t location);

/// Least-squares fit of background + x over every baseline at the location.
Calibration calibrate_least_squares(const BaselineTable& table, std::size_t location);

struct AccuracyStats {
  double min = 0.0, q1 = 0.0, median = 0.0, mean = 0.0, q3 = 0.0, max = 0.0;
  std::size_t n = 0;
};

/// Linear-interpolated quartiles (numpy's default). Empty input gives n = 0.
AccuracyStats summarize(std::vector<double> values);

struct LocationAccuracy {
  std::size_t location = 0;
  AccuracyStats stats;
  std::vector<InferenceRecord> records;
};

/// For each location and each configuration with a baseline: K = baseline -
/// background, run perfect_sum with `epsilon`, score against the commanded
/// configuration.
std::vector<LocationAccuracy> evaluate_locations(const BaselineTable& table,
                                                 const std::map<std::size_t, Calibration>& calibrations,
                                                 double epsilon);

struct FusionResult {
  AccuracyStats stats;
  std::vector<std::pair<std::uint32_t, double>> per_config;  // (p, accuracy of the fused verdict)
  std::size_t ties = 0;
};

/// Voting fusion across all calibrated locations, per configuration present at
/// every location.
FusionResult evaluate_fusion(const BaselineTable& table, const std::map<std::size_t, Calibration>& calibrations,
                             double epsilon);

/// `location,min,q1,median,mean,q3,max,n`
std::string accuracy_csv(std::span<const LocationAccuracy> rows);

/// Synthetic logger: steps through `sequence`, holding each configuration for
/// `dwell` seconds while every location samples at `rate_hz`. Over the first
/// `ramp` seconds of each hold the level moves linearly from the previous
/// reading to the new one.
struct SynthesisOptions {
  double rate_hz = 4.7;
  double dwell = 7.0;
  double ramp = 0.0;
  double background = 0.0;
  double start = 0.0;
  NoiseModel noise;
};

std::pair<SampleLog, CommandLog> synthesize_logs(std::span<const ContributionVector> locations,
                                                 std::span<const LightConfig> sequence,
                                                 const SynthesisOptions& options = {});

}  // namespace lightplan
