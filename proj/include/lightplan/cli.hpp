#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lightplan::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kInvalidInput = 3 };

struct RunConfig {
  std::string scene_path;
  double tau = 0.01;
  double epsilon = 0.01;
  double sigma = 0.0;
  std::uint64_t seed = 1;
  std::optional<double> grid_spacing;
  std::string out_dir = ".";
  std::string universe = "full";  // or "open-door"
  bool exact = false;
  bool nearest = false;  // nearest-sum fallback when no candidate is within epsilon
  unsigned threads = 0;
};

int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_heatmap(const RunConfig& config, std::ostream& out);
int cmd_solve_cover(const RunConfig& config, std::ostream& out);
int cmd_infer(const RunConfig& config, const std::string& readings_path, std::ostream& out);
int cmd_ingest(const RunConfig& config, const std::string& samples_path, const std::string& commands_path,
               std::size_t luminaires, double settle, double window, bool least_squares, std::ostream& out);
int cmd_synth_log(const RunConfig& config, const std::vector<std::size_t>& points, std::size_t door_state,
                  double background, std::ostream& out);

/// Parses arguments and dispatches; maps errors to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lightplan::cli
