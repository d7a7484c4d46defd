#include "lightplan/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include "lightplan/errors.hpp"
#include "lightplan/inference.hpp"
#include "lightplan/ingest.hpp"
#include "lightplan/planning.hpp"
#include "lightplan/scene.hpp"
#include "lightplan/text.hpp"
#include "lightplan/transport.hpp"

namespace lightplan::cli {
namespace {

std::string out_path(const RunConfig& config, const std::string& name) {
  return (std::filesystem::path(config.out_dir) / name).string();
}

void check(const RunConfig& c) {
  if (!(c.tau >= 0.0)) throw ValidationError("--tau must be >= 0");
  if (!(c.epsilon >= 0.0)) throw ValidationError("--epsilon must be >= 0");
  if (!(c.sigma >= 0.0)) throw ValidationError("--sigma must be >= 0");
  if (c.universe != "full" && c.universe != "open-door") throw ValidationError("--universe must be full or open-door");
}

Scene scene_for(const RunConfig& config) {
  check(config);
  if (config.scene_path.empty()) throw IoError("--scene is required");
  if (!std::filesystem::exists(config.scene_path)) throw IoError("scene file not found: " + config.scene_path);
  Scene scene = load_scene(config.scene_path);
  if (config.grid_spacing) {
    scene.candidates.clear();
    for (std::size_t g = 0; g < scene.grids.size(); ++g) {
      scene.grids[g].spacing = *config.grid_spacing;
      auto pts = make_grid(scene.grids[g], scene.walls, g);
      scene.candidates.insert(scene.candidates.end(), pts.begin(), pts.end());
    }
  }
  if (scene.candidates.empty()) throw ValidationError("scene defines no candidate points (add a grid line)");
  return scene;
}

struct Simulation {
  Scene scene;
  std::vector<DoorState> states;
  ContributionMatrix matrix;
  double seconds = 0.0;
};

Simulation simulate(const RunConfig& config) {
  Simulation sim;
  sim.scene = scene_for(config);
  sim.states = enumerate_door_states(sim.scene);
  const auto start = std::chrono::steady_clock::now();
  sim.matrix = sweep(sim.scene, sim.states, sim.scene.candidates, config.threads);
  sim.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sim;
}

std::string state_label(const DoorState& s) {
  std::string out;
  for (std::size_t i = 0; i < s.angles_deg.size(); ++i) out += (i ? "/" : "") + shortest(s.angles_deg[i]);
  return out.empty() ? "-" : out;
}

std::size_t grid_count(const Scene& scene) { return std::max<std::size_t>(scene.grids.size(), 1); }

void write_heatmap(const RunConfig& config, const Scene& scene, const std::string& stem,
                   const std::vector<std::size_t>& scores, std::size_t maxval) {
  write_file(out_path(config, stem + ".csv"), heatmap_csv(scene.candidates, scores));
  const std::size_t grids = grid_count(scene);
  for (std::size_t g = 0; g < grids; ++g) {
    const std::string name = grids == 1 ? stem + ".pgm" : stem + "_g" + std::to_string(g) + ".pgm";
    write_file(out_path(config, name), heatmap_pgm(scene.candidates, scores, maxval, g));
  }
}

}  // namespace

int cmd_simulate(const RunConfig& config, std::ostream& out) {
  const Simulation sim = simulate(config);
  write_file(out_path(config, "contributions.csv"), contributions_csv(sim.matrix));
  const StateSpace space{sim.scene.luminaire_count(), sim.states.size()};
  out << "points=" << sim.matrix.points() << " door_states=" << sim.states.size()
      << " luminaires=" << sim.scene.luminaire_count() << " application_states=" << space.total()
      << " rows=" << sim.matrix.points() * sim.states.size() << " seconds=" << sim.seconds << "\n";
  return kOk;
}

int cmd_heatmap(const RunConfig& config, std::ostream& out) {
  const Simulation sim = simulate(config);
  const StateSpace space{sim.scene.luminaire_count(), sim.states.size()};
  const auto table = distinctness_table(sim.matrix, config.tau, config.threads);
  std::vector<std::size_t> total(sim.matrix.points(), 0);
  for (std::size_t q = 0; q < table.size(); ++q) {
    write_heatmap(config, sim.scene, "heatmap_q" + std::to_string(q), table[q], space.configs());
    for (std::size_t p = 0; p < total.size(); ++p) total[p] += table[q][p];
    out << "q" << q << " doors=" << state_label(sim.states[q])
        << " max=" << *std::max_element(table[q].begin(), table[q].end()) << "/" << space.configs() << "\n";
  }
  write_heatmap(config, sim.scene, "heatmap_total", total, space.total());
  out << "total max=" << *std::max_element(total.begin(), total.end()) << "/" << space.total() << "\n";
  return kOk;
}

int cmd_solve_cover(const RunConfig& config, std::ostream& out) {
  const Simulation sim = simulate(config);
  std::vector<std::size_t> qs;
  if (config.universe == "open-door") qs = open_door_states(sim.scene, sim.states);
  const CoverInstance inst = build_cover_instance(sim.matrix, config.tau, qs, config.threads);
  const CoverSolution sol = config.exact ? exact_min_cover(inst) : greedy_set_cover(inst);
  const std::string report = cover_report(sol, inst, sim.scene.candidates);
  write_file(out_path(config, config.exact ? "cover_exact.csv" : "cover_greedy.csv"), report);
  out << report;
  return kOk;
}

int cmd_infer(const RunConfig& config, const std::string& readings_path, std::ostream& out) {
  const Scene scene = scene_for(config);
  const auto states = enumerate_door_states(scene);
  const std::size_t n = scene.luminaire_count();
  if (!std::filesystem::exists(readings_path)) throw IoError("readings file not found: " + readings_path);
  const std::string text = read_file(readings_path);
  auto lines = split(text, '\n');
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty() || trim(lines[0]) != "reading_id,point_index,door_state,truth_p,lux")
    throw ParseError("readings header must be reading_id,point_index,door_state,truth_p,lux", 1, 1);

  const NoiseModel noise = config.sigma > 0.0 ? NoiseModel::gaussian(config.sigma, config.seed) : NoiseModel::none();
  struct Group {
    std::vector<VoteVector> votes;
    std::optional<LightConfig> truth;
  };
  std::map<unsigned long long, Group> groups;
  std::string report = "point_index,door_state,config_p,n_candidates,accuracy,no_solution\n";
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto f = split(trim(lines[li]), ',');
    if (f.size() != 5) throw ParseError("expected 5 fields", li + 1, 1);
    unsigned long long id = 0, point = 0, q = 0, p = 0;
    if (!parse_u64(f[0], id) || !parse_u64(f[1], point) || !parse_u64(f[2], q))
      throw ParseError("bad index field", li + 1, 1);
    if (point >= scene.candidates.size()) throw ValidationError("point_index out of range on line " + std::to_string(li + 1));
    if (q >= states.size()) throw ValidationError("door_state out of range on line " + std::to_string(li + 1));
    std::optional<LightConfig> truth;
    if (!trim(f[3]).empty()) {
      if (!parse_u64(f[3], p)) throw ParseError("bad truth_p", li + 1, 1);
      if (p >= (1ULL << n)) throw ValidationError("truth_p out of range on line " + std::to_string(li + 1));
      truth = LightConfig{static_cast<std::uint32_t>(p), n};
    }
    const ContributionVector x = contribution_vector(scene, states[q], scene.candidates[point], point, q);
    double lux = 0.0;
    if (trim(f[4]).empty()) {
      if (!truth) throw ParseError("a blank lux needs truth_p to synthesize the reading", li + 1, 1);
      lux = reading(x, *truth, noise);
    } else if (!parse_double(f[4], lux)) {
      throw ParseError("bad lux", li + 1, 1);
    }

    const InferenceResult r =
        infer({x.values, lux, config.epsilon}, truth.value_or(LightConfig::all_off(n)), config.nearest);
    report += std::to_string(point) + "," + std::to_string(q) + "," + (truth ? std::to_string(truth->mask) : "") +
              "," + std::to_string(r.candidates.size()) + "," + (truth ? sig6(r.mean_accuracy) : "") + "," +
              (r.no_solution ? "1" : "0") + "\n";
    auto& g = groups[id];
    g.votes.push_back(sensor_votes(x, r.candidates, in_range(x)));
    if (truth) g.truth = truth;
  }

  std::string fused = "reading_id,sensors,fused_p,truth_p,accuracy,ties\n";
  std::vector<double> accs;
  for (const auto& [id, g] : groups) {
    const FusedVerdict v = fuse_votes(g.votes);
    std::string acc;
    if (g.truth) {
      const double a = jaccard_accuracy(*g.truth, std::span<const LightConfig>(&v.config, 1));
      accs.push_back(a);
      acc = sig6(a);
    }
    fused += std::to_string(id) + "," + std::to_string(g.votes.size()) + "," + std::to_string(v.config.mask) + "," +
             (g.truth ? std::to_string(g.truth->mask) : "") + "," + acc + "," + std::to_string(v.ties.size()) + "\n";
  }
  write_file(out_path(config, "inference_report.csv"), report);
  write_file(out_path(config, "fused.csv"), fused);
  const AccuracyStats s = summarize(accs);
  out << "readings=" << lines.size() - 1 << " groups=" << groups.size() << " fused_mean_accuracy=" << s.mean << "\n";
  return kOk;
}

int cmd_ingest(const RunConfig& config, const std::string& samples_path, const std::string& commands_path,
               std::size_t luminaires, double settle, double window, bool least_squares, std::ostream& out) {
  check(config);
  if (!std::filesystem::exists(samples_path)) throw IoError("samples file not found: " + samples_path);
  if (!std::filesystem::exists(commands_path)) throw IoError("command log not found: " + commands_path);
  if (luminaires == 0 && !config.scene_path.empty()) luminaires = scene_for(config).luminaire_count();
  if (luminaires == 0) throw IoError("pass --scene or --luminaires to size the command bitmask");

  const SampleLog samples = parse_samples_csv(read_file(samples_path));
  const CommandLog commands = parse_commands_csv(read_file(commands_path), luminaires);
  BaselineTable table = extract_baselines(samples, commands, settle, window);
  table.luminaires = luminaires;

  std::map<std::size_t, Calibration> cals;
  for (std::size_t loc : table.locations())
    cals[loc] = least_squares ? calibrate_least_squares(table, loc) : calibrate_contributions(table, loc);
  const auto rows = evaluate_locations(table, cals, config.epsilon);
  write_file(out_path(config, "accuracy_by_location.csv"), accuracy_csv(rows));
  const FusionResult fusion = evaluate_fusion(table, cals, config.epsilon);

  out << "locations=" << rows.size() << " cells=" << table.cells.size() << " issues=" << table.issues.size()
      << " fused_mean_accuracy=" << fusion.stats.mean << "\n";
  for (const auto& issue : table.issues)
    out << "issue location=" << issue.location << " config=" << issue.config << " t=" << issue.t << ": "
        << issue.reason << "\n";
  for (const auto& [loc, cal] : cals)
    for (std::size_t i : cal.clamped) out << "clamped location=" << loc << " luminaire=" << i << "\n";
  return kOk;
}

int cmd_synth_log(const RunConfig& config, const std::vector<std::size_t>& points, std::size_t door_state,
                  double background, std::ostream& out) {
  const Scene scene = scene_for(config);
  const auto states = enumerate_door_states(scene);
  if (door_state >= states.size()) throw ValidationError("--door-state out of range");
  std::vector<ContributionVector> xs;
  for (std::size_t p : points) {
    if (p >= scene.candidates.size()) throw ValidationError("point " + std::to_string(p) + " out of range");
    xs.push_back(contribution_vector(scene, states[door_state], scene.candidates[p], p, door_state));
  }
  const std::size_t n = scene.luminaire_count();
  std::vector<LightConfig> sequence;
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << n); ++m) sequence.push_back({m, n});
  SynthesisOptions opts;
  opts.background = background;
  opts.noise = config.sigma > 0.0 ? NoiseModel::gaussian(config.sigma, config.seed) : NoiseModel::none();
  const auto [samples, commands] = synthesize_logs(xs, sequence, opts);
  write_file(out_path(config, "samples.csv"), samples_csv(samples));
  write_file(out_path(config, "commands.csv"), commands_csv(commands));
  out << "locations=" << xs.size() << " commands=" << commands.rows.size() << " samples=" << samples.rows.size()
      << "\n";
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Light-sensor placement planning and light-state inference"};
  app.require_subcommand(1);
  RunConfig config;
  double spacing = 0.0;

  const auto common = [&](CLI::App* sub, bool needs_scene) {
    auto* scene = sub->add_option("--scene", config.scene_path, "Scene description file");
    if (needs_scene) scene->required();
    sub->add_option("--tau", config.tau, "Distinctness threshold (lux)")->capture_default_str();
    sub->add_option("--epsilon", config.epsilon, "Perfect-sum tolerance (lux)")->capture_default_str();
    sub->add_option("--sigma", config.sigma, "Gaussian reading noise (lux)")->capture_default_str();
    sub->add_option("--seed", config.seed, "Random seed")->capture_default_str();
    sub->add_option("--grid-spacing", spacing, "Override grid spacing (m)");
    sub->add_option("--out", config.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--threads", config.threads, "Worker threads (0 = all cores)");
  };

  auto* simulate_cmd = app.add_subcommand("simulate", "Write per-luminaire contributions for every grid point");
  common(simulate_cmd, true);
  auto* heatmap_cmd = app.add_subcommand("heatmap", "Distinctness heatmaps per door state and aggregated");
  common(heatmap_cmd, true);
  auto* cover_cmd = app.add_subcommand("solve-cover", "Sensor set covering the application states");
  common(cover_cmd, true);
  cover_cmd->add_option("--universe", config.universe, "full | open-door")
      ->check(CLI::IsMember({"full", "open-door"}))
      ->capture_default_str();
  cover_cmd->add_flag("--exact", config.exact, "Exact branch and bound (small universes only)");

  auto* infer_cmd = app.add_subcommand("infer", "Perfect-sum inference and vote fusion for readings");
  common(infer_cmd, true);
  std::string readings;
  infer_cmd->add_option("--readings", readings, "CSV: reading_id,point_index,door_state,truth_p,lux")->required();
  infer_cmd->add_flag("--nearest", config.nearest, "Fall back to the nearest subset sums when none is within epsilon");

  auto* ingest_cmd = app.add_subcommand("ingest", "Baselines, calibration and accuracy from logged samples");
  common(ingest_cmd, false);
  std::string samples, commands;
  std::size_t luminaires = 0;
  double settle = 3.0, window = 3.0;
  bool least_squares = false;
  ingest_cmd->add_option("--samples", samples, "CSV: t,location,lux")->required();
  ingest_cmd->add_option("--commands", commands, "CSV: t,bitmask")->required();
  ingest_cmd->add_option("--luminaires", luminaires, "Luminaire count (or take it from --scene)");
  ingest_cmd->add_option("--settle", settle, "Seconds discarded after each command")->capture_default_str();
  ingest_cmd->add_option("--window", window, "Averaging window (s)")->capture_default_str();
  ingest_cmd->add_flag("--least-squares", least_squares, "Fit contributions over all baselines");

  auto* synth_cmd = app.add_subcommand("synth-log", "Synthetic sample and command logs for chosen points");
  common(synth_cmd, true);
  std::vector<std::size_t> points;
  std::size_t door_state = 0;
  double background = 0.0;
  synth_cmd->add_option("--points", points, "Candidate point indices")->required()->delimiter(',');
  synth_cmd->add_option("--door-state", door_state, "Door state index")->capture_default_str();
  synth_cmd->add_option("--background", background, "Constant ambient lux")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (spacing > 0.0) config.grid_spacing = spacing;
  else if (spacing < 0.0) {
    err << "error: --grid-spacing must be positive\n";
    return kInvalidInput;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(config, out);
    if (*heatmap_cmd) return cmd_heatmap(config, out);
    if (*cover_cmd) return cmd_solve_cover(config, out);
    if (*infer_cmd) return cmd_infer(config, readings, out);
    if (*ingest_cmd)
      return cmd_ingest(config, samples, commands, luminaires, settle, window, least_squares, out);
    if (*synth_cmd) return cmd_synth_log(config, points, door_state, background, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kUsage;
}

}  // namespace lightplan::cli
