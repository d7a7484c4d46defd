// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <algorithm>
#include <bit>
#include <cfloat>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lightplan/inference.hpp"
#include "lightplan/ingest.hpp"
#include "lightplan/planning.hpp"
#include "lightplan/scene.hpp"
#include "lightplan/transport.hpp"

using namespace lightplan;

namespace {

using Clock = std::chrono::steady_clock;
using Rng = std::mt19937_64;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }
double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Shared apartment data, computed once.
struct Apartment {
  Scene scene;
  std::vector<DoorState> states;
  ContributionMatrix matrix;
  std::vector<std::vector<std::size_t>> table;
  std::vector<std::size_t> open;
  double load_seconds = 0, sweep_seconds = 0, table_seconds = 0;
};

const Apartment& apartment() {
  static const Apartment a = [] {
    Apartment a;
    auto t0 = Clock::now();
    a.scene = load_scene(std::string(LIGHTPLAN_DATA_DIR) + "/apartment.scene");
    a.states = enumerate_door_states(a.scene);
    a.open = open_door_states(a.scene, a.states);
    a.load_seconds = seconds_since(t0);
    t0 = Clock::now();
    a.matrix = sweep(a.scene, a.states, a.scene.candidates);
    a.sweep_seconds = seconds_since(t0);
    t0 = Clock::now();
    a.table = distinctness_table(a.matrix, kDefaultTau);
    a.table_seconds = seconds_since(t0);
    return a;
  }();
  return a;
}

std::vector<std::uint32_t> masks_of(const std::vector<LightConfig>& cs) {
  std::vector<std::uint32_t> out;
  for (const auto& c : cs) out.push_back(c.mask);
  return out;
}

std::vector<std::uint32_t> brute_force_perfect_sum(const std::vector<double>& x, double k, double eps) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t m = 0; m < (1u << x.size()); ++m) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (m & (1u << i)) s += x[i];
    if (std::abs(s - k) <= eps) out.push_back(m);
  }
  return out;
}

std::size_t exhaustive_min_cover(const CoverInstance& inst) {
  DynamicBitset target(inst.universe_size);
  for (const auto& s : inst.sets) target |= s;
  std::size_t best = inst.sets.size();
  for (std::size_t m = 0; m < (std::size_t{1} << inst.sets.size()); ++m) {
    const auto k = static_cast<std::size_t>(std::popcount(m));
    if (k >= best) continue;
    DynamicBitset u(inst.universe_size);
    for (std::size_t i = 0; i < inst.sets.size(); ++i)
      if (m & (std::size_t{1} << i)) u |= inst.sets[i];
    if (u == target) best = k;
  }
  return best;
}

Verdict distinctness_example() {
  const std::vector<double> v{1, 2, 4};
  const auto t0 = Clock::now();
  const auto d1 = distinctness_vector(v, 1.0);
  const auto d05 = distinctness_vector(v, 0.5);
  const double ms = seconds_since(t0) * 1e3;
  const bool ok = d1.flags == std::vector<std::uint8_t>{0, 0, 1} && d1.score() == 1 &&
                  d05.flags == std::vector<std::uint8_t>{1, 1, 1} && d05.score() == 3 && ms < 1.0;
  return {ok, fmt("tau=1 -> [%d,%d,%d] score %zu; tau=0.5 score %zu; %.4f ms", d1.flags[0], d1.flags[1], d1.flags[2],
                  d1.score(), d05.score(), ms)};
}

Verdict perfect_sum_example() {
  const auto got = masks_of(perfect_sum({{2, 3, 4, 5}, 7, 0}));
  // {3,4} -> bits 1,2; {2,5} -> bits 0,3
  const bool ok = got == std::vector<std::uint32_t>{0b0110, 0b1001};
  std::string sets;
  const double vals[] = {2, 3, 4, 5};
  for (auto m : got) {
    sets += " {";
    for (int i = 0; i < 4; ++i)
      if (m & (1u << i)) sets += fmt("%g,", vals[i]);
    sets.back() = '}';
  }
  return {ok, fmt("%zu solutions:%s", got.size(), sets.c_str())};
}

Verdict open_door_single_sensor() {
  const auto t0 = Clock::now();
  const auto& a = apartment();
  if (a.open.size() != 1) return {false, "expected exactly one open-door state"};
  const auto& row = a.table[a.open[0]];
  const auto best = *std::max_element(row.begin(), row.end());
  const auto reach = std::count(row.begin(), row.end(), std::size_t{64});
  const auto inst = build_cover_instance(a.matrix, kDefaultTau, a.open);
  const auto sol = greedy_set_cover(inst);
  const double secs = seconds_since(t0);
  const bool ok = best == 64 && sol.chosen.size() == 1 && sol.complete && a.matrix.points() >= 2000 && secs < 60;
  return {ok, fmt("points=%zu max distinctness=%zu/64 (%ld cells), greedy cover=%zu covering %zu/%zu, %.3f s",
                  a.matrix.points(), best, static_cast<long>(reach), sol.chosen.size(), sol.covered.count(),
                  inst.universe_size, secs)};
}

Verdict dynamic_door_growth() {
  const auto& a = apartment();
  const auto open = greedy_set_cover(build_cover_instance(a.matrix, kDefaultTau, a.open));
  const auto full_inst = build_cover_instance(a.matrix, kDefaultTau);
  const auto full = greedy_set_cover(full_inst);
  const bool ok = full.chosen.size() > open.chosen.size() && full.chosen.size() >= 3;
  return {ok, fmt("full-universe greedy cover=%zu (open-door %zu), covered %zu/%zu states, complete=%s",
                  full.chosen.size(), open.chosen.size(), full.covered.count(), full_inst.universe_size,
                  full.complete ? "true" : "false")};
}

Verdict state_space() {
  const auto& a = apartment();
  const StateSpace space{a.scene.luminaire_count(), a.states.size()};
  const auto inst = build_cover_instance(a.matrix, kDefaultTau);
  const bool ok = space.configs() == 64 && space.door_states == 9 && space.total() == 576 && inst.universe_size == 576;
  return {ok, fmt("%zu configs x %zu door states = %zu application states", space.configs(), space.door_states,
                  space.total())};
}

Verdict perfect_sum_oracle() {
  Rng rng(2024);
  std::size_t mismatches = 0, hits = 0;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = uniform_index(rng, 1, 12);
    std::vector<double> x(n);
    const bool integral = trial % 3 == 0;
    for (auto& v : x) v = integral ? static_cast<double>(uniform_index(rng, 0, 15)) : uniform(rng, 0, 200);
    const auto truth = static_cast<std::uint32_t>(uniform_index(rng, 0, (1u << n) - 1));
    const double k = subset_sum(x, truth) + (trial % 2 ? uniform(rng, -1, 1) : 0.0);
    const double eps = trial % 4 == 0 ? 0.0 : uniform(rng, 0, 3);
    const auto got = masks_of(perfect_sum({x, k, eps}));
    hits += got.size();
    if (got != brute_force_perfect_sum(x, k, eps)) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 10,
          fmt("500 instances, %zu mismatches, %zu solutions total, %.3f s", mismatches, hits, secs)};
}

Verdict set_cover_guarantee() {
  Rng rng(77);
  std::size_t violations = 0, exact_wrong = 0, worst_greedy = 0, worst_exact = 0;
  double worst_ratio = 0;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 200; ++trial) {
    CoverInstance inst;
    inst.universe_size = uniform_index(rng, 1, 20);
    for (std::size_t e = 0; e < inst.universe_size; ++e) inst.labels.emplace_back(e, 0);
    const std::size_t sets = uniform_index(rng, 1, 14);
    const double density = uniform(rng, 0.1, 0.5);
    for (std::size_t s = 0; s < sets; ++s) {
      DynamicBitset b(inst.universe_size);
      for (std::size_t e = 0; e < inst.universe_size; ++e)
        if (uniform(rng, 0, 1) < density) b.set(e);
      inst.sets.push_back(b);
    }
    const auto greedy = greedy_set_cover(inst).chosen.size();
    const auto exact = exact_min_cover(inst).chosen.size();
    if (exact != exhaustive_min_cover(inst)) ++exact_wrong;
    std::size_t largest = 0;
    for (const auto& s : inst.sets) largest = std::max(largest, s.count());
    double h = 0;
    for (std::size_t i = 1; i <= largest; ++i) h += 1.0 / static_cast<double>(i);
    if (static_cast<double>(greedy) > h * static_cast<double>(exact) + 1e-12) ++violations;
    if (exact > 0 && static_cast<double>(greedy) / static_cast<double>(exact) > worst_ratio) {
      worst_ratio = static_cast<double>(greedy) / static_cast<double>(exact);
      worst_greedy = greedy;
      worst_exact = exact;
    }
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && exact_wrong == 0 && secs < 30,
          fmt("200 instances, %zu bound violations, %zu exact/exhaustive disagreements, worst greedy/exact %zu/%zu, "
              "%.3f s",
              violations, exact_wrong, worst_greedy, worst_exact, secs)};
}

Verdict physics() {
  Rng rng(8);
  // Additivity: bitwise on exactly representable contributions, and on the
  // apartment's simulated vectors up to summation round-off.
  std::size_t add_fail = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = uniform_index(rng, 1, 12);
    ContributionVector x{std::vector<double>(n), 0, 0};
    for (auto& v : x.values) v = std::ldexp(static_cast<double>(uniform_index(rng, 0, 1 << 20)), -10);
    const auto full = (1u << n) - 1;
    const auto m1 = static_cast<std::uint32_t>(uniform_index(rng, 0, full));
    const auto m2 = static_cast<std::uint32_t>(uniform_index(rng, 0, full)) & ~m1;
    if (reading(x, {m1 | m2, n}) != reading(x, {m1, n}) + reading(x, {m2, n})) ++add_fail;
  }
  const auto& a = apartment();
  double worst_rel = 0;
  for (std::size_t pt = 0; pt < a.matrix.points(); pt += 13)
    for (std::size_t q = 0; q < a.matrix.door_states(); ++q) {
      const auto x = a.matrix.vector(pt, q);
      for (std::uint32_t m1 = 0; m1 < 64; m1 += 5) {
        const std::uint32_t m2 = ~m1 & 63u & 0b101011u;
        const double split = reading(x, {m1, 6}) + reading(x, {m2, 6});
        const double joint = reading(x, {m1 | m2, 6});
        if (split > 0) worst_rel = std::max(worst_rel, std::abs(joint - split) / split);
      }
    }
  const bool additive = add_fail == 0 && worst_rel <= 6 * 4 * DBL_EPSILON;

  // Inverse square: isotropic source, no occluders.
  Luminaire lum;
  lum.label = "iso";
  lum.position = {0, 0};
  lum.mount_height = 2.5;
  lum.intensity = 250;
  double worst_isq = 0;
  for (int k = 0; k < 10000; ++k) {
    CandidatePoint p;
    p.position = {uniform(rng, -30, 30), uniform(rng, -30, 30)};
    p.height = uniform(rng, 0, 2.4);
    const double dz = p.height - 2.5;
    const double d2 = p.position.x * p.position.x + p.position.y * p.position.y + dz * dz;
    worst_isq = std::max(worst_isq, std::abs(contribution(std::vector<WallSegment>{}, lum, p) * d2 - 250) / 250);
  }

  // Occlusion monotonicity: adding walls never raises a contribution.
  std::size_t mono_fail = 0;
  for (int scene = 0; scene < 100; ++scene) {
    std::vector<WallSegment> walls;
    for (int k = 0; k < 5; ++k)
      walls.push_back({{uniform(rng, 0, 10), uniform(rng, 0, 10)}, {uniform(rng, 0, 10), uniform(rng, 0, 10)}});
    auto more = walls;
    for (int k = 0; k < 3; ++k)
      more.push_back({{uniform(rng, 0, 10), uniform(rng, 0, 10)}, {uniform(rng, 0, 10), uniform(rng, 0, 10)}});
    for (int k = 0; k < 50; ++k) {
      Luminaire l = lum;
      l.position = {uniform(rng, 0, 10), uniform(rng, 0, 10)};
      CandidatePoint p;
      p.position = {uniform(rng, 0, 10), uniform(rng, 0, 10)};
      p.height = 1.0;
      const double before = contribution(walls, l, p), after = contribution(more, l, p);
      if (after > before || (after != 0.0 && after != before)) ++mono_fail;
    }
  }
  return {additive && worst_isq <= 1e-9 && mono_fail == 0,
          fmt("additivity: %zu bitwise failures, worst simulated rel. gap %.2e; inverse-square worst rel. %.2e; "
              "occlusion monotonicity failures %zu/5000",
              add_fail, worst_rel, worst_isq, mono_fail)};
}

std::vector<LightConfig> all_configs(std::size_t n) {
  std::vector<LightConfig> out;
  for (std::uint32_t p = 0; p < (1u << n); ++p) out.push_back({p, n});
  return out;
}

Verdict round_trip() {
  const auto& a = apartment();
  const double eps = 0.01;
  const std::size_t q = a.open[0];

  std::vector<ContributionVector> separated;
  for (std::size_t pt = 0; pt < a.matrix.points(); ++pt) {
    auto sums = configuration_sums(a.matrix.at(pt, q));
    std::sort(sums.begin(), sums.end());
    bool ok = true;
    for (std::size_t i = 1; ok && i < sums.size(); ++i) ok = sums[i] - sums[i - 1] > 2 * eps;
    if (ok) separated.push_back(a.matrix.vector(pt, q));
  }
  const std::size_t used = std::min<std::size_t>(separated.size(), 40);
  std::vector<ContributionVector> locs;
  for (std::size_t k = 0; k < used; ++k) locs.push_back(separated[k * separated.size() / used]);
  SynthesisOptions opts;
  opts.background = 3.0;
  opts.ramp = 1.5;
  auto [samples, commands] = synthesize_logs(locs, all_configs(6), opts);
  auto table = extract_baselines(samples, commands);
  std::map<std::size_t, Calibration> cals;
  for (auto loc : table.locations()) cals[loc] = calibrate_contributions(table, loc);
  double worst_mean = 1.0;
  for (const auto& r : evaluate_locations(table, cals, eps)) worst_mean = std::min(worst_mean, r.stats.mean);
  const bool exact = used > 0 && worst_mean == 1.0;

  // Noise sweep over seven of the separated points.
  std::vector<ContributionVector> sweep_locs;
  for (std::size_t k = 0; k < 7 && k < separated.size(); ++k) sweep_locs.push_back(separated[k * separated.size() / 7]);
  std::vector<double> medians;
  bool monotone = true;
  for (double sigma : {0.0, 0.01, 0.05, 0.2, 1.0, 5.0}) {
    SynthesisOptions o;
    o.background = 3.0;
    o.noise = NoiseModel::gaussian(sigma, 1234);
    auto [s, c] = synthesize_logs(sweep_locs, all_configs(6), o);
    auto t = extract_baselines(s, c);
    std::map<std::size_t, Calibration> cc;
    for (auto loc : t.locations()) cc[loc] = calibrate_contributions(t, loc);
    std::vector<double> acc;
    for (const auto& r : evaluate_locations(t, cc, eps))
      for (const auto& rec : r.records) acc.push_back(rec.accuracy);
    const double m = summarize(acc).median;
    if (!medians.empty() && m > medians.back()) monotone = false;
    medians.push_back(m);
  }
  std::string ms;
  for (double m : medians) ms += fmt("%.3f ", m);
  return {exact && monotone, fmt("%zu/%zu separated points round-tripped, worst mean accuracy %.6f; medians over "
                                 "sigma {0,0.01,0.05,0.2,1,5}: %s",
                                 used, separated.size(), worst_mean, ms.c_str())};
}

Verdict throughput() {
  const auto& a = apartment();
  const double secs = a.sweep_seconds + a.table_seconds;
  const StateSpace space{a.scene.luminaire_count(), a.states.size()};
  return {secs < 60 && a.matrix.points() >= 2000,
          fmt("%zu points x %zu states: sweep %.3f s + distinctness %.3f s = %.3f s (limit 60 s)", a.matrix.points(),
              space.total(), a.sweep_seconds, a.table_seconds, secs)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 distinctness worked example", distinctness_example},
      {"2 perfect-sum ambiguity example", perfect_sum_example},
      {"3 open-door single sensor", open_door_single_sensor},
      {"4 dynamic-door cover growth", dynamic_door_growth},
      {"5 state-space accounting", state_space},
      {"6 perfect-sum oracle equivalence", perfect_sum_oracle},
      {"7 set-cover harmonic guarantee", set_cover_guarantee},
      {"8 physics properties", physics},
      {"9 round-trip accuracy", round_trip},
      {"10 throughput", throughput},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v{false, ""};
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
