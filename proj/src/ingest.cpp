#include "lightplan/ingest.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "lightplan/errors.hpp"
#include "lightplan/random.hpp"
#include "lightplan/text.hpp"

namespace lightplan {
namespace {

std::vector<std::vector<std::string_view>> csv_rows(std::string_view text, std::string_view expected_header) {
  auto lines = split(text, '\n');
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty() || trim(lines[0]) != expected_header)
    throw ParseError("expected header '" + std::string(expected_header) + "'", 1, 1);
  std::vector<std::vector<std::string_view>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    rows.push_back(split(trim(lines[i]), ','));
  }
  return rows;
}

double field_double(std::string_view f, std::size_t line, const char* what) {
  double v = 0.0;
  if (!parse_double(f, v)) throw ParseError(std::string("bad ") + what + " '" + std::string(f) + "'", line, 1);
  return v;
}

}  // namespace

SampleLog parse_samples_csv(std::string_view text) {
  SampleLog log;
  std::map<std::size_t, double> last_t;
  std::size_t line = 1;
  for (const auto& f : csv_rows(text, "t,location,lux")) {
    ++line;
    if (f.size() != 3) throw ParseError("expected 3 fields", line, 1);
    Sample s;
    s.t = field_double(f[0], line, "timestamp");
    unsigned long long loc = 0;
    if (!parse_u64(f[1], loc)) throw ParseError("bad location '" + std::string(f[1]) + "'", line, 1);
    s.location = static_cast<std::size_t>(loc);
    s.lux = field_double(f[2], line, "lux");
    if (s.lux < 0.0 || s.lux > kMaxLux)
      throw ValidationError("line " + std::to_string(line) + ": lux " + shortest(s.lux) + " outside [0, 88000]");
    if (auto it = last_t.find(s.location); it != last_t.end() && s.t < it->second)
      throw ValidationError("line " + std::to_string(line) + ": timestamps go backwards for location " +
                            std::to_string(s.location));
    last_t[s.location] = s.t;
    log.rows.push_back(s);
  }
  return log;
}

CommandLog parse_commands_csv(std::string_view text, std::size_t luminaires) {
  if (luminaires > kMaxLuminaires) throw ValidationError("too many luminaires");
  CommandLog log;
  std::size_t line = 1;
  for (const auto& f : csv_rows(text, "t,bitmask")) {
    ++line;
    if (f.size() != 2) throw ParseError("expected 2 fields", line, 1);
    Command c;
    c.t = field_double(f[0], line, "timestamp");
    unsigned long long p = 0;
    if (!parse_u64(f[1], p)) throw ParseError("bad bitmask '" + std::string(f[1]) + "'", line, 1);
    if (p >= (1ULL << luminaires))
      throw ValidationError("line " + std::to_string(line) + ": bitmask " + std::to_string(p) + " exceeds " +
                            std::to_string(luminaires) + " luminaires");
    c.config = {static_cast<std::uint32_t>(p), luminaires};
    if (!log.rows.empty() && !(c.t > log.rows.back().t))
      throw ValidationError("line " + std::to_string(line) + ": command timestamps must be strictly increasing");
    log.rows.push_back(c);
  }
  return log;
}

std::string samples_csv(const SampleLog& log) {
  std::string out = "t,location,lux\n";
  for (const auto& s : log.rows) out += shortest(s.t) + "," + std::to_string(s.location) + "," + shortest(s.lux) + "\n";
  return out;
}

std::string commands_csv(const CommandLog& log) {
  std::string out = "t,bitmask\n";
  for (const auto& c : log.rows) out += shortest(c.t) + "," + std::to_string(c.config.mask) + "\n";
  return out;
}

const BaselineCell* BaselineTable::find(std::size_t location, std::uint32_t config) const {
  const auto it = cells.find({location, config});
  return it == cells.end() ? nullptr : &it->second;
}

std::vector<std::size_t> BaselineTable::locations() const {
  std::vector<std::size_t> out;
  for (const auto& [key, cell] : cells)
    if (out.empty() || out.back() != key.first) out.push_back(key.first);
  return out;
}

BaselineTable extract_baselines(const SampleLog& samples, const CommandLog& commands, double settle, double window) {
  if (!(settle >= 0.0) || !(window > 0.0)) throw ValidationError("settle must be >= 0 and window > 0");
  BaselineTable table;
  if (!commands.rows.empty()) table.luminaires = commands.rows.front().config.n;

  std::map<std::size_t, std::vector<std::pair<double, double>>> by_location;  // (t, lux)
  for (const auto& s : samples.rows) by_location[s.location].emplace_back(s.t, s.lux);

  const double needed = settle + window;
  for (auto& [location, series] : by_location) {
    std::stable_sort(series.begin(), series.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::map<std::uint32_t, std::vector<double>> pooled;
    for (std::size_t k = 0; k < commands.rows.size(); ++k) {
      const Command& c = commands.rows[k];
      double end = c.t + needed;
      if (k + 1 < commands.rows.size()) {
        const double next = commands.rows[k + 1].t;
        if (next - c.t < needed - 1e-9) {
          table.issues.push_back({location, c.config.mask, c.t, "interval shorter than settle + window"});
          continue;
        }
        end = std::min(end, next);
      }
      const double begin = c.t + settle;
      auto lo = std::lower_bound(series.begin(), series.end(), begin,
                                 [](const auto& s, double t) { return s.first < t; });
      auto& bucket = pooled[c.config.mask];
      std::size_t added = 0;
      for (; lo != series.end() && lo->first < end; ++lo, ++added) bucket.push_back(lo->second);
      if (added == 0) table.issues.push_back({location, c.config.mask, c.t, "no samples in averaging window"});
    }
    for (const auto& [p, values] : pooled) {
      if (values.empty()) continue;
      BaselineCell cell;
      cell.count = values.size();
      cell.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(cell.count);
      double ss = 0.0;
      for (double v : values) ss += (v - cell.mean) * (v - cell.mean);
      cell.stddev = std::sqrt(ss / static_cast<double>(cell.count));
      table.cells[{location, p}] = cell;
    }
  }
  return table;
}

Calibration calibrate_contributions(const BaselineTable& table, std::size_t location) {
  const std::size_t n = table.luminaires;
  const BaselineCell* off = table.find(location, 0);
  if (!off) throw ValidationError("location " + std::to_string(location) + " has no all-off baseline");
  Calibration cal;
  cal.background = off->mean;
  cal.x.point_index = location;
  cal.x.values.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const BaselineCell* single = table.find(location, std::uint32_t{1} << i);
    if (!single)
      throw ValidationError("location " + std::to_string(location) + " has no baseline with only luminaire " +
                            std::to_string(i) + " on");
    const double x = single->mean - off->mean;
    if (x < 0.0) cal.clamped.push_back(i);
    cal.x.values[i] = std::max(0.0, x);
  }
  return cal;
}

Calibration calibrate_least_squares(const BaselineTable& table, std::size_t location) {
  const std::size_t n = table.luminaires;
  std::vector<std::pair<std::uint32_t, double>> obs;
  for (const auto& [key, cell] : table.cells)
    if (key.first == location) obs.emplace_back(key.second, cell.mean);
  if (obs.size() < n + 1)
    throw ValidationError("location " + std::to_string(location) + " has too few baselines for a least-squares fit");

  Eigen::MatrixXd a(obs.size(), n + 1);
  Eigen::VectorXd b(obs.size());
  for (std::size_t r = 0; r < obs.size(); ++r) {
    a(r, 0) = 1.0;
    for (std::size_t i = 0; i < n; ++i) a(r, i + 1) = ((obs[r].first >> i) & 1u) ? 1.0 : 0.0;
    b(r) = obs[r].second;
  }
  const auto qr = a.colPivHouseholderQr();
  if (qr.rank() < static_cast<Eigen::Index>(n + 1))
    throw ValidationError("baselines at location " + std::to_string(location) + " do not determine every luminaire");
  const Eigen::VectorXd sol = qr.solve(b);

  Calibration cal;
  cal.background = sol(0);
  cal.x.point_index = location;
  for (std::size_t i = 0; i < n; ++i) {
    if (sol(i + 1) < 0.0) cal.clamped.push_back(i);
    cal.x.values.push_back(std::max(0.0, sol(i + 1)));
  }
  return cal;
}

AccuracyStats summarize(std::vector<double> values) {
  AccuracyStats s;
  s.n = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return s;
}

std::vector<LocationAccuracy> evaluate_locations(const BaselineTable& table,
                                                 const std::map<std::size_t, Calibration>& calibrations,
                                                 double epsilon) {
  std::vector<LocationAccuracy> out;
  for (const auto& [location, cal] : calibrations) {
    LocationAccuracy acc;
    acc.location = location;
    std::vector<double> scores;
    for (const auto& [key, cell] : table.cells) {
      if (key.first != location) continue;
      const LightConfig truth{key.second, table.luminaires};
      const PerfectSumQuery query{cal.x.values, cell.mean - cal.background, epsilon};
      const InferenceResult r = infer(query, truth);
      acc.records.push_back({location, 0, key.second, r.candidates.size(), r.mean_accuracy, r.no_solution});
      scores.push_back(r.mean_accuracy);
    }
    acc.stats = summarize(std::move(scores));
    out.push_back(std::move(acc));
  }
  return out;
}

FusionResult evaluate_fusion(const BaselineTable& table, const std::map<std::size_t, Calibration>& calibrations,
                             double epsilon) {
  FusionResult result;
  if (calibrations.empty()) return result;
  std::vector<double> scores;
  const std::size_t configs = std::size_t{1} << table.luminaires;
  for (std::uint32_t p = 0; p < configs; ++p) {
    std::vector<VoteVector> votes;
    for (const auto& [location, cal] : calibrations) {
      const BaselineCell* cell = table.find(location, p);
      if (!cell) break;
      const auto candidates = perfect_sum({cal.x.values, cell->mean - cal.background, epsilon});
      votes.push_back(sensor_votes(cal.x, candidates, in_range(cal.x)));
    }
    if (votes.size() != calibrations.size()) continue;
    const FusedVerdict verdict = fuse_votes(votes);
    result.ties += verdict.ties.size();
    const LightConfig truth{p, table.luminaires};
    const double acc = jaccard_accuracy(truth, std::span<const LightConfig>(&verdict.config, 1));
    result.per_config.emplace_back(p, acc);
    scores.push_back(acc);
  }
  result.stats = summarize(std::move(scores));
  return result;
}

std::string accuracy_csv(std::span<const LocationAccuracy> rows) {
  std::string out = "location,min,q1,median,mean,q3,max,n\n";
  for (const auto& r : rows) {
    const auto& s = r.stats;
    out += std::to_string(r.location) + "," + sig6(s.min) + "," + sig6(s.q1) + "," + sig6(s.median) + "," +
           sig6(s.mean) + "," + sig6(s.q3) + "," + sig6(s.max) + "," + std::to_string(s.n) + "\n";
  }
  return out;
}

std::pair<SampleLog, CommandLog> synthesize_logs(std::span<const ContributionVector> locations,
                                                 std::span<const LightConfig> sequence,
                                                 const SynthesisOptions& options) {
  if (!(options.rate_hz > 0.0) || !(options.dwell > 0.0)) throw ValidationError("rate and dwell must be positive");
  SampleLog samples;
  CommandLog commands;
  for (std::size_t j = 0; j < sequence.size(); ++j)
    commands.rows.push_back({options.start + static_cast<double>(j) * options.dwell, sequence[j]});

  const double duration = options.dwell * static_cast<double>(sequence.size());
  const auto total = static_cast<std::size_t>(std::ceil(duration * options.rate_hz));
  for (std::size_t k = 0; k < total; ++k) {
    const double rel = static_cast<double>(k) / options.rate_hz;
    if (rel >= duration) break;
    const auto j = std::min(sequence.size() - 1, static_cast<std::size_t>(rel / options.dwell));
    const double since = rel - static_cast<double>(j) * options.dwell;
    for (std::size_t loc = 0; loc < locations.size(); ++loc) {
      const auto& x = locations[loc].values;
      double level = options.background + subset_sum(x, sequence[j].mask);
      if (options.ramp > 0.0 && since < options.ramp) {
        const double prev = options.background + (j > 0 ? subset_sum(x, sequence[j - 1].mask) : 0.0);
        level = prev + (level - prev) * (since / options.ramp);
      }
      if (options.noise.kind == NoiseModel::Kind::gaussian && options.noise.sigma > 0.0)
        level += options.noise.sigma * standard_normal(stream_key(options.noise.seed, {loc, k}));
      samples.rows.push_back({options.start + rel, locations[loc].point_index, std::clamp(level, 0.0, kMaxLux)});
    }
  }
  return {std::move(samples), std::move(commands)};
}

}  // namespace lightplan
