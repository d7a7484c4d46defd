#include "lightplan/transport.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "lightplan/errors.hpp"
#include "lightplan/parallel.hpp"
#include "lightplan/random.hpp"
#include "lightplan/text.hpp"

namespace lightplan {

std::size_t LightConfig::count_on() const { return static_cast<std::size_t>(std::popcount(mask)); }

LightConfig LightConfig::from_bits(std::span<const int> bits) {
  if (bits.size() > 32) throw ValidationError("light configuration longer than 32 bits");
  LightConfig c{0, bits.size()};
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) c.mask |= std::uint32_t{1} << i;
  return c;
}

LightConfig LightConfig::all_on(std::size_t n) {
  return {n >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << n) - 1, n};
}

double subset_sum(std::span<const double> x, std::uint32_t mask) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if ((mask >> i) & 1u) s += x[i];
  return s;
}

double contribution(std::span<const WallSegment> occluders, const Luminaire& luminaire, const CandidatePoint& point) {
  const Vec3 d{point.position.x - luminaire.position.x, point.position.y - luminaire.position.y,
               point.height - luminaire.mount_height};
  const double dist2 = dot(d, d);
  if (!(dist2 > 0.0)) throw ValidationError("sensor point coincides with luminaire '" + luminaire.label + "'");

  for (const auto& w : occluders)
    if (blocks(w, luminaire.position, point.position)) return 0.0;

  const double dist = std::sqrt(dist2);
  double cos_sensor = 1.0;
  if (point.normal) {
    // Incoming direction seen from the sensor is -d.
    cos_sensor = std::max(0.0, -dot(*point.normal, d) / dist);
    if (cos_sensor == 0.0) return 0.0;
  }
  const double vertical_deg = std::acos(std::clamp(-d.z / dist, -1.0, 1.0)) * 180.0 / M_PI;
  const double horizontal_deg = std::atan2(d.y, d.x) * 180.0 / M_PI;
  const double candela = luminaire.intensity * luminaire.profile.relative_intensity(vertical_deg, horizontal_deg);
  return candela * cos_sensor / dist2;
}

double contribution(const Scene& scene, const DoorState& door_state, const Luminaire& luminaire,
                    const CandidatePoint& point) {
  const auto occ = occluders(scene, door_state);
  return contribution(occ, luminaire, point);
}

ContributionVector contribution_vector(const Scene& scene, const DoorState& door_state, const CandidatePoint& point,
                                       std::size_t point_index, std::size_t door_state_index) {
  const auto occ = occluders(scene, door_state);
  ContributionVector out;
  out.point_index = point_index;
  out.door_state_index = door_state_index;
  out.values.reserve(scene.luminaires.size());
  for (const auto& l : scene.luminaires) out.values.push_back(contribution(occ, l, point));
  return out;
}

double reading(const ContributionVector& x, const LightConfig& config, const NoiseModel& noise) {
  if (config.n != x.size())
    throw ValidationError("configuration has " + std::to_string(config.n) + " bits for " +
                          std::to_string(x.size()) + " contributions");
  double value = subset_sum(x.values, config.mask);
  if (noise.kind == NoiseModel::Kind::gaussian && noise.sigma > 0.0) {
    const auto key = stream_key(noise.seed, {x.point_index, x.door_state_index, config.mask});
    value += noise.sigma * standard_normal(key);
  }
  return std::max(0.0, value);
}

ContributionVector ContributionMatrix::vector(std::size_t point, std::size_t q) const {
  const auto v = at(point, q);
  return {{v.begin(), v.end()}, point, q};
}

ContributionMatrix sweep(const Scene& scene, std::span<const DoorState> door_states,
                         std::span<const CandidatePoint> candidates, unsigned threads) {
  std::vector<std::vector<WallSegment>> occ;
  occ.reserve(door_states.size());
  for (const auto& s : door_states) occ.push_back(occluders(scene, s));

  ContributionMatrix m(candidates.size(), door_states.size(), scene.luminaires.size());
  parallel_for(
      candidates.size(),
      [&](std::size_t p) {
        for (std::size_t q = 0; q < door_states.size(); ++q) {
          auto row = m.at(p, q);
          for (std::size_t i = 0; i < scene.luminaires.size(); ++i)
            row[i] = contribution(occ[q], scene.luminaires[i], candidates[p]);
        }
      },
      threads);
  return m;
}

std::string contributions_csv(const ContributionMatrix& m) {
  std::string out = "point_index,door_state";
  for (std::size_t i = 0; i < m.luminaires(); ++i) out += ",lum_" + std::to_string(i);
  out += "\n";
  for (std::size_t p = 0; p < m.points(); ++p) {
    for (std::size_t q = 0; q < m.door_states(); ++q) {
      out += std::to_string(p) + "," + std::to_string(q);
      for (double v : m.at(p, q)) out += "," + sig6(v);
      out += "\n";
    }
  }
  return out;
}

ContributionMatrix parse_contributions_csv(std::string_view text) {
  auto lines = split(text, '\n');
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("empty contributions file");
  const auto header = split(trim(lines[0]), ',');
  if (header.size() < 3 || header[0] != "point_index" || header[1] != "door_state")
    throw ParseError("bad contributions header", 1, 1);
  const std::size_t n = header.size() - 2;

  struct Row {
    std::size_t p, q;
    std::vector<double> v;
  };
  std::vector<Row> rows;
  std::size_t max_p = 0, max_q = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split(trim(lines[li]), ',');
    if (fields.size() != n + 2) throw ParseError("expected " + std::to_string(n + 2) + " fields", li + 1, 1);
    unsigned long long p = 0, q = 0;
    if (!parse_u64(fields[0], p) || !parse_u64(fields[1], q)) throw ParseError("bad index", li + 1, 1);
    Row r{static_cast<std::size_t>(p), static_cast<std::size_t>(q), {}};
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.0;
      if (!parse_double(fields[i + 2], v) || v < 0.0) throw ParseError("bad lux value", li + 1, 1);
      r.v.push_back(v);
    }
    max_p = std::max(max_p, r.p);
    max_q = std::max(max_q, r.q);
    rows.push_back(std::move(r));
  }
  ContributionMatrix m(rows.empty() ? 0 : max_p + 1, rows.empty() ? 0 : max_q + 1, n);
  if (rows.size() != m.points() * m.door_states()) throw ParseError("contributions table is not dense");
  for (const auto& r : rows) std::copy(r.v.begin(), r.v.end(), m.at(r.p, r.q).begin());
  return m;
}

}  // namespace lightplan
