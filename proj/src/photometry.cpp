#include "lightplan/photometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lightplan/errors.hpp"

namespace lightplan {
namespace {

// Index i such that grid[i] <= value <= grid[i+1] and the interpolation weight.
struct Bracket {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double w = 0.0;
};

Bracket bracket(const std::vector<double>& grid, double value) {
  if (grid.size() == 1 || value <= grid.front()) return {0, 0, 0.0};
  if (value >= grid.back()) return {grid.size() - 1, grid.size() - 1, 0.0};
  const auto it = std::upper_bound(grid.begin(), grid.end(), value);
  const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  const std::size_t lo = hi - 1;
  return {lo, hi, (value - grid[lo]) / (grid[hi] - grid[lo])};
}

double fold_horizontal(const std::vector<double>& h, double deg) {
  deg = std::fmod(deg, 360.0);
  if (deg < 0.0) deg += 360.0;
  const double last = h.back();
  if (h.size() == 1) return h.front();
  if (h.front() == 0.0 && last == 90.0) {
    if (deg > 180.0) deg = 360.0 - deg;
    if (deg > 90.0) deg = 180.0 - deg;
  } else if (h.front() == 0.0 && last == 180.0) {
    if (deg > 180.0) deg = 360.0 - deg;
  }
  return deg;
}

void require_increasing(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw ParseError(std::string("non-monotonic ") + what + " angle list");
}

}  // namespace

double PhotometricProfile::lookup(double vertical_deg, double horizontal_deg) const {
  if (candela.empty()) return 0.0;
  const Bracket v = bracket(vertical_angles, vertical_deg);
  const Bracket h = bracket(horizontal_angles, fold_horizontal(horizontal_angles, horizontal_deg));
  const auto at = [&](std::size_t hi, std::size_t vi) { return candela[hi][vi]; };
  const double c0 = at(h.lo, v.lo) + v.w * (at(h.lo, v.hi) - at(h.lo, v.lo));
  const double c1 = at(h.hi, v.lo) + v.w * (at(h.hi, v.hi) - at(h.hi, v.lo));
  return c0 + h.w * (c1 - c0);
}

double PhotometricProfile::peak() const {
  double best = 0.0;
  for (const auto& row : candela)
    for (double c : row) best = std::max(best, c);
  return best;
}

double PhotometricProfile::relative_intensity(double vertical_deg, double horizontal_deg) const {
  switch (kind) {
    case Kind::isotropic:
      return 1.0;
    case Kind::cosine_lobe:
      return std::max(0.0, std::cos(vertical_deg * M_PI / 180.0));
    case Kind::ies_table: {
      const double top = peak();
      return top > 0.0 ? lookup(vertical_deg, horizontal_deg) / top : 0.0;
    }
  }
  return 0.0;
}

PhotometricProfile parse_ies(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool found_tilt = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto pos = line.find("TILT");
    if (pos == std::string::npos) continue;
    found_tilt = true;
    std::string tilt = line.substr(pos);
    while (!tilt.empty() && std::isspace(static_cast<unsigned char>(tilt.back()))) tilt.pop_back();
    if (tilt != "TILT=NONE") throw ParseError("unsupported tilt '" + tilt + "' (only TILT=NONE)", line_no, pos + 1);
    break;
  }
  if (!found_tilt) throw ParseError("missing TILT line");

  // Remaining content is a flat list of numbers; some writers separate with commas.
  std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::replace(rest.begin(), rest.end(), ',', ' ');
  std::istringstream nums(rest);
  std::vector<double> values;
  for (std::string tok; nums >> tok;) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParseError("non-numeric token '" + tok + "' in photometric data");
    }
  }

  std::size_t cursor = 0;
  const auto take = [&](const char* what) {
    if (cursor >= values.size()) throw ParseError(std::string("truncated photometric data: missing ") + what);
    return values[cursor++];
  };

  take("lamp count");
  take("lumens per lamp");
  const double multiplier = take("candela multiplier");
  const double n_vertical = take("vertical angle count");
  const double n_horizontal = take("horizontal angle count");
  take("photometric type");
  take("units type");
  take("width");
  take("length");
  take("height");
  take("ballast factor");
  take("future use");
  take("input watts");
  if (n_vertical < 1 || n_horizontal < 1 || n_vertical != std::floor(n_vertical) ||
      n_horizontal != std::floor(n_horizontal))
    throw ParseError("invalid angle counts");

  PhotometricProfile p;
  p.kind = PhotometricProfile::Kind::ies_table;
  const auto nv = static_cast<std::size_t>(n_vertical);
  const auto nh = static_cast<std::size_t>(n_horizontal);
  for (std::size_t i = 0; i < nv; ++i) p.vertical_angles.push_back(take("vertical angle"));
  for (std::size_t i = 0; i < nh; ++i) p.horizontal_angles.push_back(take("horizontal angle"));
  require_increasing(p.vertical_angles, "vertical");
  require_increasing(p.horizontal_angles, "horizontal");
  if (p.vertical_angles.front() < 0.0 || p.vertical_angles.back() > 180.0)
    throw ParseError("vertical angles outside [0, 180]");
  if (p.horizontal_angles.front() < 0.0 || p.horizontal_angles.back() > 360.0)
    throw ParseError("horizontal angles outside [0, 360]");

  p.candela.assign(nh, std::vector<double>(nv, 0.0));
  for (std::size_t h = 0; h < nh; ++h) {
    for (std::size_t v = 0; v < nv; ++v) {
      const double c = take("candela value (table truncated)") * multiplier;
      if (c < 0.0 || !std::isfinite(c)) throw ParseError("negative or non-finite candela value");
      p.candela[h][v] = c;
    }
  }
  return p;
}

PhotometricProfile load_ies(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open IES file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  PhotometricProfile p = parse_ies(buf.str());
  p.source = path;
  return p;
}

}  // namespace lightplan
