#include "lightplan/scene.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "lightplan/errors.hpp"
#include "lightplan/text.hpp"

namespace lightplan {
namespace {

constexpr double kEndpointTolerance = 1e-6;

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, std::size_t line) : tokens_(std::move(tokens)), line_(line) {}

  void expect_count(std::size_t n, const char* usage) const {
    if (tokens_.size() != n) {
      const std::size_t col = tokens_.size() > n ? tokens_[n].column : end_column();
      throw ParseError(std::string("expected: ") + usage, line_, col);
    }
  }

  double number(std::size_t i) const {
    double v = 0.0;
    if (!parse_double(tokens_[i].text, v))
      throw ParseError("expected a number, got '" + std::string(tokens_[i].text) + "'", line_, tokens_[i].column);
    return v;
  }

  std::string_view text(std::size_t i) const { return tokens_[i].text; }
  std::size_t column(std::size_t i) const { return tokens_[i].column; }
  std::size_t size() const { return tokens_.size(); }
  std::size_t line() const { return line_; }

 private:
  std::size_t end_column() const {
    return tokens_.empty() ? 1 : tokens_.back().column + tokens_.back().text.size();
  }

  std::vector<Token> tokens_;
  std::size_t line_;
};

bool near(Point2 a, Point2 b) { return distance(a, b) <= kEndpointTolerance; }

bool touches_wall_endpoint(const std::vector<WallSegment>& walls, Point2 p) {
  return std::any_of(walls.begin(), walls.end(), [&](const WallSegment& w) { return near(w.a, p) || near(w.b, p); });
}

std::string vec_text(const std::optional<Vec3>& n) {
  if (!n) return "omni";
  return shortest(n->x) + " " + shortest(n->y) + " " + shortest(n->z);
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (base_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base_dir) / path).string();
}

}  // namespace

std::size_t GridSpec::columns() const {
  return static_cast<std::size_t>(std::ceil(bounds.width() / spacing - 1e-12));
}

std::size_t GridSpec::rows() const {
  return static_cast<std::size_t>(std::ceil(bounds.height() / spacing - 1e-12));
}

Scene parse_scene(std::string_view text, const std::string& base_dir) {
  Scene scene;
  std::size_t line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    auto tokens = tokenize(raw);
    if (tokens.empty()) continue;
    const LineParser p(std::move(tokens), line_no);
    const std::string_view keyword = p.text(0);

    if (keyword == "ceiling") {
      p.expect_count(2, "ceiling <h>");
      scene.ceiling_height = p.number(1);
    } else if (keyword == "wall") {
      p.expect_count(5, "wall <ax> <ay> <bx> <by>");
      scene.walls.push_back({{p.number(1), p.number(2)}, {p.number(3), p.number(4)}});
    } else if (keyword == "door") {
      p.expect_count(7, "door <label> <hx> <hy> <leaf> <heading_deg> <angles_deg_csv>");
      Door d;
      d.label = std::string(p.text(1));
      d.hinge = {p.number(2), p.number(3)};
      d.leaf_length = p.number(4);
      d.closed_heading_deg = p.number(5);
      d.allowed_angles_deg.clear();
      for (std::string_view field : split(p.text(6), ',')) {
        double v = 0.0;
        if (!parse_double(field, v))
          throw ParseError("bad angle list '" + std::string(p.text(6)) + "'", line_no, p.column(6));
        d.allowed_angles_deg.push_back(v);
      }
      scene.doors.push_back(std::move(d));
    } else if (keyword == "lum") {
      p.expect_count(7, "lum <label> <x> <y> <mount_h> <candela> <iso|cos|ies:path>");
      Luminaire l;
      l.id = scene.luminaires.size();
      l.label = std::string(p.text(1));
      l.position = {p.number(2), p.number(3)};
      l.mount_height = p.number(4);
      l.intensity = p.number(5);
      const std::string_view profile = p.text(6);
      if (profile == "iso") {
        l.profile = PhotometricProfile::isotropic();
      } else if (profile == "cos") {
        l.profile = PhotometricProfile::cosine_lobe();
      } else if (profile.starts_with("ies:") && profile.size() > 4) {
        const std::string written(profile.substr(4));
        try {
          l.profile = load_ies(resolve(base_dir, written));
        } catch (const ParseError& e) {
          throw ParseError(std::string("in ") + written + ": " + e.what(), line_no, p.column(6));
        }
        l.profile.source = written;
      } else {
        throw ParseError("unknown profile '" + std::string(profile) + "'", line_no, p.column(6));
      }
      scene.luminaires.push_back(std::move(l));
    } else if (keyword == "grid") {
      if (p.size() != 8 && p.size() != 10)
        throw ParseError("expected: grid <minx> <miny> <maxx> <maxy> <spacing> <height> <nx> <ny> <nz>|omni",
                         line_no, p.column(0));
      GridSpec g;
      g.bounds = {p.number(1), p.number(2), p.number(3), p.number(4)};
      g.spacing = p.number(5);
      g.height = p.number(6);
      if (p.size() == 8) {
        if (p.text(7) != "omni") throw ParseError("expected 'omni' or a normal vector", line_no, p.column(7));
      } else {
        g.normal = Vec3{p.number(7), p.number(8), p.number(9)};
      }
      scene.grids.push_back(g);
    } else {
      throw ParseError("unknown keyword '" + std::string(keyword) + "'", line_no, p.column(0));
    }
  }

  validate_scene(scene);
  for (std::size_t g = 0; g < scene.grids.size(); ++g) {
    auto pts = make_grid(scene.grids[g], scene.walls, g);
    scene.candidates.insert(scene.candidates.end(), pts.begin(), pts.end());
  }
  return scene;
}

Scene load_scene(const std::string& path) {
  const std::string text = read_file(path);
  return parse_scene(text, std::filesystem::path(path).parent_path().string());
}

std::string render_scene(const Scene& scene) {
  std::string out;
  out += "ceiling " + shortest(scene.ceiling_height) + "\n";
  for (const auto& w : scene.walls)
    out += "wall " + shortest(w.a.x) + " " + shortest(w.a.y) + " " + shortest(w.b.x) + " " + shortest(w.b.y) + "\n";
  for (const auto& d : scene.doors) {
    std::string angles;
    for (std::size_t i = 0; i < d.allowed_angles_deg.size(); ++i) {
      if (i) angles += ",";
      angles += shortest(d.allowed_angles_deg[i]);
    }
    out += "door " + d.label + " " + shortest(d.hinge.x) + " " + shortest(d.hinge.y) + " " +
           shortest(d.leaf_length) + " " + shortest(d.closed_heading_deg) + " " + angles + "\n";
  }
  for (const auto& l : scene.luminaires) {
    std::string profile;
    switch (l.profile.kind) {
      case PhotometricProfile::Kind::isotropic: profile = "iso"; break;
      case PhotometricProfile::Kind::cosine_lobe: profile = "cos"; break;
      case PhotometricProfile::Kind::ies_table: profile = "ies:" + l.profile.source; break;
    }
    out += "lum " + l.label + " " + shortest(l.position.x) + " " + shortest(l.position.y) + " " +
           shortest(l.mount_height) + " " + shortest(l.intensity) + " " + profile + "\n";
  }
  for (const auto& g : scene.grids) {
    out += "grid " + shortest(g.bounds.min_x) + " " + shortest(g.bounds.min_y) + " " + shortest(g.bounds.max_x) +
           " " + shortest(g.bounds.max_y) + " " + shortest(g.spacing) + " " + shortest(g.height) + " " +
           vec_text(g.normal) + "\n";
  }
  return out;
}

void validate_scene(const Scene& scene) {
  if (!(scene.ceiling_height > 0.0)) throw ValidationError("ceiling height must be positive");
  if (scene.luminaires.empty()) throw ValidationError("scene needs at least one luminaire");
  if (scene.luminaires.size() > kMaxLuminaires)
    throw ValidationError("scene has " + std::to_string(scene.luminaires.size()) + " luminaires; at most " +
                          std::to_string(kMaxLuminaires) + " are supported (2^n enumeration)");

  for (std::size_t i = 0; i < scene.walls.size(); ++i)
    if (!(scene.walls[i].length() > 0.0)) throw ValidationError("wall " + std::to_string(i) + " has zero length");

  std::set<std::string> labels;
  for (std::size_t i = 0; i < scene.luminaires.size(); ++i) {
    const auto& l = scene.luminaires[i];
    if (l.id != i) throw ValidationError("luminaire ids must be contiguous from 0");
    if (!labels.insert(l.label).second) throw ValidationError("duplicate luminaire id '" + l.label + "'");
    if (!(l.intensity >= 0.0)) throw ValidationError("luminaire '" + l.label + "' has negative intensity");
    if (!(l.mount_height > 0.0)) throw ValidationError("luminaire '" + l.label + "' needs a positive mount height");
    if (l.mount_height > scene.ceiling_height)
      throw ValidationError("luminaire '" + l.label + "' is mounted above the ceiling");
  }

  std::set<std::string> door_labels;
  for (const auto& d : scene.doors) {
    if (!door_labels.insert(d.label).second) throw ValidationError("duplicate door label '" + d.label + "'");
    if (!(d.leaf_length > 0.0)) throw ValidationError("door '" + d.label + "' needs a positive leaf length");
    if (d.allowed_angles_deg.empty()) throw ValidationError("door '" + d.label + "' has no allowed angles");
    std::set<double> seen;
    for (double a : d.allowed_angles_deg) {
      if (a < 0.0 || a > 90.0)
        throw ValidationError("door '" + d.label + "' angle " + shortest(a) + " outside [0, 90] degrees");
      if (!seen.insert(a).second) throw ValidationError("door '" + d.label + "' repeats angle " + shortest(a));
    }
    const WallSegment closed{d.hinge, d.hinge + d.leaf_length * Point2{std::cos(deg_to_rad(d.closed_heading_deg)),
                                                                        std::sin(deg_to_rad(d.closed_heading_deg))}};
    if (!touches_wall_endpoint(scene.walls, closed.a) || !touches_wall_endpoint(scene.walls, closed.b))
      throw ValidationError("door '" + d.label + "' does not fill a wall gap when closed");
  }

  for (const auto& g : scene.grids) {
    if (!(g.spacing > 0.0)) throw ValidationError("grid spacing must be positive");
    if (!(g.bounds.width() > 0.0) || !(g.bounds.height() > 0.0)) throw ValidationError("grid bounds are empty");
    if (g.normal && std::abs(norm(*g.normal) - 1.0) > 1e-6) throw ValidationError("grid normal must be unit length");
  }
}

WallSegment door_leaf_segment(const Door& door, double angle_deg) {
  const bool allowed = std::any_of(door.allowed_angles_deg.begin(), door.allowed_angles_deg.end(),
                                   [&](double a) { return std::abs(a - angle_deg) <= 1e-12; });
  if (!allowed) throw ValidationError("angle " + shortest(angle_deg) + " not allowed for door '" + door.label + "'");
  const double heading = deg_to_rad(door.closed_heading_deg + angle_deg);
  return {door.hinge, door.hinge + door.leaf_length * Point2{std::cos(heading), std::sin(heading)}};
}

std::vector<DoorState> enumerate_door_states(const Scene& scene) {
  std::vector<DoorState> states{DoorState{}};
  for (const auto& door : scene.doors) {
    std::vector<DoorState> next;
    next.reserve(states.size() * door.allowed_angles_deg.size());
    for (const auto& prefix : states) {
      for (double a : door.allowed_angles_deg) {
        DoorState s = prefix;
        s.angles_deg.push_back(a);
        next.push_back(std::move(s));
      }
    }
    states = std::move(next);
  }
  return states;
}

std::vector<CandidatePoint> make_grid(const GridSpec& grid, std::span<const WallSegment> walls,
                                      std::size_t grid_index) {
  if (!(grid.spacing > 0.0)) throw ValidationError("grid spacing must be positive");
  if (!(grid.bounds.width() > 0.0) || !(grid.bounds.height() > 0.0)) throw ValidationError("grid bounds are empty");

  Bounds envelope = grid.bounds;
  if (!walls.empty()) {
    envelope = {walls[0].a.x, walls[0].a.y, walls[0].a.x, walls[0].a.y};
    for (const auto& w : walls) {
      for (Point2 p : {w.a, w.b}) {
        envelope.min_x = std::min(envelope.min_x, p.x);
        envelope.min_y = std::min(envelope.min_y, p.y);
        envelope.max_x = std::max(envelope.max_x, p.x);
        envelope.max_y = std::max(envelope.max_y, p.y);
      }
    }
  }

  std::vector<CandidatePoint> out;
  const std::size_t cols = grid.columns();
  const std::size_t rows = grid.rows();
  out.reserve(cols * rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const Point2 pos{grid.bounds.min_x + (static_cast<double>(c) + 0.5) * grid.spacing,
                       grid.bounds.min_y + (static_cast<double>(r) + 0.5) * grid.spacing};
      if (pos.x < envelope.min_x || pos.x > envelope.max_x || pos.y < envelope.min_y || pos.y > envelope.max_y)
        continue;
      const bool on_wall = std::any_of(walls.begin(), walls.end(),
                                       [&](const WallSegment& w) { return distance_to_segment(w, pos) < 1e-6; });
      if (on_wall) continue;
      out.push_back({pos, grid.height, grid.normal, grid_index, c, r});
    }
  }
  return out;
}

std::vector<WallSegment> occluders(const Scene& scene, const DoorState& state) {
  if (state.angles_deg.size() != scene.doors.size())
    throw ValidationError("door state has " + std::to_string(state.angles_deg.size()) + " angles for " +
                          std::to_string(scene.doors.size()) + " doors");
  std::vector<WallSegment> out = scene.walls;
  for (std::size_t d = 0; d < scene.doors.size(); ++d) out.push_back(door_leaf_segment(scene.doors[d], state.angles_deg[d]));
  return out;
}

}  // namespace lightplan
