#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lightplan/geometry.hpp"
#include "lightplan/photometry.hpp"

namespace lightplan {

/// Largest luminaire count accepted; every downstream sweep enumerates 2^n
/// configurations.
inline constexpr std::size_t kMaxLuminaires = 24;

inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }

/// Hinged door leaf. Angles are held in degrees so scene files round-trip
/// exactly; 0 = closed (leaf fills the doorway), positive = rotated
/// counter-clockwise about the hinge.
struct Door {
  std::string label;
  Point2 hinge;
  double leaf_length = 1.0;
  double closed_heading_deg = 0.0;
  std::vector<double> allowed_angles_deg{0.0, 45.0, 90.0};

  friend bool operator==(const Door&, const Door&) = default;
};

struct Luminaire {
  std::size_t id = 0;
  std::string label;
  Point2 position;
  double mount_height = 2.5;
  double intensity = 0.0;  // peak candela
  PhotometricProfile profile;

  friend bool operator==(const Luminaire&, const Luminaire&) = default;
};

/// Sensor position. An empty normal means an omnidirectional sensor.
struct CandidatePoint {
  Point2 position;
  double height = 0.0;
  std::optional<Vec3> normal;
  // Raster cell for heatmap images: which grid line produced the point and
  // where it sits in that grid.
  std::size_t grid = 0;
  std::size_t col = 0;
  std::size_t row = 0;

  friend bool operator==(const CandidatePoint&, const CandidatePoint&) = default;
};

struct Bounds {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }

  friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// One `grid` line of a scene file.
struct GridSpec {
  Bounds bounds;
  double spacing = 0.5;
  double height = 1.0;
  std::optional<Vec3> normal;

  std::size_t columns() const;
  std::size_t rows() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct Scene {
  double ceiling_height = 2.7;
  std::vector<WallSegment> walls;
  std::vector<Door> doors;
  std::vector<Luminaire> luminaires;
  std::vector<GridSpec> grids;
  std::vector<CandidatePoint> candidates;

  std::size_t luminaire_count() const { return luminaires.size(); }

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// One opening angle (degrees) per door.
struct DoorState {
  std::vector<double> angles_deg;

  friend bool operator==(const DoorState&, const DoorState&) = default;
};

/// Parses scene-file text. Relative `ies:` paths resolve against `base_dir`.
/// Throws ParseError for malformed lines and ValidationError for invariant
/// violations.
Scene parse_scene(std::string_view text, const std::string& base_dir = {});

/// Reads a scene file from disk; IES paths resolve against its directory.
Scene load_scene(const std::string& path);

/// Scene-file text that parses back to an identical Scene.
std::string render_scene(const Scene& scene);

/// Checks every scene invariant; throws ValidationError on the first failure.
void validate_scene(const Scene& scene);

/// Leaf position for a door at `angle_deg`. Throws ValidationError when the
/// angle is not one of the door's allowed angles.
WallSegment door_leaf_segment(const Door& door, double angle_deg);

/// Cartesian product of the doors' allowed angles, first door varying slowest.
std::vector<DoorState> enumerate_door_states(const Scene& scene);

/// Row-major grid of cell-centred points. Points off the walls' bounding box or
/// lying on a wall are dropped. Throws ValidationError for non-positive spacing
/// or empty bounds.
std::vector<CandidatePoint> make_grid(const GridSpec& grid, std::span<const WallSegment> walls = {},
                                      std::size_t grid_index = 0);

/// Opaque segments for a door state: every wall plus every door leaf.
std::vector<WallSegment> occluders(const Scene& scene, const DoorState& state);

}  // namespace lightplan
