#pragma once

#include <cmath>

namespace lightplan {

/// Plan-view position in meters.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Straight opaque segment in plan view; extruded to full height for occlusion.
struct WallSegment {
  Point2 a;
  Point2 b;

  double length() const { return distance(a, b); }

  friend bool operator==(const WallSegment&, const WallSegment&) = default;
};

/// Grazing tolerance in meters for occlusion tests.
inline constexpr double kGrazeTolerance = 1e-9;

/// True when segment p0-p1 crosses the interior of `wall`.
///
/// Contact within `tol` meters of either endpoint of either segment does not
/// count, so a sight line through a doorway corner stays clear. Parallel and
/// collinear segments never block.
bool blocks(const WallSegment& wall, Point2 p0, Point2 p1, double tol = kGrazeTolerance);

/// Shortest distance from `p` to the segment.
double distance_to_segment(const WallSegment& s, Point2 p);

}  // namespace lightplan
