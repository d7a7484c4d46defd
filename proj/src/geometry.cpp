#include "lightplan/geometry.hpp"

#include <algorithm>

namespace lightplan {

bool blocks(const WallSegment& wall, Point2 p0, Point2 p1, double tol) {
  const Point2 r = p1 - p0;
  const Point2 s = wall.b - wall.a;
  const double denom = cross(r, s);
  const double r_len = norm(r);
  const double s_len = norm(s);
  if (r_len == 0.0 || s_len == 0.0) return false;
  // Parallel (including collinear overlap): a zero-thickness plane seen edge-on.
  if (std::abs(denom) <= 1e-15 * r_len * s_len) return false;

  const Point2 qp = wall.a - p0;
  const double t = cross(qp, s) / denom;  // along the sight line
  const double u = cross(qp, r) / denom;  // along the wall
  const double t_eps = tol / r_len;
  const double u_eps = tol / s_len;
  return t > t_eps && t < 1.0 - t_eps && u > u_eps && u < 1.0 - u_eps;
}

double distance_to_segment(const WallSegment& s, Point2 p) {
  const Point2 d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return distance(s.a, p);
  const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return distance(s.a + t * d, p);
}

}  // namespace lightplan
