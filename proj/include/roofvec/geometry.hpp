#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace roofvec {

inline constexpr double kPi = 3.14159265358979323846;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
inline bool operator!=(Point a, Point b) { return !(a == b); }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) { return norm(b - a); }
inline bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Lexicographic (x, then y) order; used wherever a deterministic vertex
/// ordering is needed.
inline bool lex_less(Point a, Point b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

/// Normalizes an undirected-line angle into [0, pi).
inline double normalize_half_turn(double theta) {
  double t = std::fmod(theta, kPi);
  if (t < 0.0) t += kPi;
  if (t >= kPi) t = 0.0;
  return t;
}

/// A directed pair of planar points; the vector form of one roof edge.
/// Valid segments have distinct, finite endpoints.
struct Segment {
  int id = 0;
  Point p0;
  Point p1;

  double length() const { return distance(p0, p1); }
  Point midpoint() const { return {(p0.x + p1.x) * 0.5, (p0.y + p1.y) * 0.5}; }
  Point endpoint(int which) const { return which == 0 ? p0 : p1; }
};

inline Segment make_segment(int id, Point p0, Point p1) {
  if (!finite(p0) || !finite(p1))
    throw std::invalid_argument("segment endpoints must be finite");
  if (p0 == p1)
    throw std::invalid_argument("segment must have positive length");
  return {id, p0, p1};
}

/// A detected rotated rectangle housing one roof edge. The major axis (w)
/// carries the edge direction; construction enforces w >= h by swapping the
/// extents and rotating theta a quarter turn, and normalizes theta to [0, pi).
struct OrientedBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double theta = 0.0;

  OrientedBox(double cx_, double cy_, double w_, double h_, double theta_)
      : cx(cx_), cy(cy_), w(w_), h(h_), theta(theta_) {
    if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(w) ||
        !std::isfinite(h) || !std::isfinite(theta))
      throw std::invalid_argument("oriented box parameters must be finite");
    if (w <= 0.0 || h <= 0.0)
      throw std::invalid_argument("oriented box extents must be positive");
    if (h > w) {
      std::swap(w, h);
      theta += kPi / 2.0;
    }
    theta = normalize_half_turn(theta);
  }

  /// Corner cycle: +u+v, -u+v, -u-v, +u-v around the center.
  std::array<Point, 4> corners() const {
    const Point u{std::cos(theta), std::sin(theta)};
    const Point v{-u.y, u.x};
    const Point c{cx, cy};
    const Point a = (w * 0.5) * u;
    const Point b = (h * 0.5) * v;
    return {c + a + b, c - a + b, c - a - b, c + a - b};
  }
};

struct BoundingBox {
  Point min;
  Point max;

  void expand(Point p) {
    min.x = std::min(min.x, p.x);
    min.y = std::min(min.y, p.y);
    max.x = std::max(max.x, p.x);
    max.y = std::max(max.y, p.y);
  }
  double diagonal() const { return distance(min, max); }
};

inline BoundingBox bbox_of(std::span<const Point> pts) {
  if (pts.empty()) throw std::invalid_argument("bbox of empty point set");
  BoundingBox b{pts[0], pts[0]};
  for (Point p : pts) b.expand(p);
  return b;
}

/// The major-axis segment of the box: endpoints at center +- (w/2)(cos, sin).
inline Segment obb_to_segment(const OrientedBox& box, int id = 0) {
  const Point u{std::cos(box.theta), std::sin(box.theta)};
  const Point half = (box.w * 0.5) * u;
  const Point c{box.cx, box.cy};
  return {id, c - half, c + half};
}

/// Inverse of obb_to_segment up to theta normalization: center = midpoint,
/// w = length, h = thickness. Rejects degenerate segments.
inline OrientedBox segment_to_obb(const Segment& seg, double thickness) {
  if (thickness <= 0.0 || !std::isfinite(thickness))
    throw std::invalid_argument("obb thickness must be positive");
  if (seg.p0 == seg.p1)
    throw std::invalid_argument("cannot box a zero-length segment");
  const Point mid = seg.midpoint();
  const Point d = seg.p1 - seg.p0;
  return OrientedBox(mid.x, mid.y, norm(d), thickness,
                     normalize_half_turn(std::atan2(d.y, d.x)));
}

/// Intersection of the two supporting infinite lines (not clamped to the
/// segments). Absent when the lines are parallel within eps_ang radians.
inline std::optional<Point> line_intersection(const Segment& a,
                                              const Segment& b,
                                              double eps_ang = 1e-6) {
  const Point da = a.p1 - a.p0;
  const Point db = b.p1 - b.p0;
  const double den = cross(da, db);
  if (std::abs(den) <= std::sin(eps_ang) * norm(da) * norm(db))
    return std::nullopt;
  const double t = cross(b.p0 - a.p0, db) / den;
  return a.p0 + t * da;
}

inline double point_segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

/// Minimum Euclidean distance from p to any point on any segment of the
/// polyline (the continuum, not just the vertices).
inline double point_to_polyline_distance(Point p,
                                         std::span<const Segment> poly) {
  if (poly.empty())
    throw std::invalid_argument("distance to empty polyline");
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& s : poly)
    best = std::min(best, point_segment_distance(p, s.p0, s.p1));
  return best;
}

/// Diagonal of the axis-aligned bounding box of the union of both point
/// sets; the normalization scale for the quality metrics. A zero diagonal
/// is rejected.
inline double joint_bbox_diagonal(std::span<const Point> p,
                                  std::span<const Point> r) {
  if (p.empty() || r.empty())
    throw std::invalid_argument("joint bbox of empty point set");
  BoundingBox b = bbox_of(p);
  for (Point q : r) b.expand(q);
  const double d = b.diagonal();
  if (!(d > 0.0))
    throw std::invalid_argument("degenerate joint bounding box (zero diagonal)");
  return d;
}

}  // namespace roofvec
