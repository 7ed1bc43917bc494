// Independent reference implementations used to cross-check the library.
// These deliberately take different routes than the code under test: direct
// formula evaluation, brute-force enumeration, dense sampling.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "roofvec/faceset.hpp"
#include "roofvec/geometry.hpp"

namespace oracle {

using roofvec::Point;
using roofvec::Segment;

inline Point rotate_about(Point p, Point center, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  const double dx = p.x - center.x, dy = p.y - center.y;
  return {center.x + c * dx - s * dy, center.y + s * dx + c * dy};
}

// Cramer's rule on the 2x2 system of the two line equations.
inline std::optional<Point> solve_lines(Point a0, Point a1, Point b0,
                                        Point b1) {
  // line: n . p = n . p0 with n the left normal of the direction
  const double nax = -(a1.y - a0.y), nay = a1.x - a0.x;
  const double nbx = -(b1.y - b0.y), nby = b1.x - b0.x;
  const double ca = nax * a0.x + nay * a0.y;
  const double cb = nbx * b0.x + nby * b0.y;
  const double det = nax * nby - nay * nbx;
  if (std::abs(det) < 1e-12) return std::nullopt;
  return Point{(ca * nby - cb * nay) / det, (nax * cb - nbx * ca) / det};
}

// Minimum distance to a polyline estimated by dense sampling of every
// segment at `samples_per_polyline` total points.
inline double dense_polyline_distance(Point p, std::span<const Segment> segs,
                                      int samples_total = 10000) {
  double total_len = 0.0;
  for (const Segment& s : segs) total_len += s.length();
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& s : segs) {
    const int n = std::max(
        2, static_cast<int>(samples_total * (s.length() / total_len)));
    for (int i = 0; i <= n; ++i) {
      const double t = static_cast<double>(i) / n;
      const Point q{s.p0.x + t * (s.p1.x - s.p0.x),
                    s.p0.y + t * (s.p1.y - s.p0.y)};
      best = std::min(best, roofvec::distance(p, q));
    }
  }
  return best;
}

// Brute-force DBSCAN with minPts = 1: BFS over the eps-neighborhood graph.
// Returns for each point the index of its cluster representative (the
// smallest point index in its cluster).
inline std::vector<int> brute_dbscan(std::span<const Point> pts, double eps) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> rep(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    if (rep[static_cast<std::size_t>(i)] != -1) continue;
    std::vector<int> stack{i};
    rep[static_cast<std::size_t>(i)] = i;
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      for (int j = 0; j < n; ++j) {
        if (rep[static_cast<std::size_t>(j)] != -1) continue;
        if (roofvec::distance(pts[static_cast<std::size_t>(cur)],
                              pts[static_cast<std::size_t>(j)]) <= eps) {
          rep[static_cast<std::size_t>(j)] = i;
          stack.push_back(j);
        }
      }
    }
  }
  return rep;
}

// Closed-form Bresenham: the y offset after k steps follows from the error
// recurrence err_k = dx/2 - k dy + m dx staying in [0, dx).
inline std::vector<std::pair<int, int>> bresenham_closed_form(int x0, int y0,
                                                              int x1, int y1) {
  const bool steep = std::abs(y1 - y0) > std::abs(x1 - x0);
  if (steep) {
    std::swap(x0, y0);
    std::swap(x1, y1);
  }
  if (x0 > x1) {
    std::swap(x0, x1);
    std::swap(y0, y1);
  }
  const long long dx = x1 - x0;
  const long long dy = std::abs(y1 - y0);
  const int ystep = y0 < y1 ? 1 : -1;
  const long long err0 = dx / 2;
  std::vector<std::pair<int, int>> out;
  for (long long k = 0; k <= dx; ++k) {
    long long m = 0;
    const long long need = k * dy - err0;
    if (need > 0) m = (need + dx - 1) / dx;  // ceil for positive operands
    const int x = static_cast<int>(x0 + k);
    const int y = static_cast<int>(y0 + ystep * m);
    out.push_back(steep ? std::make_pair(y, x) : std::make_pair(x, y));
  }
  return out;
}

// Classic PNPOLY crossing test at a query point.
inline bool point_in_polygon(Point q, std::span<const Point> poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = poly[i], b = poly[j];
    if ((a.y > q.y) != (b.y > q.y)) {
      const double xc = a.x + (q.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (q.x < xc) inside = !inside;
    }
  }
  return inside;
}

// Per-pixel brute force rasterization of one face set: pixel center inside
// any face polygon. Returns per-face boolean masks.
inline std::vector<std::vector<bool>> brute_masks(const roofvec::FaceSet& fs,
                                                  int width, int height) {
  std::vector<std::vector<bool>> masks(fs.faces.size());
  for (std::size_t f = 0; f < fs.faces.size(); ++f) {
    const auto poly = fs.face_points(f);
    masks[f].assign(static_cast<std::size_t>(width) * height, false);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        if (point_in_polygon({x + 0.5, y + 0.5}, poly))
          masks[f][static_cast<std::size_t>(y) * width + x] = true;
  }
  return masks;
}

// Reference-directed mean IoU via per-pair mask loops.
inline double brute_miou(const roofvec::FaceSet& pred,
                         const roofvec::FaceSet& ref, int width, int height) {
  const auto pm = brute_masks(pred, width, height);
  const auto rm = brute_masks(ref, width, height);
  double sum = 0.0;
  for (const auto& rmask : rm) {
    long best_inter = 0;
    long best_union = 1;
    for (const auto& pmask : pm) {
      long inter = 0, uni = 0;
      for (std::size_t i = 0; i < rmask.size(); ++i) {
        const bool a = rmask[i], b = pmask[i];
        if (a && b) ++inter;
        if (a || b) ++uni;
      }
      if (inter > best_inter) {
        best_inter = inter;
        best_union = uni;
      }
    }
    if (best_inter > 0) sum += static_cast<double>(best_inter) / best_union;
  }
  return sum / static_cast<double>(rm.size());
}

inline double brute_oviou(const roofvec::FaceSet& pred,
                          const roofvec::FaceSet& ref, int width, int height) {
  const auto pm = brute_masks(pred, width, height);
  const auto rm = brute_masks(ref, width, height);
  long inter = 0, uni = 0;
  const std::size_t total = static_cast<std::size_t>(width) * height;
  for (std::size_t i = 0; i < total; ++i) {
    bool a = false, b = false;
    for (const auto& m : rm) a = a || m[i];
    for (const auto& m : pm) b = b || m[i];
    if (a && b) ++inter;
    if (a || b) ++uni;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

// Unique undirected edge count by string-keyed endpoint-pair set.
inline std::size_t unique_edge_count(const roofvec::FaceSet& fs) {
  std::set<std::string> keys;
  auto fmt = [](Point p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f,%.6f", p.x, p.y);
    return std::string(buf);
  };
  for (const auto& cyc : fs.faces) {
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      const Point a = fs.vertices[static_cast<std::size_t>(cyc[i])];
      const Point b =
          fs.vertices[static_cast<std::size_t>(cyc[(i + 1) % cyc.size()])];
      std::string ka = fmt(a), kb = fmt(b);
      if (kb < ka) std::swap(ka, kb);
      keys.insert(ka + "|" + kb);
    }
  }
  return keys.size();
}

// Brute-force segment pair intersection test for polygon simplicity.
inline bool segments_properly_intersect(Point a, Point b, Point c, Point d) {
  auto orient = [](Point p, Point q, Point r) {
    const double v = roofvec::cross(q - p, r - p);
    return v > 1e-12 ? 1 : (v < -1e-12 ? -1 : 0);
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

inline bool polygon_is_simple(std::span<const Point> poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t i2 = (i + 1) % n, j2 = (j + 1) % n;
      if (i == j || i2 == j || i == j2) continue;  // shared endpoint
      if (segments_properly_intersect(poly[i], poly[i2], poly[j], poly[j2]))
        return false;
    }
  }
  return true;
}

}  // namespace oracle
