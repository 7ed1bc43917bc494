#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "roofvec/faceset.hpp"
#include "roofvec/geometry.hpp"

namespace roofvec {

struct GridSize {
  int width = 0;
  int height = 0;
};

/// Union of all face-cycle polylines of a face set: the vertex set and the
/// undirected segment set, both deduplicated.
struct Boundary {
  std::vector<Point> vertices;
  std::vector<Segment> segments;
};

inline Boundary boundary_of(const FaceSet& fs) {
  Boundary b;
  std::map<std::pair<double, double>, int> vseen;
  std::map<std::pair<std::pair<double, double>, std::pair<double, double>>, int>
      sseen;
  for (const auto& cyc : fs.faces) {
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      const Point p = fs.vertices[static_cast<std::size_t>(cyc[i])];
      const Point q =
          fs.vertices[static_cast<std::size_t>(cyc[(i + 1) % cyc.size()])];
      if (vseen.try_emplace({p.x, p.y}, 0).second) b.vertices.push_back(p);
      auto ka = std::make_pair(p.x, p.y), kb = std::make_pair(q.x, q.y);
      const auto key = ka < kb ? std::make_pair(ka, kb) : std::make_pair(kb, ka);
      if (sseen.try_emplace(key, 0).second)
        b.segments.push_back({static_cast<int>(b.segments.size()), p, q});
    }
  }
  return b;
}

/// Per-face rasterization as row intervals. Each face is filled
/// independently of its siblings: pixel centers inside its polygon under the
/// even-odd rule with half-open [lo, hi) crossing spans, exactly matching a
/// per-pixel point-in-polygon test.
struct FaceSpans {
  int width = 0;
  int height = 0;
  // rows[face][row] = sorted disjoint inclusive pixel intervals [x0, x1]
  std::vector<std::vector<std::vector<std::pair<int, int>>>> rows;
  std::vector<long> face_area;

  bool covered(int x, int y) const {
    for (const auto& face : rows)
      for (const auto& iv : face[static_cast<std::size_t>(y)])
        if (x >= iv.first && x <= iv.second) return true;
    return false;
  }
};

inline FaceSpans rasterize_faceset(const FaceSet& fs, GridSize grid) {
  if (grid.width <= 0 || grid.height <= 0)
    throw std::invalid_argument("metric grid must be positive");
  FaceSpans m;
  m.width = grid.width;
  m.height = grid.height;
  m.rows.assign(fs.faces.size(), {});
  m.face_area.assign(fs.faces.size(), 0);
  for (std::size_t f = 0; f < fs.faces.size(); ++f) {
    m.rows[f].assign(static_cast<std::size_t>(grid.height), {});
    const std::vector<Point> poly = fs.face_points(f);
    double ymin = poly[0].y, ymax = poly[0].y;
    for (const Point& p : poly) {
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    const int row0 = std::max(0, static_cast<int>(std::floor(ymin - 0.5)));
    const int row1 =
        std::min(grid.height - 1, static_cast<int>(std::ceil(ymax + 0.5)));
    std::vector<double> xs;
    for (int row = row0; row <= row1; ++row) {
      const double yc = row + 0.5;
      xs.clear();
      const std::size_t n = poly.size();
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point a = poly[i], b = poly[j];
        if ((a.y > yc) != (b.y > yc))
          xs.push_back(a.x + (yc - a.y) / (b.y - a.y) * (b.x - a.x));
      }
      std::sort(xs.begin(), xs.end());
      for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
        // pixel centers in [xs[k], xs[k+1])
        int x0 = static_cast<int>(std::ceil(xs[k] - 0.5));
        int x1 = static_cast<int>(std::floor(xs[k + 1] - 0.5));
        if (static_cast<double>(x1) + 0.5 >= xs[k + 1]) --x1;
        while (static_cast<double>(x0) + 0.5 < xs[k]) ++x0;
        x0 = std::max(x0, 0);
        x1 = std::min(x1, grid.width - 1);
        if (x0 > x1) continue;
        m.rows[f][static_cast<std::size_t>(row)].push_back({x0, x1});
        m.face_area[f] += x1 - x0 + 1;
      }
    }
  }
  return m;
}

namespace detail {

using RowIntervals = std::vector<std::pair<int, int>>;

inline long overlap_length(const RowIntervals& a, const RowIntervals& b) {
  long total = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const int lo = std::max(a[i].first, b[j].first);
    const int hi = std::min(a[i].second, b[j].second);
    if (lo <= hi) total += hi - lo + 1;
    if (a[i].second < b[j].second)
      ++i;
    else
      ++j;
  }
  return total;
}

inline long pair_intersection(const FaceSpans& a, std::size_t fa,
                              const FaceSpans& b, std::size_t fb) {
  long total = 0;
  for (int row = 0; row < a.height; ++row)
    total += overlap_length(a.rows[fa][static_cast<std::size_t>(row)],
                            b.rows[fb][static_cast<std::size_t>(row)]);
  return total;
}

// Union of all faces of a set, per row, as merged disjoint intervals.
inline std::vector<RowIntervals> union_rows(const FaceSpans& m) {
  std::vector<RowIntervals> rows(static_cast<std::size_t>(m.height));
  for (int row = 0; row < m.height; ++row) {
    RowIntervals all;
    for (const auto& face : m.rows)
      all.insert(all.end(), face[static_cast<std::size_t>(row)].begin(),
                 face[static_cast<std::size_t>(row)].end());
    std::sort(all.begin(), all.end());
    RowIntervals merged;
    for (const auto& iv : all) {
      if (!merged.empty() && iv.first <= merged.back().second + 1)
        merged.back().second = std::max(merged.back().second, iv.second);
      else
        merged.push_back(iv);
    }
    rows[static_cast<std::size_t>(row)] = std::move(merged);
  }
  return rows;
}

inline long total_length(const std::vector<RowIntervals>& rows) {
  long total = 0;
  for (const auto& r : rows)
    for (const auto& iv : r) total += iv.second - iv.first + 1;
  return total;
}

}  // namespace detail

struct FaceIoU {
  int ref_face = 0;
  int pred_face = -1;  // -1: no overlapping prediction
  double iou = 0.0;
};

struct MiouResult {
  std::vector<FaceIoU> per_face;
  double miou = 0.0;
};

/// Mean per-face IoU, reference-directed: each reference face is matched to
/// the prediction face with the largest pixel overlap (many-to-one allowed);
/// references with no overlap score zero.
inline MiouResult miou(const FaceSet& pred, const FaceSet& ref, GridSize grid) {
  if (ref.faces.empty()) throw std::invalid_argument("empty reference face set");
  const FaceSpans rm = rasterize_faceset(ref, grid);
  const FaceSpans pm = rasterize_faceset(pred, grid);
  MiouResult out;
  double sum = 0.0;
  for (std::size_t i = 0; i < ref.faces.size(); ++i) {
    FaceIoU entry;
    entry.ref_face = static_cast<int>(i);
    long best_inter = 0;
    for (std::size_t j = 0; j < pred.faces.size(); ++j) {
      const long inter = detail::pair_intersection(rm, i, pm, j);
      if (inter > best_inter) {
        best_inter = inter;
        entry.pred_face = static_cast<int>(j);
      }
    }
    if (entry.pred_face >= 0) {
      const long uni = rm.face_area[i] +
                       pm.face_area[static_cast<std::size_t>(entry.pred_face)] -
                       best_inter;
      entry.iou = uni > 0 ? static_cast<double>(best_inter) /
                                static_cast<double>(uni)
                          : 0.0;
    }
    sum += entry.iou;
    out.per_face.push_back(entry);
  }
  out.miou = sum / static_cast<double>(ref.faces.size());
  return out;
}

/// Whole-roof IoU of the union-of-faces masks.
inline double oviou(const FaceSet& pred, const FaceSet& ref, GridSize grid) {
  const FaceSpans rm = rasterize_faceset(ref, grid);
  const FaceSpans pm = rasterize_faceset(pred, grid);
  const auto r_union = detail::union_rows(rm);
  const auto p_union = detail::union_rows(pm);
  const long r_area = detail::total_length(r_union);
  const long p_area = detail::total_length(p_union);
  if (r_area == 0 && p_area == 0)
    throw std::invalid_argument("both union masks are empty");
  long inter = 0;
  for (int row = 0; row < grid.height; ++row)
    inter += detail::overlap_length(r_union[static_cast<std::size_t>(row)],
                                    p_union[static_cast<std::size_t>(row)]);
  const long uni = r_area + p_area - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Symmetric Hausdorff distance: outer max over the VERTICES of each
/// boundary, inner min over the continuum of the other boundary.
inline double hausdorff(const Boundary& pred, const Boundary& ref) {
  if (pred.vertices.empty() || ref.vertices.empty() || pred.segments.empty() ||
      ref.segments.empty())
    throw std::invalid_argument("hausdorff of empty boundary");
  double worst = 0.0;
  for (const Point& p : pred.vertices)
    worst = std::max(worst, point_to_polyline_distance(p, ref.segments));
  for (const Point& q : ref.vertices)
    worst = std::max(worst, point_to_polyline_distance(q, pred.segments));
  return worst;
}

/// PolyS distance: the mean of the two directed vertex-to-boundary RMSE
/// values. With as_printed the per-direction sums are not divided by the
/// vertex count before the square root.
inline double polys(const Boundary& pred, const Boundary& ref,
                    bool as_printed = false) {
  if (pred.vertices.empty() || ref.vertices.empty() || pred.segments.empty() ||
      ref.segments.empty())
    throw std::invalid_argument("polys of empty boundary");
  auto directed = [&](const std::vector<Point>& from,
                      const std::vector<Segment>& to) {
    double sq = 0.0;
    for (const Point& p : from) {
      const double d = point_to_polyline_distance(p, to);
      sq += d * d;
    }
    if (!as_printed) sq /= static_cast<double>(from.size());
    return std::sqrt(sq);
  };
  return 0.5 * directed(pred.vertices, ref.segments) +
         0.5 * directed(ref.vertices, pred.segments);
}

/// q = max(0, 1 - d / d_max).
inline double quality(double d, double d_max) {
  if (!(d_max > 0.0)) throw std::invalid_argument("d_max must be positive");
  return std::max(0.0, 1.0 - d / d_max);
}

inline double qvm(double miou_value, double q_h) { return miou_value * q_h; }

/// Per-building metric values; q_vm = miou * q_h by construction.
struct EvalReport {
  std::string building_id;
  std::vector<FaceIoU> per_face_iou;
  double miou = 0.0;
  double oviou = 0.0;
  double d_h = 0.0;
  double d_p = 0.0;
  double q_h = 0.0;
  double q_p = 0.0;
  double q_vm = 0.0;
  double d_max = 0.0;
};

struct EvalOptions {
  bool polys_as_printed = false;
};

/// Full evaluation of a prediction against a reference on the given grid.
/// An empty prediction scores zero everywhere: the vector distances are
/// pinned to d_max (worst normalized quality).
inline EvalReport evaluate(const FaceSet& pred, const FaceSet& ref,
                           GridSize grid, const EvalOptions& opts = {}) {
  if (ref.faces.empty()) throw std::invalid_argument("empty reference face set");
  EvalReport r;
  const Boundary rb = boundary_of(ref);
  if (pred.faces.empty()) {
    r.d_max = joint_bbox_diagonal(rb.vertices, rb.vertices);
    r.miou = 0.0;
    r.oviou = 0.0;
    r.d_h = r.d_p = r.d_max;
    r.q_h = r.q_p = r.q_vm = 0.0;
    for (std::size_t i = 0; i < ref.faces.size(); ++i)
      r.per_face_iou.push_back({static_cast<int>(i), -1, 0.0});
    return r;
  }
  const Boundary pb = boundary_of(pred);
  MiouResult mi = miou(pred, ref, grid);
  r.per_face_iou = std::move(mi.per_face);
  r.miou = mi.miou;
  r.oviou = oviou(pred, ref, grid);
  r.d_max = joint_bbox_diagonal(pb.vertices, rb.vertices);
  r.d_h = hausdorff(pb, rb);
  r.d_p = polys(pb, rb, opts.polys_as_printed);
  r.q_h = quality(r.d_h, r.d_max);
  r.q_p = quality(r.d_p, r.d_max);
  r.q_vm = qvm(r.miou, r.q_h);
  return r;
}

/// Dataset-level aggregate: means of mIoU/ovIoU/q_P/q_VM, the median of q_H
/// (Hausdorff already absorbs gross errors), and quartiles for all five.
struct MetricStats {
  double mean = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

struct DatasetSummary {
  int buildings = 0;
  MetricStats miou;
  MetricStats oviou;
  MetricStats q_h;
  MetricStats q_p;
  MetricStats q_vm;
};

namespace detail {

// Linear-interpolation quantile on a sorted sample (type 7).
inline double quantile_sorted(std::span<const double> sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= n) return sorted[n - 1];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline MetricStats stats_of(std::vector<double> values) {
  MetricStats s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  return s;
}

}  // namespace detail

inline DatasetSummary aggregate(std::span<const EvalReport> reports) {
  if (reports.empty())
    throw std::invalid_argument("cannot aggregate zero reports");
  DatasetSummary s;
  s.buildings = static_cast<int>(reports.size());
  auto collect = [&](auto member) {
    std::vector<double> v;
    v.reserve(reports.size());
    for (const EvalReport& r : reports) v.push_back(r.*member);
    return detail::stats_of(std::move(v));
  };
  s.miou = collect(&EvalReport::miou);
  s.oviou = collect(&EvalReport::oviou);
  s.q_h = collect(&EvalReport::q_h);
  s.q_p = collect(&EvalReport::q_p);
  s.q_vm = collect(&EvalReport::q_vm);
  return s;
}

}  // namespace roofvec
