#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "roofvec/geometry.hpp"

namespace roofvec {

/// Per-face closed vertex cycles with edge-id incidence lists. Cycles are
/// stored open (no repeated first vertex) and oriented counterclockwise in
/// the numeric (x, y) frame.
struct FaceSet {
  std::vector<Point> vertices;
  std::vector<std::vector<int>> faces;          // vertex-index cycles
  std::vector<std::vector<int>> face_edge_ids;  // source edge ids per face

  bool empty() const { return faces.empty(); }
  std::size_t face_count() const { return faces.size(); }

  std::vector<Point> face_points(std::size_t f) const {
    std::vector<Point> pts;
    pts.reserve(faces[f].size());
    for (int idx : faces[f]) pts.push_back(vertices[static_cast<std::size_t>(idx)]);
    return pts;
  }
};

/// Signed shoelace area; positive = counterclockwise in the numeric frame.
inline double polygon_signed_area(std::span<const Point> cycle) {
  double acc = 0.0;
  const std::size_t n = cycle.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = cycle[i];
    const Point b = cycle[(i + 1) % n];
    acc += cross(a, b);
  }
  return acc * 0.5;
}

inline void validate_faceset(const FaceSet& fs) {
  const int nv = static_cast<int>(fs.vertices.size());
  for (const Point& p : fs.vertices)
    if (!finite(p)) throw std::invalid_argument("face set has non-finite vertex");
  if (!fs.face_edge_ids.empty() && fs.face_edge_ids.size() != fs.faces.size())
    throw std::invalid_argument("face_edge_ids size mismatch");
  for (std::size_t f = 0; f < fs.faces.size(); ++f) {
    const auto& cyc = fs.faces[f];
    if (cyc.size() < 3)
      throw std::invalid_argument("face " + std::to_string(f) +
                                  " has fewer than 3 vertices");
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      if (cyc[i] < 0 || cyc[i] >= nv)
        throw std::invalid_argument("face " + std::to_string(f) +
                                    " references vertex out of range");
      if (cyc[i] == cyc[(i + 1) % cyc.size()])
        throw std::invalid_argument("face " + std::to_string(f) +
                                    " repeats a vertex consecutively");
    }
  }
}

}  // namespace roofvec
