#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "roofvec/faceset.hpp"
#include "roofvec/geometry.hpp"
#include "roofvec/polygonize.hpp"

namespace roofvec {

struct PixelCoord {
  int x = 0;
  int y = 0;
};
inline bool operator==(PixelCoord a, PixelCoord b) {
  return a.x == b.x && a.y == b.y;
}
inline bool operator<(PixelCoord a, PixelCoord b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

/// Binary edge raster plus per-pixel component labels. Labels are 0 on edge
/// pixels and 1..K elsewhere once label_components has run.
struct RasterGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> occupancy;
  std::vector<std::int32_t> labels;

  bool inside(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
  std::uint8_t occ(int x, int y) const { return occupancy[idx(x, y)]; }
  std::int32_t label(int x, int y) const { return labels[idx(x, y)]; }
};

/// Classic integer-error Bresenham trace (steep/swap canonicalization, error
/// seeded at dx/2). Visits every pixel of the line, endpoints included, in
/// canonical order.
template <typename Visit>
inline void bresenham(int x0, int y0, int x1, int y1, Visit&& visit) {
  const bool steep = std::abs(y1 - y0) > std::abs(x1 - x0);
  if (steep) {
    std::swap(x0, y0);
    std::swap(x1, y1);
  }
  if (x0 > x1) {
    std::swap(x0, x1);
    std::swap(y0, y1);
  }
  const int dx = x1 - x0;
  const int dy = std::abs(y1 - y0);
  const int ystep = y0 < y1 ? 1 : -1;
  int err = dx / 2;
  int y = y0;
  for (int x = x0; x <= x1; ++x) {
    if (steep)
      visit(y, x);
    else
      visit(x, y);
    err -= dy;
    if (err < 0) {
      y += ystep;
      err += dx;
    }
  }
}

struct EdgeRaster {
  RasterGrid grid;
  std::vector<std::vector<PixelCoord>> edge_pixels;  // by graph edge index
  int clipped_pixels = 0;
};

/// Draws every graph edge with Bresenham, recording the pixel set per edge.
/// Vertices are rounded to integers only here; pixels falling outside the
/// grid are clipped and counted.
inline EdgeRaster rasterize_edges(const RoofGraph& graph, int width,
                                  int height) {
  if (graph.edges.empty()) throw std::invalid_argument("empty graph");
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("raster size must be positive");
  EdgeRaster out;
  out.grid.width = width;
  out.grid.height = height;
  out.grid.occupancy.assign(static_cast<std::size_t>(width) * height, 0);
  out.edge_pixels.resize(graph.edges.size());
  for (std::size_t ei = 0; ei < graph.edges.size(); ++ei) {
    const auto& e = graph.edges[ei];
    const Point a = graph.vertices[static_cast<std::size_t>(e.v0)];
    const Point b = graph.vertices[static_cast<std::size_t>(e.v1)];
    bresenham(static_cast<int>(std::lround(a.x)), static_cast<int>(std::lround(a.y)),
              static_cast<int>(std::lround(b.x)), static_cast<int>(std::lround(b.y)),
              [&](int x, int y) {
                if (!out.grid.inside(x, y)) {
                  ++out.clipped_pixels;
                  return;
                }
                out.grid.occupancy[out.grid.idx(x, y)] = 1;
                out.edge_pixels[ei].push_back({x, y});
              });
  }
  return out;
}

struct ComponentInfo {
  int label = 0;
  long pixel_count = 0;
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  PixelCoord first_pixel;
  bool touches_border = false;
};

struct LabelResult {
  int component_count = 0;               // including background
  std::vector<ComponentInfo> components; // [0] is label 1, etc.
};

/// 4-connected component labeling of the non-edge pixels (1-connectivity).
/// Labels are assigned 1..K in row-major first-encounter order; components
/// touching the grid border are the background.
inline LabelResult label_components(RasterGrid& grid) {
  if (grid.occupancy.empty()) throw std::invalid_argument("occupancy not filled");
  grid.labels.assign(grid.occupancy.size(), 0);
  LabelResult out;
  std::deque<PixelCoord> queue;
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      if (grid.occ(x, y) != 0 || grid.label(x, y) != 0) continue;
      const int lbl = ++out.component_count;
      ComponentInfo info;
      info.label = lbl;
      info.first_pixel = {x, y};
      queue.push_back({x, y});
      grid.labels[grid.idx(x, y)] = lbl;
      double sx = 0.0, sy = 0.0;
      while (!queue.empty()) {
        const PixelCoord p = queue.front();
        queue.pop_front();
        ++info.pixel_count;
        sx += p.x;
        sy += p.y;
        if (p.x == 0 || p.y == 0 || p.x == grid.width - 1 ||
            p.y == grid.height - 1)
          info.touches_border = true;
        constexpr int d[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (auto& dd : d) {
          const int nx = p.x + dd[0], ny = p.y + dd[1];
          if (!grid.inside(nx, ny)) continue;
          if (grid.occ(nx, ny) != 0 || grid.label(nx, ny) != 0) continue;
          grid.labels[grid.idx(nx, ny)] = lbl;
          queue.push_back({nx, ny});
        }
      }
      info.centroid_x = sx / static_cast<double>(info.pixel_count) + 0.5;
      info.centroid_y = sy / static_cast<double>(info.pixel_count) + 0.5;
      out.components.push_back(info);
    }
  }
  return out;
}

/// Edge e is incident to component c iff some pixel of e is 4-adjacent to a
/// pixel labeled c. Junction pixels (drawn by more than one edge) are
/// skipped: endpoint contact alone must not bind an edge to a component.
/// Result indexed by component label (entry 0 unused).
inline std::vector<std::vector<int>> collect_incident_edges(
    const RasterGrid& grid, std::span<const std::vector<PixelCoord>> edge_pixels,
    int component_count) {
  std::vector<std::uint8_t> multiplicity(grid.occupancy.size(), 0);
  for (const auto& pixels : edge_pixels)
    for (const PixelCoord& p : pixels) {
      auto& m = multiplicity[grid.idx(p.x, p.y)];
      if (m < 2) ++m;
    }
  std::vector<std::vector<int>> incident(
      static_cast<std::size_t>(component_count) + 1);
  for (std::size_t ei = 0; ei < edge_pixels.size(); ++ei) {
    std::vector<int> touched;
    for (const PixelCoord& p : edge_pixels[ei]) {
      if (multiplicity[grid.idx(p.x, p.y)] > 1) continue;
      constexpr int d[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (auto& dd : d) {
        const int nx = p.x + dd[0], ny = p.y + dd[1];
        if (!grid.inside(nx, ny)) continue;
        const std::int32_t lbl = grid.label(nx, ny);
        if (lbl > 0) touched.push_back(lbl);
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (int lbl : touched)
      incident[static_cast<std::size_t>(lbl)].push_back(static_cast<int>(ei));
  }
  return incident;
}

struct FaceParams {
  double a_min = 16.0;  // px^2; smaller components are rasterization slivers
};

struct FaceDiagnostics {
  int emitted = 0;
  int sliver_components = 0;
  std::vector<std::string> skipped;  // human-readable reasons
  bool leak_suspected = false;       // no face candidate component at all
};

namespace detail {

struct HalfEdge {
  int from = 0;
  int to = 0;
  int edge_index = 0;  // into RoofGraph::edges
  int twin = 0;
  int next = -1;
  double angle = 0.0;
};

struct TracedCycle {
  std::vector<int> vertex_cycle;  // graph vertex ids
  std::vector<int> edge_indices;  // graph edge indices along the walk
  double area = 0.0;
};

// Even-odd point-in-polygon (half-open crossing rule).
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

// All faces of the planar subgraph, traced with the leftmost-turn rule
// (next half-edge = rotational predecessor of the twin around its origin).
inline std::vector<TracedCycle> trace_faces(
    const RoofGraph& graph, std::span<const int> edge_indices) {
  std::vector<HalfEdge> halves;
  std::map<int, std::vector<int>> outgoing;  // vertex -> half indices
  for (int ei : edge_indices) {
    const auto& e = graph.edges[static_cast<std::size_t>(ei)];
    const Point a = graph.vertices[static_cast<std::size_t>(e.v0)];
    const Point b = graph.vertices[static_cast<std::size_t>(e.v1)];
    const int h0 = static_cast<int>(halves.size());
    halves.push_back({e.v0, e.v1, ei, h0 + 1, -1,
                      std::atan2(b.y - a.y, b.x - a.x)});
    halves.push_back({e.v1, e.v0, ei, h0, -1,
                      std::atan2(a.y - b.y, a.x - b.x)});
    outgoing[e.v0].push_back(h0);
    outgoing[e.v1].push_back(h0 + 1);
  }
  for (auto& [v, list] : outgoing)
    std::sort(list.begin(), list.end(), [&](int a, int b) {
      if (halves[static_cast<std::size_t>(a)].angle !=
          halves[static_cast<std::size_t>(b)].angle)
        return halves[static_cast<std::size_t>(a)].angle <
               halves[static_cast<std::size_t>(b)].angle;
      return a < b;
    });
  for (std::size_t h = 0; h < halves.size(); ++h) {
    const int twin = halves[h].twin;
    const auto& list = outgoing[halves[static_cast<std::size_t>(twin)].from];
    const auto it = std::find(list.begin(), list.end(), twin);
    const std::size_t pos = static_cast<std::size_t>(it - list.begin());
    const std::size_t prev = (pos + list.size() - 1) % list.size();
    halves[h].next = list[prev];
  }

  std::vector<TracedCycle> cycles;
  std::vector<bool> visited(halves.size(), false);
  for (std::size_t start = 0; start < halves.size(); ++start) {
    if (visited[start]) continue;
    TracedCycle cyc;
    int h = static_cast<int>(start);
    while (!visited[static_cast<std::size_t>(h)]) {
      visited[static_cast<std::size_t>(h)] = true;
      cyc.vertex_cycle.push_back(halves[static_cast<std::size_t>(h)].from);
      cyc.edge_indices.push_back(halves[static_cast<std::size_t>(h)].edge_index);
      h = halves[static_cast<std::size_t>(h)].next;
    }
    std::vector<Point> pts;
    for (int v : cyc.vertex_cycle)
      pts.push_back(graph.vertices[static_cast<std::size_t>(v)]);
    cyc.area = polygon_signed_area(pts);
    cycles.push_back(std::move(cyc));
  }
  return cycles;
}

}  // namespace detail

/// Extracts one closed CCW vertex cycle per face component: the subgraph
/// induced by the component's incident edges is pruned of stubs, its faces
/// are traced with the leftmost-turn rule, and the cycle enclosing the
/// component's pixels is kept. Components whose edges form no enclosing
/// cycle (leaks, danglers) are skipped and reported.
inline FaceSet vectorize_faces(const RoofGraph& graph,
                               const LabelResult& labels,
                               std::span<const std::vector<int>> incidence,
                               const FaceParams& params = {},
                               FaceDiagnostics* diag = nullptr) {
  FaceSet fs;
  FaceDiagnostics local;
  FaceDiagnostics& d = diag ? *diag : local;

  std::map<int, int> vertex_map;  // graph vertex -> faceset vertex
  auto emit_vertex = [&](int v) {
    auto [it, inserted] =
        vertex_map.try_emplace(v, static_cast<int>(fs.vertices.size()));
    if (inserted)
      fs.vertices.push_back(graph.vertices[static_cast<std::size_t>(v)]);
    return it->second;
  };

  int candidates = 0;
  for (const ComponentInfo& comp : labels.components) {
    if (comp.touches_border) continue;  // background
    if (static_cast<double>(comp.pixel_count) < params.a_min) {
      ++d.sliver_components;
      continue;
    }
    ++candidates;
    const auto& edge_idx = incidence[static_cast<std::size_t>(comp.label)];
    if (edge_idx.empty()) {
      d.skipped.push_back("component " + std::to_string(comp.label) +
                          ": no incident edges");
      continue;
    }

    // Prune stub edges: a cycle never passes through a degree-1 vertex.
    std::map<int, int> degree;
    std::vector<int> kept(edge_idx.begin(), edge_idx.end());
    for (;;) {
      degree.clear();
      for (int ei : kept) {
        ++degree[graph.edges[static_cast<std::size_t>(ei)].v0];
        ++degree[graph.edges[static_cast<std::size_t>(ei)].v1];
      }
      const auto dead = std::partition(
          kept.begin(), kept.end(), [&](int ei) {
            const auto& e = graph.edges[static_cast<std::size_t>(ei)];
            return degree[e.v0] >= 2 && degree[e.v1] >= 2;
          });
      if (dead == kept.end()) break;
      kept.erase(dead, kept.end());
      if (kept.empty()) break;
    }
    if (kept.empty()) {
      d.skipped.push_back("component " + std::to_string(comp.label) +
                          ": incident edges form a path, not a cycle");
      continue;
    }
    std::sort(kept.begin(), kept.end());

    auto cycles = detail::trace_faces(graph, kept);
    const Point reps[2] = {{comp.centroid_x, comp.centroid_y},
                           {comp.first_pixel.x + 0.5, comp.first_pixel.y + 0.5}};
    const detail::TracedCycle* chosen = nullptr;
    for (const Point rep : reps) {
      for (const auto& cyc : cycles) {
        if (cyc.area <= 0.0) continue;
        std::vector<Point> pts;
        for (int v : cyc.vertex_cycle)
          pts.push_back(graph.vertices[static_cast<std::size_t>(v)]);
        if (!detail::point_in_polygon(rep, pts)) continue;
        if (!chosen || cyc.area < chosen->area) chosen = &cyc;
      }
      if (chosen) break;
    }
    if (!chosen) {
      d.skipped.push_back("component " + std::to_string(comp.label) +
                          ": no enclosing cycle");
      continue;
    }
    {
      std::vector<int> sorted(chosen->vertex_cycle);
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        d.skipped.push_back("component " + std::to_string(comp.label) +
                            ": bounding walk is not simple");
        continue;
      }
    }

    // Rotate the cycle to start at the lexicographically smallest vertex.
    std::vector<int> cyc = chosen->vertex_cycle;
    std::vector<int> eidx = chosen->edge_indices;
    std::size_t best = 0;
    for (std::size_t i = 1; i < cyc.size(); ++i)
      if (lex_less(graph.vertices[static_cast<std::size_t>(cyc[i])],
                   graph.vertices[static_cast<std::size_t>(cyc[best])]))
        best = i;
    std::rotate(cyc.begin(), cyc.begin() + static_cast<long>(best), cyc.end());
    std::rotate(eidx.begin(), eidx.begin() + static_cast<long>(best), eidx.end());

    std::vector<int> face;
    for (int v : cyc) face.push_back(emit_vertex(v));
    std::vector<int> ids;
    for (int ei : eidx)
      ids.push_back(graph.edges[static_cast<std::size_t>(ei)].segment_id);
    fs.faces.push_back(std::move(face));
    fs.face_edge_ids.push_back(std::move(ids));
    ++d.emitted;
  }
  if (candidates == 0) d.leak_suspected = true;
  return fs;
}

/// Debug dump of the label grid as an ASCII portable graymap (P2).
inline std::string label_grid_pgm(const RasterGrid& grid, int max_label) {
  std::string out = "P2\n" + std::to_string(grid.width) + " " +
                    std::to_string(grid.height) + "\n255\n";
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      int v = 0;
      if (grid.occ(x, y) == 0) {
        const int lbl = grid.label(x, y);
        v = max_label > 0 ? 55 + (200 * lbl) / std::max(1, max_label) : 255;
      }
      out += std::to_string(v);
      out += x + 1 == grid.width ? '\n' : ' ';
    }
  }
  return out;
}

}  // namespace roofvec
