#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "roofvec/faceset.hpp"
#include "roofvec/geometry.hpp"
#include "roofvec/polygonize.hpp"

namespace roofvec {

enum RenderLayer : unsigned {
  kLayerEdges = 1u << 0,
  kLayerGraph = 1u << 1,
  kLayerFaces = 1u << 2,
  kLayerReference = 1u << 3,
};

struct RenderSpec {
  int width = 0;
  int height = 0;
  unsigned layers = kLayerFaces;
  std::uint64_t palette_seed = 0;
};

struct RenderInput {
  const std::vector<Segment>* edges = nullptr;
  const RoofGraph* graph = nullptr;
  const FaceSet* faces = nullptr;
  const FaceSet* reference = nullptr;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string hsl_to_hex(double h_deg, double s, double l) {
  const double c = (1.0 - std::abs(2.0 * l - 1.0)) * s;
  const double hp = h_deg / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else { r = c; b = x; }
  const double m = l - c / 2.0;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround((r + m) * 255.0)),
                static_cast<int>(std::lround((g + m) * 255.0)),
                static_cast<int>(std::lround((b + m) * 255.0)));
  return buf;
}

/// Evenly spaced hues keyed on face index and palette seed.
inline std::string face_color(std::size_t index, std::size_t count,
                              std::uint64_t seed) {
  const double offset = static_cast<double>(seed % 360u);
  const double hue =
      std::fmod(offset + 360.0 * static_cast<double>(index) /
                             static_cast<double>(std::max<std::size_t>(count, 1)),
                360.0);
  return hsl_to_hex(hue, 0.65, 0.55);
}

inline void append_faces(std::string& svg, const FaceSet& fs,
                         std::uint64_t seed, double opacity,
                         const std::string& stroke) {
  for (std::size_t f = 0; f < fs.faces.size(); ++f) {
    svg += "  <path d=\"";
    bool first = true;
    for (int idx : fs.faces[f]) {
      const Point p = fs.vertices[static_cast<std::size_t>(idx)];
      svg += (first ? "M " : "L ") + fmt(p.x) + " " + fmt(p.y) + " ";
      first = false;
    }
    svg += "Z\" fill=\"" + face_color(f, fs.faces.size(), seed) +
           "\" fill-opacity=\"" + fmt(opacity) + "\" stroke=\"" + stroke +
           "\" stroke-width=\"1\"/>\n";
  }
}

}  // namespace detail

/// Deterministic SVG 1.1 overlay of the requested layers. Faces are filled
/// with distinct hues, graph vertices drawn as dots, edges as lines.
inline std::string render_svg(const RenderInput& in, const RenderSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0)
    throw std::invalid_argument("render size must be positive");
  if (spec.layers == 0)
    throw std::invalid_argument("render spec requests no layers");
  auto missing = [](const char* layer) {
    throw std::invalid_argument(std::string("missing data for layer: ") + layer);
  };
  if ((spec.layers & kLayerEdges) && (!in.edges || in.edges->empty()))
    missing("edges");
  if ((spec.layers & kLayerGraph) && (!in.graph || in.graph->edges.empty()))
    missing("graph");
  if ((spec.layers & kLayerFaces) && (!in.faces || in.faces->empty()))
    missing("faces");
  if ((spec.layers & kLayerReference) &&
      (!in.reference || in.reference->empty()))
    missing("reference");

  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(spec.width) + "\" height=\"" +
         std::to_string(spec.height) + "\" viewBox=\"0 0 " +
         std::to_string(spec.width) + " " + std::to_string(spec.height) +
         "\">\n";
  svg += "  <rect width=\"100%\" height=\"100%\" fill=\"#1b1b1b\"/>\n";

  if (spec.layers & kLayerReference)
    detail::append_faces(svg, *in.reference, spec.palette_seed + 7, 0.25,
                         "#888888");
  if (spec.layers & kLayerFaces)
    detail::append_faces(svg, *in.faces, spec.palette_seed, 0.8, "#ffffff");
  if (spec.layers & kLayerEdges)
    for (const Segment& s : *in.edges)
      svg += "  <line x1=\"" + detail::fmt(s.p0.x) + "\" y1=\"" +
             detail::fmt(s.p0.y) + "\" x2=\"" + detail::fmt(s.p1.x) +
             "\" y2=\"" + detail::fmt(s.p1.y) +
             "\" stroke=\"#f4d03f\" stroke-width=\"1.5\"/>\n";
  if (spec.layers & kLayerGraph) {
    for (const auto& e : in.graph->edges) {
      const Point a = in.graph->vertices[static_cast<std::size_t>(e.v0)];
      const Point b = in.graph->vertices[static_cast<std::size_t>(e.v1)];
      svg += "  <line x1=\"" + detail::fmt(a.x) + "\" y1=\"" +
             detail::fmt(a.y) + "\" x2=\"" + detail::fmt(b.x) + "\" y2=\"" +
             detail::fmt(b.y) + "\" stroke=\"#ffffff\" stroke-width=\"1\"/>\n";
    }
    for (const Point& v : in.graph->vertices)
      svg += "  <circle cx=\"" + detail::fmt(v.x) + "\" cy=\"" +
             detail::fmt(v.y) + "\" r=\"2.5\" fill=\"#ffffff\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace roofvec
