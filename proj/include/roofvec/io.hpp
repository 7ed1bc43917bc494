#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "roofvec/faceset.hpp"
#include "roofvec/geometry.hpp"

namespace roofvec {

/// One building worth of detector output (boxes or segments) plus optional
/// reference faces. Coordinates are image pixels, y-down.
struct BuildingInput {
  std::string building_id;
  int width = 0;
  int height = 0;
  std::vector<OrientedBox> boxes;
  std::vector<Segment> segments;
  std::optional<FaceSet> reference;
};

struct ObbParseOptions {
  double confidence_cutoff = 0.25;
};

namespace detail {

// Principal-axis reduction of a corner quad to an oriented box. Robust to
// slightly non-rectangular quads produced by detectors.
inline OrientedBox obb_from_corners(std::span<const Point> corners) {
  Point mu{0.0, 0.0};
  for (Point c : corners) mu = mu + c;
  mu = (1.0 / static_cast<double>(corners.size())) * mu;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (Point c : corners) {
    const Point d = c - mu;
    sxx += d.x * d.x;
    sxy += d.x * d.y;
    syy += d.y * d.y;
  }
  const double theta = normalize_half_turn(0.5 * std::atan2(2.0 * sxy, sxx - syy));
  const Point u{std::cos(theta), std::sin(theta)};
  const Point v{-u.y, u.x};
  double lo_u = 0.0, hi_u = 0.0, lo_v = 0.0, hi_v = 0.0;
  bool first = true;
  for (Point c : corners) {
    const Point d = c - mu;
    const double pu = dot(d, u);
    const double pv = dot(d, v);
    if (first) {
      lo_u = hi_u = pu;
      lo_v = hi_v = pv;
      first = false;
    } else {
      lo_u = std::min(lo_u, pu);
      hi_u = std::max(hi_u, pu);
      lo_v = std::min(lo_v, pv);
      hi_v = std::max(hi_v, pv);
    }
  }
  const double w = hi_u - lo_u;
  const double h = hi_v - lo_v;
  if (w <= 0.0 || h <= 0.0)
    throw std::invalid_argument("degenerate corner quad");
  return OrientedBox(mu.x, mu.y, w, h, theta);
}

inline void check_in_frame(Point p, int width, int height,
                           const std::string& what) {
  const double mx = 0.1 * width, my = 0.1 * height;
  if (p.x < -mx || p.x > width + mx || p.y < -my || p.y > height + my)
    throw std::runtime_error(what + ": geometry outside image frame");
}

inline std::string format_coord(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace detail

/// Parses newline-delimited YOLO-OBB detections. Two line layouts are
/// auto-detected by token count:
///   class cx cy w h theta [conf]              (6 or 7 tokens)
///   class x1 y1 x2 y2 x3 y3 x4 y4 [conf]      (9 or 10 tokens)
/// All coordinates are normalized to [0,1] and scaled to pixels; corner
/// quads are reduced to boxes along their principal axis. Detections below
/// the confidence cutoff are dropped.
inline BuildingInput parse_obb_detections(std::istream& in, int width,
                                          int height,
                                          const ObbParseOptions& opts = {},
                                          std::string building_id = {}) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("image size must be positive");
  BuildingInput out;
  out.building_id = std::move(building_id);
  out.width = width;
  out.height = height;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<double> tok;
    double v;
    while (ls >> v) tok.push_back(v);
    if (tok.empty()) {
      if (!ls.eof()) {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": malformed detection line");
      }
      continue;  // blank line
    }
    if (!ls.eof())
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": malformed detection line");

    const std::size_t n = tok.size();
    double conf = 1.0;
    std::vector<Point> corners;
    if (n == 6 || n == 7) {
      if (n == 7) conf = tok[6];
      const double cx = tok[1], cy = tok[2], w = tok[3], h = tok[4],
                   theta = tok[5];
      if (w <= 0.0 || h <= 0.0)
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": non-positive box extent");
      const OrientedBox nbox(cx, cy, w, h, theta);
      for (Point c : nbox.corners()) corners.push_back(c);
    } else if (n == 9 || n == 10) {
      if (n == 10) conf = tok[9];
      for (int i = 0; i < 4; ++i)
        corners.push_back({tok[1 + 2 * i], tok[2 + 2 * i]});
    } else {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected 6, 7, 9 or 10 fields, got " +
                               std::to_string(n));
    }
    if (conf < opts.confidence_cutoff) continue;

    for (Point& c : corners) c = Point{c.x * width, c.y * height};
    OrientedBox box = [&] {
      try {
        return detail::obb_from_corners(corners);
      } catch (const std::exception&) {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": degenerate box");
      }
    }();
    for (Point c : box.corners())
      detail::check_in_frame(c, width, height,
                             "line " + std::to_string(line_no));
    out.boxes.push_back(box);
  }
  return out;
}

/// The edge list of a building, converting detector boxes on demand.
inline std::vector<Segment> building_edges(const BuildingInput& b) {
  if (!b.segments.empty()) return b.segments;
  std::vector<Segment> segs;
  segs.reserve(b.boxes.size());
  for (std::size_t i = 0; i < b.boxes.size(); ++i)
    segs.push_back(obb_to_segment(b.boxes[i], static_cast<int>(i)));
  return segs;
}

/// Segments document: UTF-8 JSON with fields `image_size` and `segments`
/// (pairs of [x, y] endpoints, pixel units). Segment ids are positional.
inline BuildingInput parse_segments(const std::string& text,
                                    std::string fallback_id = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("segments document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("image_size") ||
      !doc.contains("segments"))
    throw std::runtime_error(
        "segments document must carry image_size and segments");
  BuildingInput out;
  out.building_id =
      doc.value("building_id", fallback_id.empty() ? "building" : fallback_id);
  const auto& sz = doc["image_size"];
  if (!sz.is_array() || sz.size() != 2)
    throw std::runtime_error("image_size must be [width, height]");
  out.width = sz[0].get<int>();
  out.height = sz[1].get<int>();
  if (out.width <= 0 || out.height <= 0)
    throw std::runtime_error("image_size must be positive");
  int next_id = 0;
  for (const auto& js : doc["segments"]) {
    if (!js.is_array() || js.size() != 2 || !js[0].is_array() ||
        !js[1].is_array() || js[0].size() != 2 || js[1].size() != 2)
      throw std::runtime_error("segment " + std::to_string(next_id) +
                               " must be [[x0,y0],[x1,y1]]");
    const Point p0{js[0][0].get<double>(), js[0][1].get<double>()};
    const Point p1{js[1][0].get<double>(), js[1][1].get<double>()};
    if (p0 == p1)
      throw std::runtime_error("segment " + std::to_string(next_id) +
                               " has zero length");
    detail::check_in_frame(p0, out.width, out.height,
                           "segment " + std::to_string(next_id));
    detail::check_in_frame(p1, out.width, out.height,
                           "segment " + std::to_string(next_id));
    out.segments.push_back(make_segment(next_id, p0, p1));
    ++next_id;
  }
  return out;
}

inline std::string export_segments(const BuildingInput& b) {
  nlohmann::json doc;
  doc["building_id"] = b.building_id;
  doc["image_size"] = {b.width, b.height};
  auto segs = nlohmann::json::array();
  for (const Segment& s : building_edges(b))
    segs.push_back({{s.p0.x, s.p0.y}, {s.p1.x, s.p1.y}});
  doc["segments"] = std::move(segs);
  return doc.dump(2) + "\n";
}

/// Parsed face document (the GeoJSON product of the pipeline).
struct FaceDocument {
  std::string building_id;
  int width = 0;
  int height = 0;
  FaceSet faces;
};

/// Serializes a face set as a GeoJSON FeatureCollection: one Polygon feature
/// per face, first ring closed, pixel coordinates (y-down). building_id and
/// image_size travel as foreign members on the collection.
inline std::string export_faces_geojson(const FaceSet& fs,
                                        const std::string& building_id,
                                        int width = 0, int height = 0) {
  validate_faceset(fs);
  nlohmann::json doc;
  doc["type"] = "FeatureCollection";
  doc["building_id"] = building_id;
  if (width > 0 && height > 0) doc["image_size"] = {width, height};
  auto features = nlohmann::json::array();
  for (std::size_t f = 0; f < fs.faces.size(); ++f) {
    nlohmann::json feat;
    feat["type"] = "Feature";
    feat["properties"] = {
        {"building_id", building_id},
        {"face_index", static_cast<int>(f)},
        {"edge_ids", f < fs.face_edge_ids.size() ? fs.face_edge_ids[f]
                                                 : std::vector<int>{}}};
    auto ring = nlohmann::json::array();
    for (int idx : fs.faces[f]) {
      const Point p = fs.vertices[static_cast<std::size_t>(idx)];
      ring.push_back({p.x, p.y});
    }
    ring.push_back(ring.front());  // closed ring
    feat["geometry"] = {{"type", "Polygon"},
                        {"coordinates", nlohmann::json::array({ring})}};
    features.push_back(std::move(feat));
  }
  doc["features"] = std::move(features);
  return doc.dump(2) + "\n";
}

inline FaceDocument parse_faces_geojson(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("faces document: ") + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection")
    throw std::runtime_error("faces document must be a FeatureCollection");
  FaceDocument out;
  out.building_id = doc.value("building_id", "building");
  if (doc.contains("image_size")) {
    out.width = doc["image_size"][0].get<int>();
    out.height = doc["image_size"][1].get<int>();
  }
  // Vertex indices rebuilt by exact-coordinate dedup in first-use order;
  // export -> parse -> export is byte-stable.
  std::map<std::pair<double, double>, int> index;
  for (const auto& feat : doc.value("features", nlohmann::json::array())) {
    const auto& geom = feat.at("geometry");
    if (geom.value("type", "") != "Polygon")
      throw std::runtime_error("face geometry must be Polygon");
    const auto& rings = geom.at("coordinates");
    if (!rings.is_array() || rings.empty())
      throw std::runtime_error("polygon without rings");
    const auto& ring = rings[0];
    if (ring.size() < 4)
      throw std::runtime_error("face ring must close with >= 3 vertices");
    std::vector<int> cycle;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {  // drop closing point
      const Point p{ring[i][0].get<double>(), ring[i][1].get<double>()};
      auto [it, inserted] = index.try_emplace({p.x, p.y},
                                              static_cast<int>(out.faces.vertices.size()));
      if (inserted) out.faces.vertices.push_back(p);
      cycle.push_back(it->second);
    }
    out.faces.faces.push_back(std::move(cycle));
    std::vector<int> edge_ids;
    if (feat.contains("properties") && feat["properties"].contains("edge_ids"))
      edge_ids = feat["properties"]["edge_ids"].get<std::vector<int>>();
    out.faces.face_edge_ids.push_back(std::move(edge_ids));
  }
  validate_faceset(out.faces);
  return out;
}

/// Unique undirected face edges, deduplicated by unordered endpoint pair
/// snapped at 1e-6, in first-seen order.
inline std::vector<Segment> unique_face_edges(const FaceSet& fs) {
  auto key_of = [](Point p) {
    return std::pair<long long, long long>(
        static_cast<long long>(std::llround(p.x * 1e6)),
        static_cast<long long>(std::llround(p.y * 1e6)));
  };
  std::map<std::pair<std::pair<long long, long long>,
                     std::pair<long long, long long>>,
           int>
      seen;
  std::vector<Segment> edges;
  for (const auto& cyc : fs.faces) {
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      const Point a = fs.vertices[static_cast<std::size_t>(cyc[i])];
      const Point b =
          fs.vertices[static_cast<std::size_t>(cyc[(i + 1) % cyc.size()])];
      auto ka = key_of(a), kb = key_of(b);
      const auto key = ka < kb ? std::make_pair(ka, kb) : std::make_pair(kb, ka);
      if (seen.try_emplace(key, static_cast<int>(edges.size())).second)
        edges.push_back(make_segment(static_cast<int>(edges.size()), a, b));
    }
  }
  return edges;
}

/// Emits YOLO-OBB training labels: every unique undirected face edge exactly
/// once, as a normalized 4-corner line `0 x1 y1 x2 y2 x3 y3 x4 y4` with
/// coordinates clamped to [0,1].
inline std::vector<std::string> export_training_labels(const FaceSet& fs,
                                                       double thickness,
                                                       int width, int height) {
  if (thickness <= 0.0)
    throw std::invalid_argument("label thickness must be positive");
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("image size must be positive");
  validate_faceset(fs);
  std::vector<std::string> lines;
  for (const Segment& e : unique_face_edges(fs)) {
    const OrientedBox box = segment_to_obb(e, thickness);
    std::string line = "0";
    for (Point c : box.corners()) {
      const double nx = std::clamp(c.x / width, 0.0, 1.0);
      const double ny = std::clamp(c.y / height, 0.0, 1.0);
      line += " " + detail::format_coord(nx) + " " + detail::format_coord(ny);
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace roofvec
