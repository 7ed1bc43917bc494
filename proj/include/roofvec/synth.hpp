#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "roofvec/faceset.hpp"
#include "roofvec/geometry.hpp"

namespace roofvec {

enum class RoofKind { FlatRect, Gable, Hip, CrossGable, LShape };

inline std::string to_string(RoofKind k) {
  switch (k) {
    case RoofKind::FlatRect: return "flat-rect";
    case RoofKind::Gable: return "gable";
    case RoofKind::Hip: return "hip";
    case RoofKind::CrossGable: return "cross-gable";
    case RoofKind::LShape: return "l-shape";
  }
  return "?";
}

inline RoofKind roof_kind_from_string(const std::string& s) {
  if (s == "flat-rect") return RoofKind::FlatRect;
  if (s == "gable") return RoofKind::Gable;
  if (s == "hip") return RoofKind::Hip;
  if (s == "cross-gable") return RoofKind::CrossGable;
  if (s == "l-shape") return RoofKind::LShape;
  throw std::invalid_argument("unknown roof kind: " + s);
}

inline constexpr RoofKind kAllRoofKinds[] = {
    RoofKind::FlatRect, RoofKind::Gable, RoofKind::Hip, RoofKind::CrossGable,
    RoofKind::LShape};

/// Expected face count per template kind.
inline int face_count_of(RoofKind k) {
  switch (k) {
    case RoofKind::FlatRect: return 1;
    case RoofKind::Gable: return 2;
    case RoofKind::Hip: return 4;
    case RoofKind::CrossGable: return 4;
    case RoofKind::LShape: return 2;
  }
  return 0;
}

struct RoofTemplate {
  RoofKind kind = RoofKind::Gable;
  double x0 = 0.0;
  double y0 = 0.0;
  double width = 0.0;
  double height = 0.0;
  std::uint64_t seed = 0;
};

struct SynthRoof {
  FaceSet faces;
  std::vector<Segment> edges;  // unique undirected face edges, ids 0..M-1
};

/// Corruption model for detector failure modes: symmetric end truncation
/// (edge gaps), Gaussian endpoint jitter, rotation jitter about the
/// midpoint, and whole-edge dropout.
struct CorruptionSpec {
  double truncate_px = 0.0;
  double jitter_sigma = 0.0;
  double drop_prob = 0.0;
  double angle_jitter = 0.0;
  std::uint64_t seed = 0;
};

namespace rng {

// splitmix64; used both as a generator and to derive per-edge streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Stream {
  std::uint64_t state;
  explicit Stream(std::uint64_t seed) : state(seed) {}

  double u01() {
    return (splitmix64(state) >> 11) * (1.0 / 9007199254740992.0);
  }
  // Box-Muller, no second-draw caching.
  double gaussian() {
    double u1 = u01();
    while (u1 <= 0.0) u1 = u01();
    const double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }
};

inline Stream edge_stream(std::uint64_t seed, int edge_id) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(edge_id) + 1));
  splitmix64(s);
  return Stream(s);
}

}  // namespace rng

namespace detail {

struct RoofBuilder {
  std::vector<Point> vertices;
  std::vector<std::vector<int>> faces;

  int v(double x, double y) {
    vertices.push_back({x, y});
    return static_cast<int>(vertices.size()) - 1;
  }
  void face(std::vector<int> cycle) { faces.push_back(std::move(cycle)); }
};

inline void build_flat(RoofBuilder& b, double W, double H) {
  const int a = b.v(0, 0), c = b.v(W, 0), d = b.v(W, H), e = b.v(0, H);
  b.face({a, c, d, e});
}

inline void build_gable(RoofBuilder& b, double W, double H, rng::Stream& r) {
  const double yr = H * r.uniform(0.45, 0.55);
  const int v0 = b.v(0, 0), v1 = b.v(W, 0), v2 = b.v(W, yr), v3 = b.v(W, H),
            v4 = b.v(0, H), v5 = b.v(0, yr);
  b.face({v0, v1, v2, v5});
  b.face({v5, v2, v3, v4});
}

inline void build_hip(RoofBuilder& b, double W, double H) {
  // 45 degree hip lines: ridge inset equals half the short extent.
  const double inset = H / 2.0;
  if (W - 2.0 * inset < 4.0)
    throw std::invalid_argument(
        "hip footprint must be elongated (width > height + 4)");
  const double ym = H / 2.0;
  const int v0 = b.v(0, 0), v1 = b.v(W, 0), v2 = b.v(W, H), v3 = b.v(0, H),
            v4 = b.v(inset, ym), v5 = b.v(W - inset, ym);
  b.face({v0, v1, v5, v4});  // north trapezoid
  b.face({v1, v2, v5});      // east triangle
  b.face({v2, v3, v4, v5});  // south trapezoid
  b.face({v3, v0, v4});      // west triangle
}

inline void build_lshape(RoofBuilder& b, double W, double H, rng::Stream& r) {
  const double ya = H * r.uniform(0.35, 0.5);   // bar depth
  const double xb = W * r.uniform(0.35, 0.5);   // wing width
  const int v0 = b.v(0, 0), v1 = b.v(W, 0), v2 = b.v(W, ya), v3 = b.v(xb, ya),
            v4 = b.v(xb, H), v5 = b.v(0, H), v6 = b.v(0, ya);
  b.face({v0, v1, v2, v3, v6});
  b.face({v6, v3, v4, v5});
}

inline void build_crossgable(RoofBuilder& b, double W, double H,
                             rng::Stream& r) {
  const double hm = H * r.uniform(0.45, 0.55);  // main block depth
  double ww = W * r.uniform(0.18, 0.28);        // wing width
  ww = std::min(ww, 0.8 * hm);                  // valley apex stays below ridge
  const double cx = W * r.uniform(0.4, 0.6);
  const double yr = hm / 2.0, ye = hm, yb = H;
  const double xw0 = cx - ww / 2.0, xw1 = cx + ww / 2.0;
  const double ya = ye - ww / 2.0;  // valley apex
  const int v0 = b.v(0, 0), v1 = b.v(W, 0), v2 = b.v(W, yr), v3 = b.v(W, ye),
            v4 = b.v(xw1, ye), v5 = b.v(cx, ya), v6 = b.v(xw0, ye),
            v7 = b.v(0, ye), v8 = b.v(0, yr), v9 = b.v(xw0, yb),
            v10 = b.v(cx, yb), v11 = b.v(xw1, yb);
  b.face({v0, v1, v2, v8});                  // north main
  b.face({v8, v2, v3, v4, v5, v6, v7});      // south main with wing notch
  b.face({v6, v5, v10, v9});                 // wing west
  b.face({v4, v11, v10, v5});                // wing east
}

inline void derive_edges(SynthRoof& roof) {
  std::vector<std::pair<int, int>> keys;
  auto find_or_add = [&](int a, int bb) {
    const auto key = a < bb ? std::make_pair(a, bb) : std::make_pair(bb, a);
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (keys[i] == key) return static_cast<int>(i);
    keys.push_back(key);
    return static_cast<int>(keys.size()) - 1;
  };
  roof.faces.face_edge_ids.assign(roof.faces.faces.size(), {});
  for (std::size_t f = 0; f < roof.faces.faces.size(); ++f) {
    const auto& cyc = roof.faces.faces[f];
    for (std::size_t i = 0; i < cyc.size(); ++i)
      roof.faces.face_edge_ids[f].push_back(
          find_or_add(cyc[i], cyc[(i + 1) % cyc.size()]));
  }
  roof.edges.clear();
  for (std::size_t i = 0; i < keys.size(); ++i)
    roof.edges.push_back(make_segment(
        static_cast<int>(i), roof.faces.vertices[static_cast<std::size_t>(keys[i].first)],
        roof.faces.vertices[static_cast<std::size_t>(keys[i].second)]));
}

}  // namespace detail

/// Generates the ground-truth face set and its unique edge list for one
/// template. Deterministic per (kind, footprint, seed); the seed varies
/// internal proportions without changing the face count.
inline SynthRoof generate(const RoofTemplate& tmpl) {
  if (tmpl.width < 32.0 || tmpl.height < 32.0)
    throw std::invalid_argument("footprint too small for roof template (< 32 px side)");
  // Canonical frame: long axis along x; transpose back afterwards.
  const bool transpose = tmpl.height > tmpl.width;
  const double W = transpose ? tmpl.height : tmpl.width;
  const double H = transpose ? tmpl.width : tmpl.height;
  rng::Stream r(tmpl.seed * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);

  detail::RoofBuilder b;
  switch (tmpl.kind) {
    case RoofKind::FlatRect: detail::build_flat(b, W, H); break;
    case RoofKind::Gable: detail::build_gable(b, W, H, r); break;
    case RoofKind::Hip: detail::build_hip(b, W, H); break;
    case RoofKind::CrossGable: detail::build_crossgable(b, W, H, r); break;
    case RoofKind::LShape: detail::build_lshape(b, W, H, r); break;
  }

  SynthRoof roof;
  roof.faces.vertices = std::move(b.vertices);
  roof.faces.faces = std::move(b.faces);
  for (Point& p : roof.faces.vertices) {
    if (transpose) std::swap(p.x, p.y);
    p.x += tmpl.x0;
    p.y += tmpl.y0;
  }
  for (auto& cyc : roof.faces.faces) {
    std::vector<Point> pts;
    for (int i : cyc) pts.push_back(roof.faces.vertices[static_cast<std::size_t>(i)]);
    if (polygon_signed_area(pts) < 0.0)
      std::reverse(cyc.begin(), cyc.end());
  }
  detail::derive_edges(roof);
  validate_faceset(roof.faces);
  return roof;
}

/// Applies the corruption model. Deterministic under a fixed seed; each edge
/// consumes an independent random stream keyed by its id, so decisions are
/// order-independent.
inline std::vector<Segment> corrupt(std::span<const Segment> edges,
                                    const CorruptionSpec& spec) {
  if (spec.truncate_px < 0.0 || spec.jitter_sigma < 0.0 ||
      spec.angle_jitter < 0.0 || spec.drop_prob < 0.0 || spec.drop_prob >= 1.0)
    throw std::invalid_argument("corruption parameters out of range");
  std::vector<Segment> out;
  out.reserve(edges.size());
  for (const Segment& e : edges) {
    rng::Stream r = rng::edge_stream(spec.seed, e.id);
    const double drop_u = r.u01();
    if (drop_u < spec.drop_prob) continue;

    Point p0 = e.p0, p1 = e.p1;
    if (spec.truncate_px > 0.0) {
      const double len = distance(p0, p1);
      if (len < 2.0 * spec.truncate_px + 1.0) continue;  // fully swallowed
      const Point u = (1.0 / len) * (p1 - p0);
      p0 = p0 + spec.truncate_px * u;
      p1 = p1 - spec.truncate_px * u;
    }
    if (spec.angle_jitter > 0.0) {
      const double a = spec.angle_jitter * r.gaussian();
      const Point mid{(p0.x + p1.x) / 2.0, (p0.y + p1.y) / 2.0};
      const double ca = std::cos(a), sa = std::sin(a);
      auto rot = [&](Point p) {
        const Point d = p - mid;
        return Point{mid.x + ca * d.x - sa * d.y, mid.y + sa * d.x + ca * d.y};
      };
      p0 = rot(p0);
      p1 = rot(p1);
    }
    if (spec.jitter_sigma > 0.0) {
      p0.x += spec.jitter_sigma * r.gaussian();
      p0.y += spec.jitter_sigma * r.gaussian();
      p1.x += spec.jitter_sigma * r.gaussian();
      p1.y += spec.jitter_sigma * r.gaussian();
    }
    if (p0 == p1) continue;
    out.push_back({e.id, p0, p1});
  }
  return out;
}

}  // namespace roofvec
