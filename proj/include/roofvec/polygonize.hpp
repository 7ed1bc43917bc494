#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "roofvec/geometry.hpp"

namespace roofvec {

enum class Which { First = 0, Second = 1 };

struct EndpointRef {
  int segment_id = 0;
  Which which = Which::First;
};

enum class ClusterKind { Junction, Gap };

/// A DBSCAN endpoint cluster: Junction (>= 2 members, a roof corner) or Gap
/// (singleton, an under-covered edge end).
struct Cluster {
  std::vector<EndpointRef> members;
  ClusterKind kind = ClusterKind::Gap;
  Point centroid;
};

enum class JunctionOrigin { ClusterCentroid, PairIntersection };

struct SuggestedJunction {
  Point position;
  JunctionOrigin origin = JunctionOrigin::ClusterCentroid;
};

/// Junction vertices plus edges referencing them; the completed topology.
struct RoofGraph {
  struct Edge {
    int v0 = 0;
    int v1 = 0;
    int segment_id = 0;
  };
  std::vector<Point> vertices;
  std::vector<Edge> edges;
};

struct ClusterResult {
  std::vector<Cluster> clusters;
  std::vector<int> discarded_segment_ids;  // shorter than eps, both ends met
};

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  }
  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

inline std::vector<Cluster> cluster_pass(std::span<const Segment> segments,
                                         double eps) {
  struct Ep {
    Point pos;
    EndpointRef ref;
  };
  std::vector<Ep> eps_list;
  eps_list.reserve(segments.size() * 2);
  for (const Segment& s : segments) {
    eps_list.push_back({s.p0, {s.id, Which::First}});
    eps_list.push_back({s.p1, {s.id, Which::Second}});
  }
  const int n = static_cast<int>(eps_list.size());
  UnionFind uf(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (distance(eps_list[static_cast<std::size_t>(i)].pos,
                   eps_list[static_cast<std::size_t>(j)].pos) <= eps)
        uf.merge(i, j);

  std::unordered_map<int, int> slot;  // root -> cluster index
  std::vector<Cluster> clusters;
  for (int i = 0; i < n; ++i) {
    const int root = uf.find(i);
    auto [it, inserted] = slot.try_emplace(root, static_cast<int>(clusters.size()));
    if (inserted) clusters.emplace_back();
    Cluster& c = clusters[static_cast<std::size_t>(it->second)];
    c.members.push_back(eps_list[static_cast<std::size_t>(i)].ref);
    c.centroid = c.centroid + eps_list[static_cast<std::size_t>(i)].pos;
  }
  for (Cluster& c : clusters) {
    c.centroid = (1.0 / static_cast<double>(c.members.size())) * c.centroid;
    c.kind = c.members.size() >= 2 ? ClusterKind::Junction : ClusterKind::Gap;
  }
  return clusters;
}

}  // namespace detail

/// DBSCAN over all segment endpoints with minPts = 1: every endpoint is
/// assigned, singletons form Gap clusters, density-reachable chains merge.
/// A segment whose two endpoints land in the same cluster is discarded
/// (it is shorter than the cluster scale) and clustering is re-run on the
/// survivors.
inline ClusterResult cluster_endpoints(std::span<const Segment> segments,
                                       double eps) {
  if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
  ClusterResult out;
  std::vector<Segment> work(segments.begin(), segments.end());

  auto clusters = detail::cluster_pass(work, eps);
  std::vector<int> bad;
  for (const Cluster& c : clusters) {
    std::unordered_map<int, int> count;
    for (const EndpointRef& r : c.members) ++count[r.segment_id];
    for (auto [sid, k] : count)
      if (k == 2) bad.push_back(sid);
  }
  if (!bad.empty()) {
    std::sort(bad.begin(), bad.end());
    out.discarded_segment_ids = bad;
    std::erase_if(work, [&](const Segment& s) {
      return std::binary_search(bad.begin(), bad.end(), s.id);
    });
    clusters = work.empty() ? std::vector<Cluster>{}
                            : detail::cluster_pass(work, eps);
  }
  out.clusters = std::move(clusters);
  return out;
}

struct SnapResult {
  std::vector<Segment> segments;
  std::vector<SuggestedJunction> suggestions;
};

/// Moves every Junction-cluster endpoint to the cluster centroid, records
/// the centroid as a suggested junction, and for every pair of cluster-mate
/// edges records their supporting-line intersection (when defined and within
/// r_int of the centroid) as an additional suggestion. Intersections use the
/// pre-snap edge geometry.
inline SnapResult snap_junctions(std::span<const Cluster> clusters,
                                 std::span<const Segment> segments,
                                 double r_int, double eps_ang = 1e-6) {
  SnapResult out;
  out.segments.assign(segments.begin(), segments.end());
  std::unordered_map<int, std::size_t> by_id;
  for (std::size_t i = 0; i < out.segments.size(); ++i)
    by_id[out.segments[i].id] = i;

  for (const Cluster& c : clusters) {
    if (c.kind != ClusterKind::Junction) continue;
    out.suggestions.push_back({c.centroid, JunctionOrigin::ClusterCentroid});
    for (std::size_t i = 0; i < c.members.size(); ++i) {
      for (std::size_t j = i + 1; j < c.members.size(); ++j) {
        const int ida = c.members[i].segment_id;
        const int idb = c.members[j].segment_id;
        if (ida == idb) continue;
        const Segment& a = segments[by_id.at(ida)];
        const Segment& b = segments[by_id.at(idb)];
        if (auto x = line_intersection(a, b, eps_ang);
            x && distance(*x, c.centroid) <= r_int)
          out.suggestions.push_back({*x, JunctionOrigin::PairIntersection});
      }
    }
  }
  for (const Cluster& c : clusters) {
    if (c.kind != ClusterKind::Junction) continue;
    for (const EndpointRef& r : c.members) {
      Segment& s = out.segments[by_id.at(r.segment_id)];
      (r.which == Which::First ? s.p0 : s.p1) = c.centroid;
    }
  }
  return out;
}

struct GapLimits {
  double tau_line = 3.0;  // max perpendicular distance to the edge line
  double l_max = 0.0;     // max forward extension length
};

struct GapResult {
  std::vector<Segment> segments;
  int fused = 0;
  std::vector<int> dangling_segment_ids;
};

/// Fuses each Gap endpoint with the nearest suggested junction that lies on
/// the edge's supporting line (within tau_line) in the outward extension
/// direction, no farther than l_max. Unfusable gap edges are left unmodified
/// and flagged dangling. Gaps are processed by descending edge length (ties
/// by segment id); fusions never spawn new suggestions.
inline GapResult complete_gaps(std::span<const Segment> segments,
                               std::span<const Cluster> clusters,
                               std::span<const SuggestedJunction> suggestions,
                               const GapLimits& limits) {
  GapResult out;
  out.segments.assign(segments.begin(), segments.end());
  std::unordered_map<int, std::size_t> by_id;
  for (std::size_t i = 0; i < out.segments.size(); ++i)
    by_id[out.segments[i].id] = i;

  struct GapRef {
    int segment_id;
    Which which;
    double length;
  };
  std::vector<GapRef> gaps;
  for (const Cluster& c : clusters) {
    if (c.kind != ClusterKind::Gap) continue;
    for (const EndpointRef& r : c.members) {
      auto it = by_id.find(r.segment_id);
      if (it == by_id.end()) continue;  // segment was discarded
      gaps.push_back({r.segment_id, r.which, out.segments[it->second].length()});
    }
  }
  std::sort(gaps.begin(), gaps.end(), [](const GapRef& a, const GapRef& b) {
    if (a.length != b.length) return a.length > b.length;
    if (a.segment_id != b.segment_id) return a.segment_id < b.segment_id;
    return a.which < b.which;
  });

  std::vector<int> dangling;
  for (const GapRef& g : gaps) {
    Segment& s = out.segments[by_id.at(g.segment_id)];
    const Point x = g.which == Which::First ? s.p0 : s.p1;
    const Point o = g.which == Which::First ? s.p1 : s.p0;
    const double len = distance(x, o);
    const Point u = (1.0 / len) * (x - o);

    const SuggestedJunction* best = nullptr;
    double best_dist = 0.0;
    for (const SuggestedJunction& j : suggestions) {
      const double perp = std::abs(cross(u, j.position - o));
      if (perp > limits.tau_line) continue;
      const double fwd = dot(j.position - x, u);
      if (fwd < -1e-9 || fwd > limits.l_max) continue;
      const double d = distance(j.position, x);
      if (!best || d < best_dist) {
        best = &j;
        best_dist = d;
      }
    }
    if (best) {
      (g.which == Which::First ? s.p0 : s.p1) = best->position;
      ++out.fused;
    } else {
      dangling.push_back(g.segment_id);
    }
  }
  std::sort(dangling.begin(), dangling.end());
  dangling.erase(std::unique(dangling.begin(), dangling.end()), dangling.end());
  out.dangling_segment_ids = std::move(dangling);
  return out;
}

struct GraphResult {
  RoofGraph graph;
  std::vector<int> dropped_segment_ids;  // collapsed to a self-loop
  int duplicate_edges_dropped = 0;
  std::vector<int> degree1_segment_ids;  // stubs: an endpoint of degree 1
};

/// Merges coincident endpoints (within snap_tol) into vertices and each
/// segment into one graph edge; duplicate unordered vertex pairs collapse
/// keeping the first. Vertex positions are the mean of merged endpoints.
inline GraphResult build_graph(std::span<const Segment> segments,
                               double snap_tol = 1e-6) {
  GraphResult out;
  struct Ep {
    Point pos;
    std::size_t seg;
    Which which;
  };
  std::vector<Ep> eps_list;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    eps_list.push_back({segments[i].p0, i, Which::First});
    eps_list.push_back({segments[i].p1, i, Which::Second});
  }
  const int n = static_cast<int>(eps_list.size());
  detail::UnionFind uf(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (distance(eps_list[static_cast<std::size_t>(i)].pos,
                   eps_list[static_cast<std::size_t>(j)].pos) <= snap_tol)
        uf.merge(i, j);

  std::unordered_map<int, int> vertex_of_root;
  std::vector<Point> sums;
  std::vector<int> counts;
  std::vector<int> vertex_of_ep(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int root = uf.find(i);
    auto [it, inserted] =
        vertex_of_root.try_emplace(root, static_cast<int>(sums.size()));
    if (inserted) {
      sums.push_back({0, 0});
      counts.push_back(0);
    }
    const int vi = it->second;
    sums[static_cast<std::size_t>(vi)] =
        sums[static_cast<std::size_t>(vi)] + eps_list[static_cast<std::size_t>(i)].pos;
    ++counts[static_cast<std::size_t>(vi)];
    vertex_of_ep[static_cast<std::size_t>(i)] = vi;
  }
  out.graph.vertices.resize(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i)
    out.graph.vertices[i] = (1.0 / counts[i]) * sums[i];

  std::unordered_map<long long, int> edge_seen;  // packed (min,max) pair
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const int a = vertex_of_ep[2 * i];
    const int b = vertex_of_ep[2 * i + 1];
    if (a == b) {
      out.dropped_segment_ids.push_back(segments[i].id);
      continue;
    }
    const long long key =
        (static_cast<long long>(std::min(a, b)) << 32) | std::max(a, b);
    if (!edge_seen.try_emplace(key, static_cast<int>(out.graph.edges.size()))
             .second) {
      ++out.duplicate_edges_dropped;
      continue;
    }
    out.graph.edges.push_back({a, b, segments[i].id});
  }

  std::vector<int> degree(out.graph.vertices.size(), 0);
  for (const auto& e : out.graph.edges) {
    ++degree[static_cast<std::size_t>(e.v0)];
    ++degree[static_cast<std::size_t>(e.v1)];
  }
  for (const auto& e : out.graph.edges)
    if (degree[static_cast<std::size_t>(e.v0)] == 1 ||
        degree[static_cast<std::size_t>(e.v1)] == 1)
      out.degree1_segment_ids.push_back(e.segment_id);
  return out;
}

}  // namespace roofvec
