#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "roofvec/faces.hpp"
#include "roofvec/faceset.hpp"
#include "roofvec/geometry.hpp"
#include "roofvec/polygonize.hpp"

namespace roofvec {

inline constexpr const char* kVersion = "0.1.0";

/// Tunables of the polygonization pipeline. eps defaults to 12 px at a
/// 1024 px image scale and scales linearly with image size; an absolute
/// override wins.
struct PipelineParams {
  std::optional<double> eps;        // absolute override, px
  double eps_base = 12.0;           // at 1024 px
  double tau_line = 3.0;            // px
  double l_max_frac = 0.25;         // fraction of the image diagonal
  double r_int_factor = 3.0;        // times eps
  std::optional<double> graph_snap; // px; default eps / 2
  double a_min = 16.0;              // px^2
  double eps_ang = 1e-6;            // rad, parallel-line gate

  double eps_for(int width, int height) const {
    if (eps) return *eps;
    return eps_base * (static_cast<double>(std::max(width, height)) / 1024.0);
  }
  double l_max_for(int width, int height) const {
    return l_max_frac * std::hypot(static_cast<double>(width),
                                   static_cast<double>(height));
  }
};

/// Structured report of everything the pipeline dropped, fused or skipped.
struct Diagnostics {
  int junction_clusters = 0;
  int gap_clusters = 0;
  int suggested_junctions = 0;
  int fused_gaps = 0;
  std::vector<int> discarded_segment_ids;
  std::vector<int> dangling_segment_ids;
  int duplicate_edges_dropped = 0;
  int clipped_pixels = 0;
  int component_count = 0;
  int faces_emitted = 0;
  int sliver_components = 0;
  std::vector<std::string> skipped_faces;
  bool leak_suspected = false;
};

inline nlohmann::json to_json(const Diagnostics& d) {
  return nlohmann::json{{"junction_clusters", d.junction_clusters},
                        {"gap_clusters", d.gap_clusters},
                        {"suggested_junctions", d.suggested_junctions},
                        {"fused_gaps", d.fused_gaps},
                        {"discarded_segment_ids", d.discarded_segment_ids},
                        {"dangling_segment_ids", d.dangling_segment_ids},
                        {"duplicate_edges_dropped", d.duplicate_edges_dropped},
                        {"clipped_pixels", d.clipped_pixels},
                        {"component_count", d.component_count},
                        {"faces_emitted", d.faces_emitted},
                        {"sliver_components", d.sliver_components},
                        {"skipped_faces", d.skipped_faces},
                        {"leak_suspected", d.leak_suspected}};
}

struct BuildingResult {
  RoofGraph graph;
  FaceSet faces;
  Diagnostics diagnostics;
};

/// Edge complementation only: cluster endpoints, snap junctions, close gaps,
/// build the graph. The pipeline merges graph vertices at eps/2 by default:
/// endpoints that DBSCAN would have clustered anyway may end up that far
/// apart when a gap fuses to a pair intersection while its cluster mates
/// snapped to the centroid.
inline RoofGraph complete_edges(std::span<const Segment> segments, int width,
                                int height, const PipelineParams& params,
                                Diagnostics& diag) {
  const double eps = params.eps_for(width, height);
  const double snap = params.graph_snap ? *params.graph_snap : eps / 2.0;

  ClusterResult clustered = cluster_endpoints(segments, eps);
  diag.discarded_segment_ids = clustered.discarded_segment_ids;
  for (const Cluster& c : clustered.clusters)
    (c.kind == ClusterKind::Junction ? diag.junction_clusters
                                     : diag.gap_clusters)++;

  std::vector<Segment> survivors(segments.begin(), segments.end());
  std::erase_if(survivors, [&](const Segment& s) {
    return std::binary_search(diag.discarded_segment_ids.begin(),
                              diag.discarded_segment_ids.end(), s.id);
  });

  SnapResult snapped = snap_junctions(clustered.clusters, survivors,
                                      params.r_int_factor * eps, params.eps_ang);
  diag.suggested_junctions = static_cast<int>(snapped.suggestions.size());

  GapLimits limits{params.tau_line, params.l_max_for(width, height)};
  GapResult completed = complete_gaps(snapped.segments, clustered.clusters,
                                      snapped.suggestions, limits);
  diag.fused_gaps = completed.fused;
  diag.dangling_segment_ids = completed.dangling_segment_ids;

  GraphResult built = build_graph(completed.segments, snap);
  diag.duplicate_edges_dropped = built.duplicate_edges_dropped;
  for (int id : built.dropped_segment_ids)
    diag.discarded_segment_ids.push_back(id);
  for (int id : built.degree1_segment_ids)
    diag.dangling_segment_ids.push_back(id);
  std::sort(diag.dangling_segment_ids.begin(), diag.dangling_segment_ids.end());
  diag.dangling_segment_ids.erase(std::unique(diag.dangling_segment_ids.begin(),
                                              diag.dangling_segment_ids.end()),
                                  diag.dangling_segment_ids.end());
  return std::move(built.graph);
}

/// Full per-building pipeline: edge complementation, rasterization,
/// component labeling, incidence collection and face vectorization.
inline BuildingResult polygonize_building(std::span<const Segment> segments,
                                          int width, int height,
                                          const PipelineParams& params = {}) {
  BuildingResult out;
  out.graph = complete_edges(segments, width, height, params, out.diagnostics);
  if (out.graph.edges.empty()) {
    out.diagnostics.leak_suspected = true;
    return out;
  }
  EdgeRaster raster = rasterize_edges(out.graph, width, height);
  out.diagnostics.clipped_pixels = raster.clipped_pixels;
  LabelResult labels = label_components(raster.grid);
  out.diagnostics.component_count = labels.component_count;
  const auto incidence = collect_incident_edges(raster.grid, raster.edge_pixels,
                                                labels.component_count);
  FaceDiagnostics fd;
  out.faces = vectorize_faces(out.graph, labels, incidence,
                              FaceParams{params.a_min}, &fd);
  out.diagnostics.faces_emitted = fd.emitted;
  out.diagnostics.sliver_components = fd.sliver_components;
  out.diagnostics.skipped_faces = fd.skipped;
  out.diagnostics.leak_suspected = fd.leak_suspected;
  return out;
}

}  // namespace roofvec
