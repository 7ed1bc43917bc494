// roofvec command line: polygonize roof-edge detections into face polygons,
// evaluate predictions against references, generate synthetic test roofs and
// render qualitative SVG overlays.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "roofvec/faces.hpp"
#include "roofvec/io.hpp"
#include "roofvec/metrics.hpp"
#include "roofvec/pipeline.hpp"
#include "roofvec/render.hpp"
#include "roofvec/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class LogLevel { Debug = 0, Info, Warn, Error, Quiet };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("ROOFVEC_LOG");
    if (!env) return LogLevel::Info;
    const std::string v = env;
    if (v == "debug") return LogLevel::Debug;
    if (v == "info") return LogLevel::Info;
    if (v == "warn") return LogLevel::Warn;
    if (v == "error") return LogLevel::Error;
    if (v == "quiet") return LogLevel::Quiet;
    return LogLevel::Info;
  }();
  return level;
}

std::mutex g_log_mutex;

void log_at(LogLevel lvl, const char* tag, const std::string& msg) {
  if (lvl < log_level()) return;
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::fprintf(stderr, "[roofvec] %s: %s\n", tag, msg.c_str());
}
void log_debug(const std::string& m) { log_at(LogLevel::Debug, "debug", m); }
void log_info(const std::string& m) { log_at(LogLevel::Info, "info", m); }
void log_warn(const std::string& m) { log_at(LogLevel::Warn, "warn", m); }
void log_error(const std::string& m) { log_at(LogLevel::Error, "error", m); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Atomic write: temp file in the target directory, then rename.
void write_file(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

int default_jobs() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

struct BuildingStatus {
  std::string id;
  std::string status;  // ok | error | skipped
  std::string message;
};

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const json& config, std::vector<BuildingStatus> statuses) {
  std::sort(statuses.begin(), statuses.end(),
            [](const BuildingStatus& a, const BuildingStatus& b) {
              return a.id < b.id;
            });
  json doc;
  doc["tool"] = "roofvec";
  doc["version"] = roofvec::kVersion;
  doc["command"] = command;
  doc["config"] = config;
  auto arr = json::array();
  int ok = 0, err = 0, skipped = 0;
  for (const auto& s : statuses) {
    arr.push_back({{"id", s.id}, {"status", s.status}, {"message", s.message}});
    if (s.status == "ok") ++ok;
    else if (s.status == "error") ++err;
    else ++skipped;
  }
  doc["buildings"] = std::move(arr);
  doc["counts"] = {{"ok", ok}, {"error", err}, {"skipped", skipped}};
  write_file(out_dir / "run_manifest.json", doc.dump(2) + "\n");
}

bool auxiliary_file(const fs::path& p) {
  const std::string name = p.filename().string();
  return name == "run_manifest.json" || name.ends_with(".diagnostics.json") ||
         name.ends_with(".report.json") || name.ends_with(".labels.txt");
}

std::vector<fs::path> sorted_files(const fs::path& dir,
                                   std::span<const std::string> extensions) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || auxiliary_file(entry.path())) continue;
    const std::string ext = entry.path().extension().string();
    for (const auto& want : extensions)
      if (ext == want) {
        files.push_back(entry.path());
        break;
      }
  }
  std::sort(files.begin(), files.end());
  return files;
}

// ---------------------------------------------------------------- polygonize

struct PolygonizeConfig {
  std::string input_dir;
  std::string output_dir;
  int width = 1024;
  int height = 1024;
  roofvec::PipelineParams params;
  double confidence_cutoff = 0.25;
  int jobs = default_jobs();
  bool dump_grids = false;
};

json to_json(const PolygonizeConfig& c) {
  json j{{"input", c.input_dir},
         {"output", c.output_dir},
         {"width", c.width},
         {"height", c.height},
         {"eps_base", c.params.eps_base},
         {"tau_line", c.params.tau_line},
         {"l_max_frac", c.params.l_max_frac},
         {"r_int_factor", c.params.r_int_factor},
         {"a_min", c.params.a_min},
         {"confidence_cutoff", c.confidence_cutoff},
         {"jobs", c.jobs},
         {"dump_grids", c.dump_grids}};
  if (c.params.eps) j["eps"] = *c.params.eps;
  if (c.params.graph_snap) j["snap_tol"] = *c.params.graph_snap;
  return j;
}

int run_polygonize(const PolygonizeConfig& cfg) {
  const fs::path in_dir = cfg.input_dir;
  const fs::path out_dir = cfg.output_dir;
  if (!fs::is_directory(in_dir)) {
    log_error("input is not a directory: " + in_dir.string());
    return 1;
  }
  fs::create_directories(out_dir);
  const std::string exts[] = {".txt", ".json"};
  auto files = sorted_files(in_dir, exts);
  if (files.empty()) {
    log_error("no detection files (*.txt, *.json) in " + in_dir.string());
    return 1;
  }

  std::vector<BuildingStatus> statuses(files.size());
  parallel_for(files.size(), cfg.jobs, [&](std::size_t i) {
    const fs::path& file = files[i];
    const std::string id = file.stem().string();
    statuses[i].id = id;
    try {
      roofvec::BuildingInput building;
      if (file.extension() == ".txt") {
        std::ifstream in(file);
        if (!in) throw std::runtime_error("cannot open " + file.string());
        building = roofvec::parse_obb_detections(
            in, cfg.width, cfg.height,
            roofvec::ObbParseOptions{cfg.confidence_cutoff}, id);
      } else {
        building = roofvec::parse_segments(read_file(file), id);
      }
      const auto edges = roofvec::building_edges(building);
      if (edges.empty()) throw std::runtime_error("no edges above cutoff");
      const auto result = roofvec::polygonize_building(
          edges, building.width, building.height, cfg.params);
      write_file(out_dir / (id + ".geojson"),
                 roofvec::export_faces_geojson(result.faces, id,
                                               building.width,
                                               building.height));
      write_file(out_dir / (id + ".diagnostics.json"),
                 roofvec::to_json(result.diagnostics).dump(2) + "\n");
      if (cfg.dump_grids && !result.graph.edges.empty()) {
        auto raster = roofvec::rasterize_edges(result.graph, building.width,
                                               building.height);
        const auto labels = roofvec::label_components(raster.grid);
        write_file(out_dir / (id + ".labels.pgm"),
                   roofvec::label_grid_pgm(raster.grid, labels.component_count));
      }
      statuses[i].status = "ok";
      log_debug(id + ": " + std::to_string(result.faces.face_count()) +
                " faces");
    } catch (const std::exception& e) {
      statuses[i].status = "error";
      statuses[i].message = e.what();
      log_error(file.filename().string() + ": " + e.what());
    }
  });

  write_manifest(out_dir, "polygonize", to_json(cfg), statuses);
  const long errors = std::count_if(
      statuses.begin(), statuses.end(),
      [](const BuildingStatus& s) { return s.status == "error"; });
  log_info(std::to_string(statuses.size() - errors) + "/" +
           std::to_string(statuses.size()) + " buildings polygonized into " +
           out_dir.string());
  return errors > 0 ? 1 : 0;
}

// ------------------------------------------------------------------ evaluate

struct EvaluateConfig {
  std::string pred_dir;
  std::string ref_dir;
  std::string output_dir;
  int grid_width = 0;  // 0: take from the face documents
  int grid_height = 0;
  bool polys_as_printed = false;
  int jobs = default_jobs();
};

json to_json(const EvaluateConfig& c) {
  return json{{"pred", c.pred_dir},
              {"ref", c.ref_dir},
              {"output", c.output_dir},
              {"grid_width", c.grid_width},
              {"grid_height", c.grid_height},
              {"polys_as_printed", c.polys_as_printed},
              {"jobs", c.jobs}};
}

json report_to_json(const roofvec::EvalReport& r) {
  auto faces = json::array();
  for (const auto& f : r.per_face_iou)
    faces.push_back(
        {{"ref_face", f.ref_face}, {"pred_face", f.pred_face}, {"iou", f.iou}});
  return json{{"building_id", r.building_id},
              {"per_face_iou", std::move(faces)},
              {"miou", r.miou},
              {"oviou", r.oviou},
              {"d_h", r.d_h},
              {"d_p", r.d_p},
              {"q_h", r.q_h},
              {"q_p", r.q_p},
              {"q_vm", r.q_vm},
              {"d_max", r.d_max}};
}

json stats_to_json(const roofvec::MetricStats& s) {
  return json{
      {"mean", s.mean}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}};
}

std::string csv_cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

int run_evaluate(const EvaluateConfig& cfg) {
  const fs::path pred_dir = cfg.pred_dir;
  const fs::path ref_dir = cfg.ref_dir;
  const fs::path out_dir = cfg.output_dir;
  if (!fs::is_directory(pred_dir) || !fs::is_directory(ref_dir)) {
    log_error("pred and ref must be directories");
    return 1;
  }
  fs::create_directories(out_dir);
  const std::string exts[] = {".geojson"};
  auto pred_files = sorted_files(pred_dir, exts);
  if (pred_files.empty()) {
    log_error("no prediction documents in " + pred_dir.string());
    return 1;
  }

  struct Pair {
    fs::path pred;
    fs::path ref;
    std::string id;
  };
  std::vector<Pair> pairs;
  std::vector<BuildingStatus> statuses;
  for (const auto& pf : pred_files) {
    const std::string id = pf.stem().string();
    const fs::path rf = ref_dir / (id + ".geojson");
    if (!fs::exists(rf)) {
      log_warn("no reference for building " + id + ", skipped");
      statuses.push_back({id, "skipped", "missing reference"});
      continue;
    }
    pairs.push_back({pf, rf, id});
  }

  std::vector<BuildingStatus> pair_status(pairs.size());
  std::vector<std::optional<roofvec::EvalReport>> reports(pairs.size());
  parallel_for(pairs.size(), cfg.jobs, [&](std::size_t i) {
    const Pair& p = pairs[i];
    pair_status[i].id = p.id;
    try {
      const auto pred = roofvec::parse_faces_geojson(read_file(p.pred));
      const auto ref = roofvec::parse_faces_geojson(read_file(p.ref));
      roofvec::GridSize grid{cfg.grid_width, cfg.grid_height};
      if (grid.width <= 0 || grid.height <= 0) {
        grid = {pred.width, pred.height};
        if (grid.width <= 0 || grid.height <= 0)
          grid = {ref.width, ref.height};
      }
      if (grid.width <= 0 || grid.height <= 0)
        throw std::runtime_error(
            "no grid size in documents; pass --grid-width/--grid-height");
      auto report = roofvec::evaluate(pred.faces, ref.faces, grid,
                                      {cfg.polys_as_printed});
      report.building_id = p.id;
      write_file(out_dir / (p.id + ".report.json"),
                 report_to_json(report).dump(2) + "\n");
      reports[i] = std::move(report);
      pair_status[i].status = "ok";
    } catch (const std::exception& e) {
      pair_status[i].status = "error";
      pair_status[i].message = e.what();
      log_error(p.id + ": " + e.what());
    }
  });
  statuses.insert(statuses.end(), pair_status.begin(), pair_status.end());

  std::vector<roofvec::EvalReport> ok_reports;
  for (auto& r : reports)
    if (r) ok_reports.push_back(std::move(*r));

  std::string csv =
      "building_id,miou,oviou,d_h,d_p,q_h,q_p,q_vm,d_max\n";
  for (const auto& r : ok_reports)
    csv += r.building_id + "," + csv_cell(r.miou) + "," + csv_cell(r.oviou) +
           "," + csv_cell(r.d_h) + "," + csv_cell(r.d_p) + "," +
           csv_cell(r.q_h) + "," + csv_cell(r.q_p) + "," + csv_cell(r.q_vm) +
           "," + csv_cell(r.d_max) + "\n";
  write_file(out_dir / "reports.csv", csv);

  if (!ok_reports.empty()) {
    const auto summary = roofvec::aggregate(ok_reports);
    json sj{{"buildings", summary.buildings},
            {"mean_miou", summary.miou.mean},
            {"mean_oviou", summary.oviou.mean},
            {"mean_q_p", summary.q_p.mean},
            {"mean_q_vm", summary.q_vm.mean},
            {"median_q_h", summary.q_h.median},
            {"miou", stats_to_json(summary.miou)},
            {"oviou", stats_to_json(summary.oviou)},
            {"q_h", stats_to_json(summary.q_h)},
            {"q_p", stats_to_json(summary.q_p)},
            {"q_vm", stats_to_json(summary.q_vm)}};
    write_file(out_dir / "summary.json", sj.dump(2) + "\n");
  } else {
    log_error("no building evaluated");
  }

  write_manifest(out_dir, "evaluate", to_json(cfg), statuses);
  const bool any_error =
      std::any_of(statuses.begin(), statuses.end(), [](const BuildingStatus& s) {
        return s.status == "error";
      });
  return any_error || ok_reports.empty() ? 1 : 0;
}

// --------------------------------------------------------------------- synth

struct SynthConfig {
  std::string output_dir;
  std::string kind = "all";
  int image_size = 1024;
  double footprint_w = 0.0;  // 0: proportional default
  double footprint_h = 0.0;
  int count = 1;
  std::uint64_t seed = 0;
  roofvec::CorruptionSpec corruption;
  double label_thickness = 6.0;
  bool training_labels = false;
};

json to_json(const SynthConfig& c) {
  return json{{"output", c.output_dir},
              {"kind", c.kind},
              {"image_size", c.image_size},
              {"footprint_w", c.footprint_w},
              {"footprint_h", c.footprint_h},
              {"count", c.count},
              {"seed", c.seed},
              {"truncate", c.corruption.truncate_px},
              {"jitter", c.corruption.jitter_sigma},
              {"drop", c.corruption.drop_prob},
              {"angle_jitter", c.corruption.angle_jitter},
              {"label_thickness", c.label_thickness},
              {"training_labels", c.training_labels}};
}

int run_synth(const SynthConfig& cfg) {
  const fs::path out_dir = cfg.output_dir;
  fs::create_directories(out_dir / "ref");

  std::vector<roofvec::RoofKind> kinds;
  if (cfg.kind == "all")
    kinds.assign(std::begin(roofvec::kAllRoofKinds),
                 std::end(roofvec::kAllRoofKinds));
  else
    kinds.push_back(roofvec::roof_kind_from_string(cfg.kind));

  std::vector<BuildingStatus> statuses;
  bool any_error = false;
  for (const roofvec::RoofKind kind : kinds) {
    for (int i = 0; i < cfg.count; ++i) {
      char suffix[16];
      std::snprintf(suffix, sizeof suffix, "_%04d", i);
      const std::string id = roofvec::to_string(kind) + suffix;
      try {
        const double fw = cfg.footprint_w > 0.0 ? cfg.footprint_w
                                                : 0.80 * cfg.image_size;
        const double fh = cfg.footprint_h > 0.0 ? cfg.footprint_h
                                                : 0.53 * cfg.image_size;
        roofvec::RoofTemplate tmpl{kind, (cfg.image_size - fw) / 2.0,
                                   (cfg.image_size - fh) / 2.0, fw, fh,
                                   cfg.seed + static_cast<std::uint64_t>(i)};
        const auto roof = roofvec::generate(tmpl);
        roofvec::CorruptionSpec spec = cfg.corruption;
        spec.seed = cfg.seed + static_cast<std::uint64_t>(i);
        const auto edges = roofvec::corrupt(roof.edges, spec);

        roofvec::BuildingInput building;
        building.building_id = id;
        building.width = cfg.image_size;
        building.height = cfg.image_size;
        building.segments = edges;
        write_file(out_dir / (id + ".json"),
                   roofvec::export_segments(building));
        write_file(out_dir / "ref" / (id + ".geojson"),
                   roofvec::export_faces_geojson(roof.faces, id,
                                                 cfg.image_size,
                                                 cfg.image_size));
        if (cfg.training_labels) {
          std::string labels;
          for (const auto& line : roofvec::export_training_labels(
                   roof.faces, cfg.label_thickness, cfg.image_size,
                   cfg.image_size))
            labels += line + "\n";
          write_file(out_dir / (id + ".labels.txt"), labels);
        }
        statuses.push_back({id, "ok", ""});
      } catch (const std::exception& e) {
        statuses.push_back({id, "error", e.what()});
        log_error(id + ": " + e.what());
        any_error = true;
      }
    }
  }
  write_manifest(out_dir, "synth", to_json(cfg), statuses);
  return any_error ? 1 : 0;
}

// -------------------------------------------------------------------- render

struct RenderConfig {
  std::string input;  // faces geojson file or directory
  std::string output_dir;
  std::string edges_file;
  std::string reference_file;
  std::string layers = "faces";
  std::uint64_t palette_seed = 0;
};

json to_json(const RenderConfig& c) {
  return json{{"input", c.input},          {"output", c.output_dir},
              {"edges", c.edges_file},     {"reference", c.reference_file},
              {"layers", c.layers},        {"palette_seed", c.palette_seed}};
}

unsigned parse_layers(const std::string& spec) {
  unsigned mask = 0;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "edges") mask |= roofvec::kLayerEdges;
    else if (tok == "graph") mask |= roofvec::kLayerGraph;
    else if (tok == "faces") mask |= roofvec::kLayerFaces;
    else if (tok == "reference") mask |= roofvec::kLayerReference;
    else throw std::runtime_error("unknown layer: " + tok);
  }
  if (mask == 0) throw std::runtime_error("no layers requested");
  return mask;
}

int run_render(const RenderConfig& cfg) {
  const fs::path in_path = cfg.input;
  const fs::path out_dir = cfg.output_dir;
  fs::create_directories(out_dir);
  const unsigned layers = parse_layers(cfg.layers);

  std::vector<fs::path> inputs;
  if (fs::is_directory(in_path)) {
    const std::string exts[] = {".geojson"};
    inputs = sorted_files(in_path, exts);
    if (inputs.empty()) {
      log_error("no face documents in " + in_path.string());
      return 1;
    }
    if (layers & (roofvec::kLayerEdges | roofvec::kLayerGraph |
                  roofvec::kLayerReference)) {
      log_error("directory input supports only the faces layer");
      return 1;
    }
  } else if (fs::exists(in_path)) {
    inputs.push_back(in_path);
  } else {
    log_error("input not found: " + in_path.string());
    return 1;
  }

  std::vector<BuildingStatus> statuses;
  bool any_error = false;
  for (const fs::path& file : inputs) {
    const std::string id = file.stem().string();
    try {
      const auto doc = roofvec::parse_faces_geojson(read_file(file));
      roofvec::RenderInput rin;
      rin.faces = &doc.faces;

      std::vector<roofvec::Segment> edges;
      roofvec::RoofGraph graph;
      roofvec::BuildingInput edges_building;
      if (!cfg.edges_file.empty()) {
        edges_building = roofvec::parse_segments(read_file(cfg.edges_file));
        edges = roofvec::building_edges(edges_building);
        rin.edges = &edges;
        if (layers & roofvec::kLayerGraph) {
          roofvec::Diagnostics diag;
          graph = roofvec::complete_edges(edges, edges_building.width,
                                          edges_building.height, {}, diag);
          rin.graph = &graph;
        }
      }
      roofvec::FaceDocument ref_doc;
      if (!cfg.reference_file.empty()) {
        ref_doc = roofvec::parse_faces_geojson(read_file(cfg.reference_file));
        rin.reference = &ref_doc.faces;
      }

      int w = doc.width, h = doc.height;
      if (w <= 0 || h <= 0) {
        w = edges_building.width > 0 ? edges_building.width : 1024;
        h = edges_building.height > 0 ? edges_building.height : 1024;
      }
      const roofvec::RenderSpec spec{w, h, layers, cfg.palette_seed};
      write_file(out_dir / (id + ".svg"), roofvec::render_svg(rin, spec));
      statuses.push_back({id, "ok", ""});
    } catch (const std::exception& e) {
      statuses.push_back({id, "error", e.what()});
      log_error(id + ": " + e.what());
      any_error = true;
    }
  }
  write_manifest(out_dir, "render", to_json(cfg), statuses);
  return any_error ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"roofvec: roof edge polygonization and evaluation"};
  app.require_subcommand(1);

  PolygonizeConfig pcfg;
  auto* poly = app.add_subcommand(
      "polygonize", "Convert per-building edge detections to face polygons");
  poly->set_config("--config");
  poly->allow_config_extras(false);
  poly->add_option("--input", pcfg.input_dir,
                   "Directory of detection files (*.txt YOLO-OBB, *.json "
                   "segments documents)")
      ->required();
  poly->add_option("--output", pcfg.output_dir, "Output directory")->required();
  poly->add_option("--width", pcfg.width, "Image width for *.txt inputs (px)")
      ->check(CLI::PositiveNumber);
  poly->add_option("--height", pcfg.height,
                   "Image height for *.txt inputs (px)")
      ->check(CLI::PositiveNumber);
  poly->add_option("--eps", pcfg.params.eps,
                   "DBSCAN radius override (px, absolute)")
      ->check(CLI::PositiveNumber);
  poly->add_option("--eps-base", pcfg.params.eps_base,
                   "DBSCAN radius at 1024 px scale")
      ->check(CLI::PositiveNumber);
  poly->add_option("--tau-line", pcfg.params.tau_line,
                   "Max junction distance to the edge line (px)")
      ->check(CLI::NonNegativeNumber);
  poly->add_option("--l-max-frac", pcfg.params.l_max_frac,
                   "Max gap extension as fraction of image diagonal")
      ->check(CLI::NonNegativeNumber);
  poly->add_option("--r-int-factor", pcfg.params.r_int_factor,
                   "Pair-intersection acceptance radius, in eps units")
      ->check(CLI::NonNegativeNumber);
  poly->add_option("--snap-tol", pcfg.params.graph_snap,
                   "Graph vertex snap tolerance (px; default eps/2)")
      ->check(CLI::NonNegativeNumber);
  poly->add_option("--a-min", pcfg.params.a_min,
                   "Minimum face component area (px^2)")
      ->check(CLI::NonNegativeNumber);
  poly->add_option("--conf", pcfg.confidence_cutoff,
                   "Detection confidence cutoff")
      ->check(CLI::Range(0.0, 1.0));
  poly->add_option("--jobs", pcfg.jobs, "Parallel buildings")
      ->check(CLI::Range(1, 256));
  poly->add_flag("--dump-grids", pcfg.dump_grids,
                 "Write component label grids as PGM");

  EvaluateConfig ecfg;
  auto* eval = app.add_subcommand(
      "evaluate", "Score predicted faces against reference faces");
  eval->set_config("--config");
  eval->allow_config_extras(false);
  eval->add_option("--pred", ecfg.pred_dir, "Directory of predicted *.geojson")
      ->required();
  eval->add_option("--ref", ecfg.ref_dir, "Directory of reference *.geojson")
      ->required();
  eval->add_option("--output", ecfg.output_dir, "Output directory")->required();
  eval->add_option("--grid-width", ecfg.grid_width,
                   "Raster grid width when documents carry no image size")
      ->check(CLI::NonNegativeNumber);
  eval->add_option("--grid-height", ecfg.grid_height,
                   "Raster grid height when documents carry no image size")
      ->check(CLI::NonNegativeNumber);
  eval->add_flag("--polys-as-printed", ecfg.polys_as_printed,
                 "PolyS without per-count RMSE normalization");
  eval->add_option("--jobs", ecfg.jobs, "Parallel buildings")
      ->check(CLI::Range(1, 256));

  SynthConfig scfg;
  auto* synth = app.add_subcommand(
      "synth", "Generate synthetic roofs with optional corruption");
  synth->set_config("--config");
  synth->allow_config_extras(false);
  synth->add_option("--out", scfg.output_dir, "Output directory")->required();
  synth->add_option("--kind", scfg.kind,
                    "flat-rect|gable|hip|cross-gable|l-shape|all");
  synth->add_option("--image-size", scfg.image_size, "Square image size (px)")
      ->check(CLI::PositiveNumber);
  synth->add_option("--footprint-w", scfg.footprint_w, "Footprint width (px)")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--footprint-h", scfg.footprint_h, "Footprint height (px)")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--count", scfg.count, "Buildings per kind")
      ->check(CLI::Range(1, 100000));
  synth->add_option("--seed", scfg.seed, "Base random seed");
  synth->add_option("--truncate", scfg.corruption.truncate_px,
                    "Shorten each edge end by this many px")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--jitter", scfg.corruption.jitter_sigma,
                    "Gaussian endpoint noise sigma (px)")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--drop", scfg.corruption.drop_prob,
                    "Whole-edge dropout probability")
      ->check(CLI::Range(0.0, 0.99));
  synth->add_option("--angle-jitter", scfg.corruption.angle_jitter,
                    "Rotation noise sigma (rad)")
      ->check(CLI::NonNegativeNumber);
  synth->add_flag("--training-labels", scfg.training_labels,
                  "Also emit YOLO-OBB training label lines");
  synth->add_option("--label-thickness", scfg.label_thickness,
                    "OBB thickness for training labels (px)")
      ->check(CLI::PositiveNumber);

  RenderConfig rcfg;
  auto* render = app.add_subcommand("render", "Render SVG overlays");
  render->set_config("--config");
  render->allow_config_extras(false);
  render->add_option("--input", rcfg.input,
                     "Faces geojson file or directory of them")
      ->required();
  render->add_option("--output", rcfg.output_dir, "Output directory")
      ->required();
  render->add_option("--edges", rcfg.edges_file,
                     "Segments document for the edges/graph layers");
  render->add_option("--reference", rcfg.reference_file,
                     "Reference faces geojson for the reference layer");
  render->add_option("--layers", rcfg.layers,
                     "Comma list of edges,graph,faces,reference");
  render->add_option("--palette-seed", rcfg.palette_seed, "Face color seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (poly->parsed()) return run_polygonize(pcfg);
    if (eval->parsed()) return run_evaluate(ecfg);
    if (synth->parsed()) return run_synth(scfg);
    if (render->parsed()) return run_render(rcfg);
  } catch (const std::exception& e) {
    log_error(e.what());
    return 1;
  }
  return 2;
}
