#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "roofvec/io.hpp"
#include "roofvec/synth.hpp"

using namespace roofvec;
using Catch::Approx;

TEST_CASE("parse_obb_detections xywht variant") {
  std::istringstream in("0 0.5 0.5 0.2 0.01 0.0\n");
  const auto building = parse_obb_detections(in, 1000, 1000);
  REQUIRE(building.boxes.size() == 1);
  const OrientedBox& b = building.boxes[0];
  CHECK(b.cx == Approx(500).margin(1e-6));
  CHECK(b.cy == Approx(500).margin(1e-6));
  CHECK(b.w == Approx(200).margin(1e-6));
  CHECK(b.h == Approx(10).margin(1e-6));
  CHECK(b.theta == Approx(0).margin(1e-9));
}

TEST_CASE("parse_obb_detections corner variant via principal axis") {
  std::istringstream in("0 0.1 0.1 0.3 0.1 0.3 0.2 0.1 0.2\n");
  const auto building = parse_obb_detections(in, 100, 100);
  REQUIRE(building.boxes.size() == 1);
  const OrientedBox& b = building.boxes[0];
  // corner-centroid oracle
  const Point corners[4] = {{10, 10}, {30, 10}, {30, 20}, {10, 20}};
  Point mu{0, 0};
  for (Point c : corners) mu = mu + c;
  mu = 0.25 * mu;
  CHECK(b.cx == Approx(mu.x).margin(1e-9));
  CHECK(b.cy == Approx(mu.y).margin(1e-9));
  CHECK(b.cx == Approx(20).margin(1e-9));
  CHECK(b.cy == Approx(15).margin(1e-9));
  CHECK(b.w == Approx(20).margin(1e-9));
  CHECK(b.h == Approx(10).margin(1e-9));
  CHECK(b.theta == Approx(0).margin(1e-9));
}

TEST_CASE("parse_obb_detections error and filter paths") {
  {
    std::istringstream in("0 0.5 0.5\n");
    CHECK_THROWS_WITH(parse_obb_detections(in, 100, 100),
                      Catch::Matchers::ContainsSubstring("line 1"));
  }
  {
    std::istringstream in("0 0.5 0.5 0.2 0.01 0.0\nx y z\n");
    CHECK_THROWS_WITH(parse_obb_detections(in, 100, 100),
                      Catch::Matchers::ContainsSubstring("line 2"));
  }
  {
    // confidence below the cutoff is dropped
    std::istringstream in(
        "0 0.5 0.5 0.2 0.01 0.0 0.1\n"
        "0 0.5 0.5 0.2 0.01 0.0 0.9\n");
    const auto b = parse_obb_detections(in, 100, 100);
    CHECK(b.boxes.size() == 1);
  }
  {
    // geometry far outside the frame is rejected
    std::istringstream in("0 2.5 0.5 0.2 0.01 0.0\n");
    CHECK_THROWS_WITH(parse_obb_detections(in, 100, 100),
                      Catch::Matchers::ContainsSubstring("outside"));
  }
  {
    // blank lines are fine
    std::istringstream in("\n0 0.5 0.5 0.2 0.01 0.0\n\n");
    CHECK(parse_obb_detections(in, 100, 100).boxes.size() == 1);
  }
  {
    // 10-token corner form with a trailing confidence
    std::istringstream in(
        "0 0.1 0.1 0.3 0.1 0.3 0.2 0.1 0.2 0.05\n"
        "0 0.1 0.1 0.3 0.1 0.3 0.2 0.1 0.2 0.95\n");
    CHECK(parse_obb_detections(in, 100, 100).boxes.size() == 1);
  }
}

TEST_CASE("parse_segments document") {
  const std::string doc = R"({
    "image_size": [100, 80],
    "segments": [[[1,1],[50,1]], [[50,1],[50,40]]]
  })";
  const auto b = parse_segments(doc, "bld");
  CHECK(b.width == 100);
  CHECK(b.height == 80);
  REQUIRE(b.segments.size() == 2);
  CHECK(b.segments[0].id == 0);
  CHECK(b.segments[1].id == 1);

  const std::string degenerate = R"({
    "image_size": [100, 80],
    "segments": [[[1,1],[1,1]]]
  })";
  CHECK_THROWS_WITH(parse_segments(degenerate),
                    Catch::Matchers::ContainsSubstring("segment 0"));
}

TEST_CASE("segments document round trip") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> coord(5.0, 95.0);
  BuildingInput b;
  b.building_id = "rt";
  b.width = 100;
  b.height = 100;
  for (int i = 0; i < 20; ++i) {
    const Point p0{coord(rng), coord(rng)};
    Point p1{coord(rng), coord(rng)};
    if (distance(p0, p1) < 1.0) p1.x += 2.0;
    b.segments.push_back(make_segment(i, p0, p1));
  }
  const auto parsed = parse_segments(export_segments(b));
  REQUIRE(parsed.segments.size() == b.segments.size());
  for (std::size_t i = 0; i < b.segments.size(); ++i) {
    CHECK(distance(parsed.segments[i].p0, b.segments[i].p0) < 1e-6);
    CHECK(distance(parsed.segments[i].p1, b.segments[i].p1) < 1e-6);
  }
}

static FaceSet unit_square_face() {
  FaceSet fs;
  fs.vertices = {{0, 0}, {10, 0}, {10, 10}, {0, 10}};
  fs.faces = {{0, 1, 2, 3}};
  fs.face_edge_ids = {{0, 1, 2, 3}};
  return fs;
}

TEST_CASE("export_faces_geojson closes rings") {
  const auto fs = unit_square_face();
  const std::string text = export_faces_geojson(fs, "b1", 64, 64);
  const auto doc = nlohmann::json::parse(text);
  CHECK(doc["type"] == "FeatureCollection");
  REQUIRE(doc["features"].size() == 1);
  const auto& ring = doc["features"][0]["geometry"]["coordinates"][0];
  CHECK(ring.size() == 5);  // 4 vertices + closing repeat
  CHECK(ring.front() == ring.back());

  FaceSet empty;
  const auto edoc =
      nlohmann::json::parse(export_faces_geojson(empty, "b2", 64, 64));
  CHECK(edoc["features"].size() == 0);

  FaceSet bad;
  bad.vertices = {{0, 0}, {1, 0}};
  bad.faces = {{0, 1}};
  CHECK_THROWS_AS(export_faces_geojson(bad, "b3", 64, 64),
                  std::invalid_argument);
}

TEST_CASE("faces geojson round trip preserves vertex lists") {
  const auto roof = generate({RoofKind::CrossGable, 100, 150, 500, 400, 3});
  const std::string text =
      export_faces_geojson(roof.faces, "cg", 1024, 1024);
  const auto parsed = parse_faces_geojson(text);
  CHECK(parsed.building_id == "cg");
  CHECK(parsed.width == 1024);
  REQUIRE(parsed.faces.faces.size() == roof.faces.faces.size());
  for (std::size_t f = 0; f < roof.faces.faces.size(); ++f) {
    const auto a = roof.faces.face_points(f);
    const auto b = parsed.faces.face_points(f);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].x == b[i].x);  // exact: shortest round-trip number printing
      CHECK(a[i].y == b[i].y);
    }
    CHECK(parsed.faces.face_edge_ids[f] == roof.faces.face_edge_ids[f]);
  }
  // idempotence of export(parse(.))
  const std::string again =
      export_faces_geojson(parsed.faces, "cg", 1024, 1024);
  CHECK(again == text);
}

TEST_CASE("export_training_labels counts and bounds") {
  const auto fs = unit_square_face();
  const auto lines = export_training_labels(fs, 4.0, 64, 64);
  CHECK(lines.size() == 4);

  // two squares sharing one edge -> 7 boxes, not 8
  FaceSet two;
  two.vertices = {{10, 10}, {20, 10}, {20, 20}, {10, 20}, {30, 10}, {30, 20}};
  two.faces = {{0, 1, 2, 3}, {1, 4, 5, 2}};
  const auto lines2 = export_training_labels(two, 4.0, 64, 64);
  CHECK(lines2.size() == 7);
  CHECK(lines2.size() == oracle::unique_edge_count(two));

  for (const auto& line : lines2) {
    std::istringstream ls(line);
    double v;
    ls >> v;  // class
    CHECK(v == 0.0);
    int count = 0;
    while (ls >> v) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      ++count;
    }
    CHECK(count == 8);
  }
}

TEST_CASE("training labels for templates match the unique-edge oracle") {
  for (RoofKind kind : kAllRoofKinds) {
    const auto roof = generate({kind, 200, 300, 600, 400, 1});
    const auto lines = export_training_labels(roof.faces, 6.0, 1024, 1024);
    CHECK(lines.size() == oracle::unique_edge_count(roof.faces));
    CHECK(lines.size() == roof.edges.size());
  }
}

TEST_CASE("training labels round trip through the obb parser") {
  const auto roof = generate({RoofKind::Gable, 200, 300, 600, 400, 2});
  std::string text;
  for (const auto& line : export_training_labels(roof.faces, 6.0, 1024, 1024))
    text += line + "\n";
  std::istringstream in(text);
  const auto building = parse_obb_detections(in, 1024, 1024);
  REQUIRE(building.boxes.size() == roof.edges.size());
  for (std::size_t i = 0; i < roof.edges.size(); ++i) {
    const Segment back = obb_to_segment(building.boxes[i]);
    const Segment& orig = roof.edges[i];
    const double direct =
        std::max(distance(back.p0, orig.p0), distance(back.p1, orig.p1));
    const double swapped =
        std::max(distance(back.p0, orig.p1), distance(back.p1, orig.p0));
    CHECK(std::min(direct, swapped) < 1e-6);
  }
}
