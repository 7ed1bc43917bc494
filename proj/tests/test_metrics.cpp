#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "roofvec/metrics.hpp"
#include "roofvec/synth.hpp"

using namespace roofvec;
using Catch::Approx;

static FaceSet square_at(double x, double y, double w, double h) {
  FaceSet fs;
  fs.vertices = {{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}};
  fs.faces = {{0, 1, 2, 3}};
  fs.face_edge_ids = {{0, 1, 2, 3}};
  return fs;
}

static FaceSet merge_sets(const FaceSet& a, const FaceSet& b) {
  FaceSet out = a;
  const int off = static_cast<int>(out.vertices.size());
  out.vertices.insert(out.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (const auto& cyc : b.faces) {
    std::vector<int> shifted;
    for (int i : cyc) shifted.push_back(i + off);
    out.faces.push_back(shifted);
  }
  for (const auto& ids : b.face_edge_ids) out.face_edge_ids.push_back(ids);
  return out;
}

TEST_CASE("miou identity and empties") {
  const FaceSet ref = square_at(10, 10, 20, 20);
  const auto identical = miou(ref, ref, {64, 64});
  REQUIRE(identical.per_face.size() == 1);
  CHECK(identical.per_face[0].iou == Approx(1.0));
  CHECK(identical.miou == Approx(1.0));

  const FaceSet empty;
  CHECK(miou(empty, ref, {64, 64}).miou == Approx(0.0));
  CHECK_THROWS_AS(miou(ref, empty, {64, 64}), std::invalid_argument);
}

TEST_CASE("miou with a merged prediction face") {
  // ref: two 10x10 squares stacked; pred: one 10x20 rectangle covering both
  const FaceSet ref =
      merge_sets(square_at(10, 10, 10, 10), square_at(10, 20, 10, 10));
  const FaceSet pred = square_at(10, 10, 10, 20);
  const auto result = miou(pred, ref, {64, 64});
  REQUIRE(result.per_face.size() == 2);
  CHECK(result.per_face[0].iou == Approx(100.0 / 200.0));
  CHECK(result.per_face[1].iou == Approx(100.0 / 200.0));
  CHECK(result.miou == Approx(0.5));
  CHECK(result.miou == Approx(oracle::brute_miou(pred, ref, 64, 64)));
}

TEST_CASE("miou and oviou match the pixel-count oracle exactly") {
  std::mt19937 rng(53);
  std::uniform_real_distribution<double> coord(4.0, 60.0);
  std::uniform_real_distribution<double> size(6.0, 24.0);
  for (int round = 0; round < 50; ++round) {
    // random convex quads (rectangles rotated by a random angle)
    auto random_quad = [&]() {
      const double cx = coord(rng), cy = coord(rng);
      const double w = size(rng), h = size(rng);
      const double ang = coord(rng) / 20.0;
      FaceSet fs;
      const Point c{cx, cy};
      const Point corners[4] = {{cx - w / 2, cy - h / 2},
                                {cx + w / 2, cy - h / 2},
                                {cx + w / 2, cy + h / 2},
                                {cx - w / 2, cy + h / 2}};
      for (Point p : corners)
        fs.vertices.push_back(oracle::rotate_about(p, c, ang));
      fs.faces = {{0, 1, 2, 3}};
      return fs;
    };
    const FaceSet pred = random_quad();
    const FaceSet ref = random_quad();
    const auto mi = miou(pred, ref, {64, 64});
    CHECK(mi.miou == oracle::brute_miou(pred, ref, 64, 64));
    CHECK(oviou(pred, ref, {64, 64}) ==
          oracle::brute_oviou(pred, ref, 64, 64));
  }
}

TEST_CASE("oviou examples") {
  const FaceSet a = square_at(8, 8, 16, 16);
  CHECK(oviou(a, a, {64, 64}) == Approx(1.0));

  const FaceSet b = square_at(40, 40, 16, 16);
  CHECK(oviou(a, b, {64, 64}) == Approx(0.0));

  // unit square vs itself shifted by half its width: IoU = 1/3
  const FaceSet c = square_at(40, 40, 100, 100);
  const FaceSet d = square_at(90, 40, 100, 100);
  CHECK(oviou(c, d, {256, 256}) == Approx(1.0 / 3.0).margin(0.01));

  CHECK_THROWS_AS(oviou(FaceSet{}, FaceSet{}, {64, 64}),
                  std::invalid_argument);
}

TEST_CASE("miou is directional, oviou is symmetric") {
  const FaceSet ref =
      merge_sets(square_at(10, 10, 16, 16), square_at(30, 10, 16, 16));
  FaceSet pred = ref;
  // spurious prediction face disjoint from every reference
  const FaceSet spurious = square_at(10, 40, 12, 12);
  const FaceSet pred_extra = merge_sets(pred, spurious);

  const double m0 = miou(pred, ref, {64, 64}).miou;
  const double m1 = miou(pred_extra, ref, {64, 64}).miou;
  CHECK(m0 == Approx(1.0));
  CHECK(m1 == Approx(m0));  // unchanged by spurious faces

  const double o0 = oviou(pred, ref, {64, 64});
  const double o1 = oviou(pred_extra, ref, {64, 64});
  CHECK(o1 < o0);  // strictly decreases
  CHECK(oviou(ref, pred_extra, {64, 64}) == Approx(o1));
}

static Boundary square_boundary(double x, double y, double side) {
  return boundary_of(square_at(x, y, side, side));
}

TEST_CASE("hausdorff examples") {
  const Boundary a = square_boundary(10, 10, 10);
  CHECK(hausdorff(a, a) == Approx(0.0).margin(1e-12));

  const Boundary b = square_boundary(13, 10, 10);
  CHECK(hausdorff(a, b) == Approx(3.0));
  CHECK(hausdorff(b, a) == Approx(3.0));

  // one vertex displaced outward by 2
  FaceSet moved = square_at(10, 10, 10, 10);
  moved.vertices[0] = {8, 10};  // (10,10) -> (8,10)
  const Boundary c = boundary_of(moved);
  CHECK(hausdorff(a, c) == Approx(2.0));

  CHECK_THROWS_AS(hausdorff(Boundary{}, a), std::invalid_argument);
}

TEST_CASE("hausdorff translation bound") {
  std::mt19937 rng(59);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  const Boundary ref = square_boundary(20, 20, 14);
  const double base = hausdorff(square_boundary(22, 20, 14), ref);
  for (int i = 0; i < 50; ++i) {
    const double tx = shift(rng), ty = shift(rng);
    FaceSet moved = square_at(22 + tx, 20 + ty, 14, 14);
    const double now = hausdorff(boundary_of(moved), ref);
    CHECK(now <= base + std::hypot(tx, ty) + 1e-9);
  }
}

TEST_CASE("polys examples") {
  const Boundary a = square_boundary(10, 10, 10);
  CHECK(polys(a, a) == Approx(0.0).margin(1e-12));

  // (3,0) translation: the leading corners land on the other boundary, so
  // each directed distance list is {3, 0, 0, 3} and both RMSE terms are
  // sqrt(18/4). Cross-checked against the dense-sampling oracle.
  const Boundary b = square_boundary(13, 10, 10);
  double sq_ab = 0.0, sq_ba = 0.0;
  for (const Point& v : a.vertices) {
    const double d = oracle::dense_polyline_distance(v, b.segments);
    sq_ab += d * d;
  }
  for (const Point& v : b.vertices) {
    const double d = oracle::dense_polyline_distance(v, a.segments);
    sq_ba += d * d;
  }
  const double oracle_dp =
      0.5 * std::sqrt(sq_ab / 4.0) + 0.5 * std::sqrt(sq_ba / 4.0);
  CHECK(polys(a, b) == Approx(std::sqrt(18.0 / 4.0)).margin(1e-9));
  CHECK(polys(a, b) == Approx(oracle_dp).margin(1e-2));
  CHECK(polys(b, a) == Approx(polys(a, b)));

  // one vertex pushed out by 2: pred-side RMSE = sqrt(4/4) = 1
  FaceSet moved = square_at(10, 10, 10, 10);
  moved.vertices[0] = {8, 10};
  const Boundary c = boundary_of(moved);
  double ref_side_sq = 0.0;
  for (const Point& v : a.vertices) {
    const double d = oracle::dense_polyline_distance(v, c.segments, 10000);
    ref_side_sq += d * d;
  }
  const double expected =
      0.5 * std::sqrt(4.0 / 4.0) + 0.5 * std::sqrt(ref_side_sq / 4.0);
  CHECK(polys(c, a) == Approx(expected).margin(1e-2));

  // strict-as-printed mode: no division by the vertex count
  const double strict = polys(a, b, true);
  CHECK(strict == Approx(std::sqrt(18.0)).margin(1e-9));
}

TEST_CASE("hausdorff and polys match dense-sampling oracles") {
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> coord(5.0, 95.0);
  std::uniform_real_distribution<double> size(8.0, 40.0);
  for (int round = 0; round < 25; ++round) {
    const FaceSet a =
        square_at(coord(rng) / 2 + 5, coord(rng) / 2 + 5, size(rng), size(rng));
    const FaceSet b =
        square_at(coord(rng) / 2 + 5, coord(rng) / 2 + 5, size(rng), size(rng));
    const Boundary pa = boundary_of(a), pb = boundary_of(b);

    double dh = 0.0;
    for (const Point& v : pa.vertices)
      dh = std::max(dh, oracle::dense_polyline_distance(v, pb.segments));
    for (const Point& v : pb.vertices)
      dh = std::max(dh, oracle::dense_polyline_distance(v, pa.segments));
    CHECK(hausdorff(pa, pb) == Approx(dh).margin(1e-2));
  }
}

TEST_CASE("quality and qvm") {
  CHECK(quality(0.0, 10.0) == Approx(1.0));
  CHECK(quality(10.0, 10.0) == Approx(0.0));
  CHECK(quality(25.0, 10.0) == Approx(0.0));  // clamped
  CHECK(quality(0.017 * 350.0, 350.0) == Approx(0.983));
  CHECK_THROWS_AS(quality(1.0, 0.0), std::invalid_argument);

  CHECK(qvm(1.0, 1.0) == Approx(1.0));
  CHECK(qvm(0.0, 0.7) == Approx(0.0));
  CHECK(qvm(0.91, 0.99) == Approx(0.9009));
}

TEST_CASE("scale invariance of normalized qualities") {
  const FaceSet a = square_at(10, 12, 20, 16);
  FaceSet b = square_at(13, 12, 20, 16);
  b.vertices[2] = {34, 30};  // small shape defect
  const Boundary pa = boundary_of(a), pb = boundary_of(b);
  const double dmax = joint_bbox_diagonal(pa.vertices, pb.vertices);
  const double qh = quality(hausdorff(pa, pb), dmax);
  const double qp = quality(polys(pa, pb), dmax);
  for (double s : {2.0, 7.5, 113.0}) {
    auto scale = [&](const FaceSet& fs) {
      FaceSet out = fs;
      for (Point& p : out.vertices) p = s * p;
      return out;
    };
    const Boundary sa = boundary_of(scale(a)), sb = boundary_of(scale(b));
    const double sdmax = joint_bbox_diagonal(sa.vertices, sb.vertices);
    CHECK(quality(hausdorff(sa, sb), sdmax) == Approx(qh).margin(1e-9));
    CHECK(quality(polys(sa, sb), sdmax) == Approx(qp).margin(1e-9));
  }
}

TEST_CASE("evaluate ties the report together") {
  const auto roof = generate({RoofKind::Hip, 20, 30, 200, 120, 2});
  const EvalReport r = evaluate(roof.faces, roof.faces, {256, 256});
  CHECK(r.miou == Approx(1.0));
  CHECK(r.oviou == Approx(1.0));
  CHECK(r.d_h == Approx(0.0).margin(1e-9));
  CHECK(r.d_p == Approx(0.0).margin(1e-9));
  CHECK(r.q_h == Approx(1.0));
  CHECK(r.q_vm == Approx(r.miou * r.q_h).margin(1e-12));
  CHECK(r.d_max > 0.0);

  // empty prediction: worst quality, not an error
  const EvalReport z = evaluate(FaceSet{}, roof.faces, {256, 256});
  CHECK(z.miou == 0.0);
  CHECK(z.oviou == 0.0);
  CHECK(z.q_h == 0.0);
  CHECK(z.q_p == 0.0);
  CHECK(z.d_h == Approx(z.d_max));
  REQUIRE(z.per_face_iou.size() == roof.faces.faces.size());
  CHECK(z.per_face_iou[0].pred_face == -1);
}

TEST_CASE("qvm bound and range invariants") {
  std::mt19937 rng(67);
  std::uniform_real_distribution<double> coord(6.0, 50.0);
  for (int i = 0; i < 30; ++i) {
    const FaceSet a = square_at(coord(rng) / 2, coord(rng) / 2, 20, 14);
    const FaceSet b = square_at(coord(rng) / 2, coord(rng) / 2, 18, 16);
    const EvalReport r = evaluate(a, b, {64, 64});
    CHECK(r.miou >= 0.0);
    CHECK(r.miou <= 1.0);
    CHECK(r.oviou >= 0.0);
    CHECK(r.oviou <= 1.0);
    CHECK(r.q_h >= 0.0);
    CHECK(r.q_h <= 1.0);
    CHECK(r.q_p >= 0.0);
    CHECK(r.q_p <= 1.0);
    CHECK(r.q_vm <= std::min(r.miou, r.q_h) + 1e-12);
    CHECK(r.q_vm == Approx(r.miou * r.q_h).margin(1e-12));
  }
}

TEST_CASE("aggregate statistics") {
  EvalReport one;
  one.miou = 0.9;
  one.oviou = 0.95;
  one.q_h = 0.98;
  one.q_p = 0.97;
  one.q_vm = 0.9 * 0.98;
  const std::vector<EvalReport> single = {one};
  const auto s1 = aggregate(single);
  CHECK(s1.miou.mean == Approx(0.9));
  CHECK(s1.q_h.median == Approx(0.98));
  CHECK(s1.q_h.q1 == Approx(0.98));

  std::vector<EvalReport> three(3);
  three[0].q_h = 0.9;
  three[1].q_h = 1.0;
  three[2].q_h = 0.95;
  const auto s3 = aggregate(three);
  CHECK(s3.q_h.median == Approx(0.95));
  CHECK(s3.q_h.q1 <= s3.q_h.median);
  CHECK(s3.q_h.median <= s3.q_h.q3);

  // streaming-sum oracle on random reports
  std::mt19937 rng(71);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<EvalReport> many(100);
  double sum_miou = 0.0, sum_qp = 0.0;
  for (auto& r : many) {
    r.miou = u(rng);
    r.oviou = u(rng);
    r.q_h = u(rng);
    r.q_p = u(rng);
    r.q_vm = r.miou * r.q_h;
    sum_miou += r.miou;
    sum_qp += r.q_p;
  }
  const auto sm = aggregate(many);
  CHECK(sm.miou.mean == Approx(sum_miou / 100.0).margin(1e-12));
  CHECK(sm.q_p.mean == Approx(sum_qp / 100.0).margin(1e-12));

  CHECK_THROWS_AS(aggregate(std::vector<EvalReport>{}), std::invalid_argument);
}
