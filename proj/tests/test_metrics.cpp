/******************************************************************************
 * Copyright 2026 The polarobb Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#include <cmath>
#include <vector>

#include "catch2/catch_amalgamated.hpp"
#include "oracles.hpp"
#include "polarobb/metrics.hpp"

namespace {

using namespace polarobb;

OrientedBox axis_box(double cx, double cy, double w, double h) {
  return make_box({cx, cy}, w, h, 0.0);
}

Detection det(const OrientedBox& box, double score) {
  Detection d;
  d.box = box;
  d.score = score;
  d.center = box_center(box);
  return d;
}

}  // namespace

TEST_CASE("a detection equal to the ground truth is a true positive") {
  const OrientedBox gt = make_box({5.0, 5.0}, 8.0, 4.0, 0.7);
  std::vector<OrientedBox> gts = {gt};
  std::vector<Detection> dets = {det(gt, 0.9)};
  const MatchResult match = match_detections(dets, gts, 0.5);
  REQUIRE(match.is_tp.size() == 1);
  CHECK(match.is_tp[0]);
  CHECK(match.gt_matched[0]);

  const PRCurve curve = pr_curve(match, gts.size());
  REQUIRE(curve.points.size() == 1);
  CHECK(curve.points[0].recall == 1.0);
  CHECK(curve.points[0].precision == 1.0);
  CHECK(average_precision(curve) == 1.0);
  CHECK(best_f1(curve) == 1.0);
}

TEST_CASE("a ground truth matches at most one detection") {
  const OrientedBox gt = axis_box(5.0, 5.0, 10.0, 10.0);
  std::vector<OrientedBox> gts = {gt};
  std::vector<Detection> dets = {det(gt, 0.8), det(gt, 0.9)};
  const MatchResult match = match_detections(dets, gts, 0.5);
  // Score order puts the 0.9 detection first; it claims the ground truth.
  REQUIRE(match.ordered.size() == 2);
  CHECK(match.ordered[0].score == 0.9);
  CHECK(match.is_tp[0]);
  CHECK_FALSE(match.is_tp[1]);
}

TEST_CASE("greedy score order fixes the outcome when matchings compete") {
  // Two ground truths and a wide top-scoring detection that overlaps
  // both. Greedily it claims gt1 (IOU 61/179 vs 59/181), starving the
  // second detection whose only good match was gt1 (IOU 85/115). The
  // optimal assignment (det1 to gt2, det2 to gt1) would score two true
  // positives; greedy yields [TP, FP, FP] by construction.
  const OrientedBox gt1 = axis_box(5.0, 5.0, 10.0, 10.0);
  const OrientedBox gt2 = axis_box(17.0, 5.0, 10.0, 10.0);
  const OrientedBox wide = axis_box(10.9, 5.0, 14.0, 10.0);
  const OrientedBox near1 = axis_box(6.5, 5.0, 10.0, 10.0);
  const OrientedBox far = axis_box(100.0, 100.0, 10.0, 10.0);

  CHECK(rotated_iou(wide, gt1) == Catch::Approx(61.0 / 179.0).margin(1e-9));
  CHECK(rotated_iou(wide, gt2) == Catch::Approx(59.0 / 181.0).margin(1e-9));
  CHECK(rotated_iou(near1, gt1) == Catch::Approx(85.0 / 115.0).margin(1e-9));
  CHECK(rotated_iou(near1, gt2) == 0.0);

  std::vector<OrientedBox> gts = {gt1, gt2};
  std::vector<Detection> dets = {det(wide, 0.9), det(near1, 0.8),
                                 det(far, 0.7)};
  const MatchResult match = match_detections(dets, gts, 0.3);
  REQUIRE(match.is_tp.size() == 3);
  CHECK(match.is_tp[0]);
  CHECK_FALSE(match.is_tp[1]);
  CHECK_FALSE(match.is_tp[2]);
  CHECK(match.gt_matched[0]);
  CHECK_FALSE(match.gt_matched[1]);
}

TEST_CASE("false positive before the true positive halves the AP") {
  const OrientedBox gt = axis_box(5.0, 5.0, 10.0, 10.0);
  std::vector<OrientedBox> gts = {gt};
  std::vector<Detection> dets = {det(axis_box(50.0, 50.0, 10.0, 10.0), 0.9),
                                 det(gt, 0.8)};
  const MatchResult match = match_detections(dets, gts, 0.5);
  const PRCurve curve = pr_curve(match, gts.size());
  REQUIRE(curve.points.size() == 2);
  CHECK(curve.points[0].recall == 0.0);
  CHECK(curve.points[0].precision == 0.0);
  CHECK(curve.points[1].recall == 1.0);
  CHECK(curve.points[1].precision == 0.5);

  CHECK(average_precision(curve) == Catch::Approx(0.5).margin(1e-12));
  CHECK(best_f1(curve) == Catch::Approx(2.0 / 3.0).margin(1e-12));
}

TEST_CASE("no detections give an empty curve with zero AP and F1") {
  std::vector<OrientedBox> gts = {axis_box(5.0, 5.0, 10.0, 10.0)};
  const MatchResult match = match_detections({}, gts, 0.5);
  const PRCurve curve = pr_curve(match, gts.size());
  CHECK(curve.points.empty());
  CHECK(average_precision(curve) == 0.0);
  CHECK(best_f1(curve) == 0.0);
}

TEST_CASE("sawtooth curve integrates through the precision envelope") {
  // TP, FP, TP, FP over two ground truths. Raw points:
  //   (0.5, 1), (0.5, 0.5), (1, 2/3), (1, 0.5)
  // Envelope: 1 over the first recall half, 2/3 over the second, so
  // AP = 0.5*1 + 0.5*(2/3) = 5/6. Best F1 sits at the third point.
  const OrientedBox g1 = axis_box(5.0, 5.0, 10.0, 10.0);
  const OrientedBox g2 = axis_box(100.0, 100.0, 10.0, 10.0);
  std::vector<OrientedBox> gts = {g1, g2};
  std::vector<Detection> dets = {det(g1, 0.9),
                                 det(axis_box(50.0, 5.0, 10.0, 10.0), 0.8),
                                 det(g2, 0.7),
                                 det(axis_box(50.0, 50.0, 10.0, 10.0), 0.6)};
  const MatchResult match = match_detections(dets, gts, 0.5);
  const PRCurve curve = pr_curve(match, gts.size());
  CHECK(average_precision(curve) == Catch::Approx(5.0 / 6.0).margin(1e-12));
  CHECK(best_f1(curve) == Catch::Approx(0.8).margin(1e-12));
}

TEST_CASE("matching respects the counting invariants on random sets") {
  oracle::Rng rng(46);
  for (int trial = 0; trial < 30; ++trial) {
    const int n_gt = rng.uniform_int(1, 6);
    const int n_det = rng.uniform_int(0, 8);
    std::vector<OrientedBox> gts;
    for (int i = 0; i < n_gt; ++i) gts.push_back(oracle::random_box(rng));
    std::vector<Detection> dets;
    for (int i = 0; i < n_det; ++i) {
      dets.push_back(det(oracle::random_box(rng), rng.uniform(0.0, 1.0)));
    }
    const MatchResult match = match_detections(dets, gts, 0.5);
    std::size_t tp = 0;
    for (bool flag : match.is_tp) tp += flag ? 1 : 0;
    std::size_t matched = 0;
    for (bool flag : match.gt_matched) matched += flag ? 1 : 0;
    REQUIRE(tp == matched);
    REQUIRE(tp <= std::min(gts.size(), dets.size()));

    const PRCurve curve = pr_curve(match, gts.size());
    double prev_recall = 0.0;
    for (const PRPoint& p : curve.points) {
      REQUIRE(p.recall >= prev_recall);
      REQUIRE(p.recall >= 0.0);
      REQUIRE(p.recall <= 1.0);
      REQUIRE(p.precision >= 0.0);
      REQUIRE(p.precision <= 1.0);
      prev_recall = p.recall;
    }
    const double ap = average_precision(curve);
    const double f1 = best_f1(curve);
    REQUIRE(ap >= 0.0);
    REQUIRE(ap <= 1.0);
    REQUIRE(f1 >= 0.0);
    REQUIRE(f1 <= 1.0);
  }
}

TEST_CASE("a trailing lowest-score false positive never raises AP") {
  oracle::Rng rng(47);
  for (int trial = 0; trial < 25; ++trial) {
    const int n_gt = rng.uniform_int(1, 5);
    std::vector<OrientedBox> gts;
    for (int i = 0; i < n_gt; ++i) gts.push_back(oracle::random_box(rng));
    std::vector<Detection> dets;
    double min_score = 1.0;
    for (int i = 0; i < rng.uniform_int(1, 6); ++i) {
      const double s = rng.uniform(0.2, 1.0);
      min_score = std::min(min_score, s);
      dets.push_back(det(oracle::random_box(rng), s));
    }
    const double before =
        average_precision(pr_curve(match_detections(dets, gts, 0.5), n_gt));
    dets.push_back(det(axis_box(1e4, 1e4, 5.0, 5.0), min_score - 0.1));
    const double after =
        average_precision(pr_curve(match_detections(dets, gts, 0.5), n_gt));
    REQUIRE(after <= before + 1e-12);
  }
}

TEST_CASE("detections equal to ground truths score perfect AP and F1") {
  oracle::Rng rng(48);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<OrientedBox> gts;
    std::vector<Detection> dets;
    const int n = rng.uniform_int(2, 10);
    for (int i = 0; i < n; ++i) {
      gts.push_back(oracle::random_box(rng));
      dets.push_back(det(gts.back(), 1.0 - 0.01 * i));
    }
    const MatchResult match = match_detections(dets, gts, 0.5);
    const PRCurve curve = pr_curve(match, gts.size());
    REQUIRE(average_precision(curve) == 1.0);
    REQUIRE(best_f1(curve) == 1.0);
  }
}

TEST_CASE("pooled curve re-ranks detections across images") {
  // Image 1 holds a clean hit at score 0.9; image 2 holds a false
  // positive at 0.95 and a hit at 0.5. Pooled order FP, TP, TP gives
  // envelope precision 2/3 everywhere, so AP = 2/3.
  const OrientedBox g1 = axis_box(5.0, 5.0, 10.0, 10.0);
  const OrientedBox g2 = axis_box(8.0, 8.0, 12.0, 6.0);
  std::vector<OrientedBox> gts1 = {g1};
  std::vector<OrientedBox> gts2 = {g2};
  std::vector<Detection> dets1 = {det(g1, 0.9)};
  std::vector<Detection> dets2 = {det(axis_box(60.0, 60.0, 10.0, 10.0), 0.95),
                                  det(g2, 0.5)};
  std::vector<MatchResult> matches = {match_detections(dets1, gts1, 0.5),
                                      match_detections(dets2, gts2, 0.5)};
  const PRCurve pooled = pooled_pr_curve(matches, 2);
  REQUIRE(pooled.points.size() == 3);
  CHECK(pooled.points[0].precision == 0.0);
  CHECK(pooled.points[1].recall == 0.5);
  CHECK(pooled.points[1].precision == 0.5);
  CHECK(pooled.points[2].recall == 1.0);
  CHECK(pooled.points[2].precision == Catch::Approx(2.0 / 3.0).margin(1e-12));
  CHECK(average_precision(pooled) == Catch::Approx(2.0 / 3.0).margin(1e-12));
}

TEST_CASE("nms keeps the higher-scored of two identical boxes") {
  const OrientedBox box = make_box({5.0, 5.0}, 8.0, 4.0, 0.5);
  std::vector<Detection> dets = {det(box, 0.8), det(box, 0.9)};
  const std::vector<Detection> kept = rotated_nms(dets, 0.1);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].score == 0.9);
}

TEST_CASE("nms keeps disjoint boxes untouched") {
  std::vector<Detection> dets = {det(axis_box(5.0, 5.0, 10.0, 10.0), 0.9),
                                 det(axis_box(50.0, 5.0, 10.0, 10.0), 0.8),
                                 det(axis_box(5.0, 50.0, 10.0, 10.0), 0.7)};
  CHECK(rotated_nms(dets, 0.1).size() == 3);
}

TEST_CASE("nms chain keeps the ends once the middle is suppressed") {
  // A and B overlap at IOU 0.6, B and C overlap at IOU 0.6, while A and
  // C overlap only at IOU 1/3 which sits below the 0.5 threshold. A
  // suppresses B; with B gone nothing suppresses C.
  const OrientedBox a = axis_box(5.0, 5.0, 10.0, 10.0);
  const OrientedBox b = axis_box(7.5, 5.0, 10.0, 10.0);
  const OrientedBox c = axis_box(10.0, 5.0, 10.0, 10.0);
  CHECK(rotated_iou(a, b) == Catch::Approx(0.6).margin(1e-9));
  CHECK(rotated_iou(b, c) == Catch::Approx(0.6).margin(1e-9));
  CHECK(rotated_iou(a, c) == Catch::Approx(1.0 / 3.0).margin(1e-9));

  std::vector<Detection> dets = {det(a, 0.9), det(b, 0.8), det(c, 0.7)};
  const std::vector<Detection> kept = rotated_nms(dets, 0.5);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].score == 0.9);
  CHECK(kept[1].score == 0.7);
}

TEST_CASE("nms suppresses only above the threshold, not at it") {
  // IOU(A, B) = 1/3. A threshold just above keeps both; just below
  // suppresses the weaker one.
  const OrientedBox a = axis_box(5.0, 5.0, 10.0, 10.0);
  const OrientedBox b = axis_box(10.0, 5.0, 10.0, 10.0);
  std::vector<Detection> dets = {det(a, 0.9), det(b, 0.8)};
  CHECK(rotated_nms(dets, 0.34).size() == 2);
  CHECK(rotated_nms(dets, 0.33).size() == 1);
}

TEST_CASE("nms is idempotent") {
  oracle::Rng rng(49);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Detection> dets;
    for (int i = 0; i < rng.uniform_int(1, 12); ++i) {
      dets.push_back(det(oracle::random_box(rng), rng.uniform(0.0, 1.0)));
    }
    const std::vector<Detection> once = rotated_nms(dets, 0.3);
    const std::vector<Detection> twice = rotated_nms(once, 0.3);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
      REQUIRE(once[i].score == twice[i].score);
      for (int c = 0; c < 4; ++c) {
        REQUIRE(once[i].box.corners[c].x == twice[i].box.corners[c].x);
        REQUIRE(once[i].box.corners[c].y == twice[i].box.corners[c].y);
      }
    }
  }
}

TEST_CASE("thresholds outside the open unit interval are rejected") {
  std::vector<Detection> dets = {det(axis_box(5.0, 5.0, 10.0, 10.0), 0.9)};
  std::vector<OrientedBox> gts = {axis_box(5.0, 5.0, 10.0, 10.0)};
  CHECK_THROWS_AS(match_detections(dets, gts, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(match_detections(dets, gts, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rotated_nms(dets, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rotated_nms(dets, 1.0), std::invalid_argument);
  const MatchResult match = match_detections(dets, gts, 0.5);
  CHECK_THROWS_AS(pr_curve(match, 0), EmptyMask);
  std::vector<MatchResult> matches = {match};
  CHECK_THROWS_AS(pooled_pr_curve(matches, 0), EmptyMask);
}
