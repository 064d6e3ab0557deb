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

/// Detection evaluation under rotated IOU: greedy matching, PR curves,
/// average precision with the monotone precision envelope, best F1, and
/// greedy rotated non-maximum suppression. Score ties always break by
/// stable input order so every result is deterministic.

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "polarobb/common.hpp"
#include "polarobb/geometry.hpp"
#include "polarobb/targets.hpp"

namespace polarobb {

/// Outcome of greedy matching: detections reordered by descending score
/// with a parallel true-positive flag, plus the per-ground-truth matched
/// flags. Each ground truth matches at most one detection.
struct MatchResult {
  std::vector<Detection> ordered;
  std::vector<bool> is_tp;
  std::vector<bool> gt_matched;
};

/// One precision/recall pair from the descending score sweep.
struct PRPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct PRCurve {
  std::vector<PRPoint> points;
};

namespace detail {

/// Indices of `dets` in descending score order, equal scores keeping
/// their input order.
inline std::vector<std::size_t> score_order(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return dets[a].score > dets[b].score;
                   });
  return order;
}

}  // namespace detail

/// Greedy matching: detections in descending score order each claim the
/// unmatched ground truth of highest rotated IOU when that IOU reaches
/// the threshold; everything else is a false positive.
inline MatchResult match_detections(std::span<const Detection> dets,
                                    std::span<const OrientedBox> gts,
                                    double iou_thr = 0.5) {
  if (!(iou_thr > 0.0 && iou_thr < 1.0)) {
    throw std::invalid_argument("matching threshold must lie in (0, 1)");
  }
  MatchResult out;
  out.gt_matched.assign(gts.size(), false);
  for (std::size_t idx : detail::score_order(dets)) {
    const Detection& det = dets[idx];
    double best_iou = 0.0;
    std::size_t best_gt = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (out.gt_matched[g]) continue;
      const double iou = rotated_iou(det.box, gts[g]);
      if (iou > best_iou) {
        best_iou = iou;
        best_gt = g;
      }
    }
    const bool hit = best_gt < gts.size() && best_iou >= iou_thr;
    if (hit) out.gt_matched[best_gt] = true;
    out.ordered.push_back(det);
    out.is_tp.push_back(hit);
  }
  return out;
}

/// Cumulative precision/recall after each detection in score order.
inline PRCurve pr_curve(const MatchResult& match, std::size_t n_gt) {
  if (n_gt < 1) throw EmptyMask("precision/recall needs ground truths");
  PRCurve curve;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < match.ordered.size(); ++i) {
    if (match.is_tp[i]) ++tp;
    curve.points.push_back(
        {static_cast<double>(tp) / static_cast<double>(n_gt),
         static_cast<double>(tp) / static_cast<double>(i + 1)});
  }
  return curve;
}

/// Pools per-image match results into one curve: all detections are
/// re-ranked by score across images (ties stable by image order, then by
/// rank within the image) and accumulated against the total ground-truth
/// count.
inline PRCurve pooled_pr_curve(std::span<const MatchResult> matches,
                               std::size_t total_gt) {
  if (total_gt < 1) throw EmptyMask("precision/recall needs ground truths");
  struct Flag {
    double score;
    bool tp;
  };
  std::vector<Flag> flags;
  for (const MatchResult& m : matches) {
    for (std::size_t i = 0; i < m.ordered.size(); ++i) {
      flags.push_back({m.ordered[i].score, static_cast<bool>(m.is_tp[i])});
    }
  }
  std::stable_sort(flags.begin(), flags.end(),
                   [](const Flag& a, const Flag& b) { return a.score > b.score; });
  PRCurve curve;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i].tp) ++tp;
    curve.points.push_back(
        {static_cast<double>(tp) / static_cast<double>(total_gt),
         static_cast<double>(tp) / static_cast<double>(i + 1)});
  }
  return curve;
}

/// Area under the PR curve with all-point interpolation: the precision
/// envelope is made non-increasing right to left, then integrated over
/// recall.
inline double average_precision(const PRCurve& curve) {
  const std::size_t count = curve.points.size();
  if (count == 0) return 0.0;
  std::vector<double> envelope(count);
  double running = 0.0;
  for (std::size_t i = count; i-- > 0;) {
    running = std::max(running, curve.points[i].precision);
    envelope[i] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    ap += (curve.points[i].recall - prev_recall) * envelope[i];
    prev_recall = curve.points[i].recall;
  }
  return ap;
}

/// Maximum F1 over the sweep points; 0 when precision + recall vanish.
inline double best_f1(const PRCurve& curve) {
  double best = 0.0;
  for (const PRPoint& p : curve.points) {
    const double denom = p.precision + p.recall;
    if (denom > 0.0) {
      best = std::max(best, 2.0 * p.precision * p.recall / denom);
    }
  }
  return best;
}

/// Greedy rotated non-maximum suppression: keep the highest-score
/// detection, drop every remaining one whose rotated IOU with it exceeds
/// the threshold, repeat. Kept detections come back in descending score
/// order.
inline std::vector<Detection> rotated_nms(std::span<const Detection> dets,
                                          double nms_thr = 0.1) {
  if (!(nms_thr > 0.0 && nms_thr < 1.0)) {
    throw std::invalid_argument("suppression threshold must lie in (0, 1)");
  }
  const std::vector<std::size_t> order = detail::score_order(dets);
  std::vector<bool> suppressed(dets.size(), false);
  std::vector<Detection> kept;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (suppressed[order[i]]) continue;
    const Detection& winner = dets[order[i]];
    kept.push_back(winner);
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (suppressed[order[j]]) continue;
      if (rotated_iou(winner.box, dets[order[j]].box) > nms_thr) {
        suppressed[order[j]] = true;
      }
    }
  }
  return kept;
}

}  // namespace polarobb
