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

/// Three-part detection loss with analytic gradients: focal heatmap loss,
/// L1 offset loss at center cells, and the IOU-weighted smooth-L1
/// encoding loss. The IOU weight is a stop-gradient factor: it scales the
/// smooth-L1 gradient but is held constant during differentiation, so the
/// IOU term sets the magnitude while smooth-L1 sets the direction.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "polarobb/codec.hpp"
#include "polarobb/common.hpp"
#include "polarobb/geometry.hpp"
#include "polarobb/targets.hpp"

namespace polarobb {

struct LossConfig {
  double alpha = 2.0;       // focal exponent on the prediction
  double beta = 4.0;        // focal exponent on the soft negative label
  double gamma = 1.0;       // IOU weight strength
  double prob_clamp = 1e-6;  // probability clamp before logarithms
  double iou_clamp = 1e-6;   // lower IOU clamp before -log
  double ls_guard = 1e-9;    // smooth-L1 sum guard in the weight divisor
};

struct LossBreakdown {
  double hm = 0.0;
  double off = 0.0;
  double encode = 0.0;
  double total = 0.0;
};

/// Loss value with its gradient with respect to the predicted grid.
struct GridLoss {
  double value = 0.0;
  MapGrid gradient;
};

/// Focal loss over the center heatmap, averaged by the target count K.
/// Predictions are clamped to [prob_clamp, 1-prob_clamp] before the
/// logarithms; the gradient is the exact derivative of the clamped
/// expression (zero where the clamp is active). Cells with Y exactly 1
/// are positives, every other cell contributes the soft-negative branch.
inline GridLoss heatmap_loss(const HeatmapGrid& P, const HeatmapGrid& Y,
                             std::size_t K, const LossConfig& cfg = {}) {
  if (!P.same_shape(Y) || P.channels() != 1 || Y.channels() != 1) {
    throw DimMismatch("heatmap grids must share one single-channel shape");
  }
  if (K < 1) throw EmptyMask("heatmap loss needs at least one target");
  GridLoss out;
  out.gradient = MapGrid(P.width(), P.height(), 1);
  const double lo = cfg.prob_clamp;
  const double hi = 1.0 - cfg.prob_clamp;
  const double invK = 1.0 / static_cast<double>(K);
  double sum = 0.0;
  for (int y = 0; y < P.height(); ++y) {
    for (int x = 0; x < P.width(); ++x) {
      const double raw = P.at(x, y);
      const double p = std::clamp(raw, lo, hi);
      const double label = Y.at(x, y);
      double term = 0.0;
      double dterm = 0.0;  // d term / d p
      if (label == 1.0) {
        const double q = 1.0 - p;
        term = std::pow(q, cfg.alpha) * std::log(p);
        dterm = -cfg.alpha * std::pow(q, cfg.alpha - 1.0) * std::log(p) +
                std::pow(q, cfg.alpha) / p;
      } else {
        const double focal = std::pow(1.0 - label, cfg.beta);
        term = focal * std::pow(p, cfg.alpha) * std::log(1.0 - p);
        dterm = focal * (cfg.alpha * std::pow(p, cfg.alpha - 1.0) *
                             std::log(1.0 - p) -
                         std::pow(p, cfg.alpha) / (1.0 - p));
      }
      sum -= term;
      out.gradient.at(x, y) = (raw > lo && raw < hi) ? -invK * dterm : 0.0;
    }
  }
  out.value = sum * invK;
  return out;
}

/// L1 offset loss over the masked center cells, both channels, averaged
/// by the mask count. The subgradient at an exact tie is 0.
inline GridLoss offset_loss(const OffsetGrid& pred, const OffsetGrid& gt,
                            const CenterMask& mask) {
  if (!pred.same_shape(gt) || pred.channels() != 2 || gt.channels() != 2) {
    throw DimMismatch("offset grids must share one two-channel shape");
  }
  if (pred.width() != mask.width || pred.height() != mask.height) {
    throw DimMismatch("mask dims do not match the offset grids");
  }
  if (mask.count() == 0) throw EmptyMask("offset loss needs masked centers");
  GridLoss out;
  out.gradient = MapGrid(pred.width(), pred.height(), 2);
  const double invK = 1.0 / static_cast<double>(mask.count());
  double sum = 0.0;
  for (const GridCell& cell : mask.cells) {
    for (int c = 0; c < 2; ++c) {
      const double d = pred.at(cell.x, cell.y, c) - gt.at(cell.x, cell.y, c);
      sum += std::abs(d);
      out.gradient.at(cell.x, cell.y, c) =
          d > 0.0 ? invK : (d < 0.0 ? -invK : 0.0);
    }
  }
  out.value = sum * invK;
  return out;
}

/// Smooth L1: quadratic inside the unit error band, linear outside,
/// continuously differentiable at the seam.
inline double smooth_l1(double x1, double x2) {
  const double d = x1 - x2;
  const double a = std::abs(d);
  return a < 1.0 ? 0.5 * d * d : a - 0.5;
}

/// Derivative of smooth_l1 with respect to x1.
inline double smooth_l1_grad(double x1, double x2) {
  const double d = x1 - x2;
  if (d > 1.0) return 1.0;
  if (d < -1.0) return -1.0;
  return d;
}

/// Per-target composition of the encoding loss: the smooth-L1 sum scaled
/// by the IOU weight 1 + gamma*(-log iou)/max(ls, ls_guard). With the
/// guard, a perfect prediction (ls = 0, iou = 1) maps to 0.
inline double iou_weighted_term(double ls, double iou,
                                const LossConfig& cfg = {}) {
  const double clamped = std::clamp(iou, cfg.iou_clamp, 1.0);
  const double w =
      1.0 + cfg.gamma * (-std::log(clamped)) / std::max(ls, cfg.ls_guard);
  return w * ls;
}

/// Ground truth for one encoding-map cell: the target distances and the
/// source box they came from.
struct EncodingTarget {
  GridCell cell;
  std::vector<double> distances;  // input pixels, length N
  OrientedBox box;
};

/// Evaluation of one predicted encoding against one target: the weighted
/// loss, its pieces, and the gradient with respect to the prediction.
/// The decoded IOU uses the ground-truth center (offsets are supervised
/// separately); undecodable predictions fall to the IOU clamp. The weight
/// is a stop-gradient factor, so gradient = weight * smooth_l1_grad.
struct EncodingTargetEval {
  double loss = 0.0;
  double smooth_l1_sum = 0.0;
  double iou = 0.0;
  double weight = 1.0;
  std::vector<double> gradient;
};

inline EncodingTargetEval eval_encoding_target(std::span<const double> pred,
                                               std::span<const double> gt,
                                               const OrientedBox& gt_box,
                                               const LossConfig& cfg = {}) {
  if (pred.size() != gt.size()) {
    throw DimMismatch("prediction and target encodings differ in length");
  }
  EncodingTargetEval out;
  out.gradient.resize(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    out.smooth_l1_sum += smooth_l1(pred[i], gt[i]);
  }
  PolarEncoding enc;
  enc.center = box_center(gt_box);
  enc.distances.assign(pred.begin(), pred.end());
  double iou = cfg.iou_clamp;
  try {
    iou = rotated_iou(decode(enc), gt_box);
  } catch (const DegenerateInput&) {
  } catch (const NumericalGuard&) {
  }
  out.iou = std::clamp(iou, cfg.iou_clamp, 1.0);
  out.weight = 1.0 + cfg.gamma * (-std::log(out.iou)) /
                         std::max(out.smooth_l1_sum, cfg.ls_guard);
  out.loss = out.weight * out.smooth_l1_sum;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    out.gradient[i] = out.weight * smooth_l1_grad(pred[i], gt[i]);
  }
  return out;
}

/// IOU-weighted smooth-L1 loss over the encoding map, averaged by the
/// target count.
inline GridLoss encoding_loss(const EncodingGrid& pred,
                              std::span<const EncodingTarget> targets,
                              const LossConfig& cfg = {}) {
  if (targets.empty()) throw EmptyMask("encoding loss needs targets");
  GridLoss out;
  out.gradient = MapGrid(pred.width(), pred.height(), pred.channels());
  const double invK = 1.0 / static_cast<double>(targets.size());
  const std::size_t n = static_cast<std::size_t>(pred.channels());
  std::vector<double> p(n);
  for (const EncodingTarget& t : targets) {
    if (t.distances.size() != n) {
      throw DimMismatch("encoding target length differs from the grid depth");
    }
    if (t.cell.x < 0 || t.cell.x >= pred.width() || t.cell.y < 0 ||
        t.cell.y >= pred.height()) {
      throw DimMismatch("encoding target cell outside the grid");
    }
    for (std::size_t c = 0; c < n; ++c) {
      p[c] = pred.at(t.cell.x, t.cell.y, static_cast<int>(c));
    }
    const EncodingTargetEval ev =
        eval_encoding_target(p, t.distances, t.box, cfg);
    out.value += invK * ev.loss;
    for (std::size_t c = 0; c < n; ++c) {
      out.gradient.at(t.cell.x, t.cell.y, static_cast<int>(c)) =
          invK * ev.gradient[c];
    }
  }
  return out;
}

/// Combines the three parts; total is their plain sum.
inline LossBreakdown total_loss(double hm, double off, double encode) {
  return {hm, off, encode, hm + off + encode};
}

}  // namespace polarobb
