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

/// Analytical study of the encoding's continuity: the exact
/// center-to-boundary distance function d(phi), the sampled rotation
/// difference S(theta), the IOU-versus-angle-error sensitivity of thin
/// boxes, and deterministic curve sweeps for all three.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "polarobb/codec.hpp"
#include "polarobb/common.hpp"
#include "polarobb/geometry.hpp"

namespace polarobb {

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

/// A labeled sampled curve; x strictly increases along the points.
struct Curve {
  std::string label;
  std::vector<CurvePoint> points;
};

/// Half-open sweep description; sweep_values materializes it as
/// start, start + step, ..., up to and including stop when it lands on
/// the grid.
struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
};

inline std::vector<double> sweep_values(const SweepRange& range) {
  if (!std::isfinite(range.start) || !std::isfinite(range.stop) ||
      !std::isfinite(range.step)) {
    throw BadSweep("sweep bounds must be finite");
  }
  if (range.step <= 0.0) throw BadSweep("sweep step must be positive");
  if (range.stop < range.start) throw BadSweep("sweep stop precedes start");
  // Half-step slack lets an inexact multiple still land on the stop.
  const long long count = static_cast<long long>(
      std::floor((range.stop - range.start) / range.step + 0.5 +
                 1e-9));
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(count) + 1);
  for (long long i = 0; i <= count; ++i) {
    const double v = range.start + static_cast<double>(i) * range.step;
    if (v > range.stop + 0.5 * range.step) break;
    values.push_back(v);
  }
  return values;
}

/// Exact distance from the box center to its boundary along the sampling
/// ray at angle phi. Periodic with period pi by central symmetry.
inline double boundary_distance(const OrientedBox& box, double phi) {
  const SortedCornerFrame frame = corner_frame(box);
  return boundary_distance(frame, detail::wrap_angle(phi));
}

/// Sampled difference between a box and its theta-rotated copy:
/// S(theta) = sum over i of |d_0(phi_i) - d_theta(phi_i)| at the N
/// sampling angles phi_i = pi*i/N. Because the boundary-distance
/// function has period pi, the rotation is reduced modulo pi first;
/// this keeps S exactly zero at theta in {0, pi} instead of within
/// rounding error of it.
inline double s_theta(const OrientedBox& box, double theta, int n) {
  if (n < 3) throw DegenerateInput("sampled difference needs n >= 3");
  const double reduced = std::fmod(theta, kPi);
  // Rotation by zero is the identity; skip the corner recomputation so
  // whole-period rotations stay at exactly zero difference.
  if (reduced == 0.0) return 0.0;
  const OrientedBox rotated = rotate(box, reduced);
  const SortedCornerFrame base = corner_frame(box);
  const SortedCornerFrame moved = corner_frame(rotated);
  double sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double phi = detail::wrap_angle(kPi * static_cast<double>(i) /
                                          static_cast<double>(n));
    sum += std::abs(boundary_distance(base, phi) -
                    boundary_distance(moved, phi));
  }
  return sum;
}

/// Overlap between an aspect-a box (w = a*h) and its copy rotated by
/// theta about the shared center.
inline double iou_vs_angle_error(double aspect, double theta) {
  if (aspect < 1.0) throw DegenerateInput("aspect ratio must be >= 1");
  const double h = 10.0;
  const OrientedBox box = make_box({0.0, 0.0}, aspect * h, h, 0.0);
  return rotated_iou(box, rotate(box, theta));
}

enum class SweepMode { kSTheta, kDPhi, kIouSensitivity };

/// Configuration for emit_curves. The box feeds the S(theta) and d(phi)
/// modes; n_values picks the sampling counts for S(theta); aspects picks
/// the box family for the IOU sensitivity mode; rotation is the shift
/// applied to the second d(phi) curve.
struct SweepConfig {
  SweepMode mode = SweepMode::kSTheta;
  SweepRange range{0.0, kPi, kPi / 360.0};
  OrientedBox box = make_box({0.0, 0.0}, 20.0, 10.0, 0.0);
  std::vector<int> n_values = {8, 32};
  std::vector<double> aspects = {1.0, 2.0, 5.0, 10.0};
  double rotation = 0.5;
  bool normalize = false;
};

inline std::vector<Curve> emit_curves(const SweepConfig& cfg) {
  const std::vector<double> xs = sweep_values(cfg.range);
  if (xs.empty()) throw BadSweep("sweep produced no sample points");
  std::vector<Curve> curves;
  switch (cfg.mode) {
    case SweepMode::kSTheta: {
      if (cfg.n_values.empty()) throw BadSweep("no sampling counts given");
      for (int n : cfg.n_values) {
        Curve curve;
        curve.label = "s_theta_n" + std::to_string(n);
        for (double x : xs) curve.points.push_back({x, s_theta(cfg.box, x, n)});
        if (cfg.normalize) {
          double peak = 0.0;
          for (const CurvePoint& p : curve.points) {
            peak = std::max(peak, p.y);
          }
          if (peak > 0.0) {
            for (CurvePoint& p : curve.points) p.y /= peak;
          }
        }
        curves.push_back(std::move(curve));
      }
      break;
    }
    case SweepMode::kDPhi: {
      const OrientedBox shifted = rotate(cfg.box, cfg.rotation);
      Curve base;
      base.label = "d_phi";
      Curve moved;
      moved.label = "d_phi_rotated";
      const SortedCornerFrame f0 = corner_frame(cfg.box);
      const SortedCornerFrame f1 = corner_frame(shifted);
      for (double x : xs) {
        const double phi = detail::wrap_angle(x);
        base.points.push_back({x, boundary_distance(f0, phi)});
        moved.points.push_back({x, boundary_distance(f1, phi)});
      }
      curves.push_back(std::move(base));
      curves.push_back(std::move(moved));
      break;
    }
    case SweepMode::kIouSensitivity: {
      if (cfg.aspects.empty()) throw BadSweep("no aspect ratios given");
      for (double a : cfg.aspects) {
        Curve curve;
        std::string label = std::to_string(a);
        label.erase(label.find_last_not_of('0') + 1);
        if (!label.empty() && label.back() == '.') label.pop_back();
        curve.label = "iou_aspect_" + label;
        for (double x : xs) {
          curve.points.push_back({x, iou_vs_angle_error(a, x)});
        }
        curves.push_back(std::move(curve));
      }
      break;
    }
  }
  return curves;
}

}  // namespace polarobb
