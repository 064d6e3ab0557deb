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

/// Polar box codec. A rectangle is described by its center plus the
/// center-to-boundary distances sampled at n fixed angles pi*i/n,
/// i = 1..n. Rectangles are centrally symmetric, so the n samples pin
/// down 2n boundary points and the box is recovered as the minimum
/// bounding box of their convex hull. The representation is continuous
/// in the box pose: nearby rectangles have nearby distance vectors,
/// with no angle-wrapping jumps.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "polarobb/common.hpp"
#include "polarobb/geometry.hpp"

namespace polarobb {

/// Center plus boundary distances; distances[i] belongs to the sample
/// angle pi*(i+1)/n with n = distances.size().
struct PolarEncoding {
  Point2 center;
  std::vector<double> distances;
};

/// Box corners in the codec's polar frame, sorted by angle. Angles lie in
/// (-pi, pi]; the sign convention is positive for points at or below the
/// center height and negative above it, so the frame is a mirror of the
/// usual mathematical one. Queries and corners share the convention, which
/// is all the interpolation below needs.
struct SortedCornerFrame {
  Point2 center;
  std::array<double, 4> angles;
  std::array<double, 4> radii;
};

namespace detail {

/// Signed corner angle: arccos(dx/r) with the sign flipped above the
/// center height. Range (-pi, pi].
inline double codec_angle(Point2 delta, double r) {
  const double a = std::acos(std::clamp(delta.x / r, -1.0, 1.0));
  return delta.y > 0.0 ? -a : a;
}

/// Geometric unit vector for a codec-frame angle.
inline Point2 codec_direction(double angle) {
  return {std::cos(angle), -std::sin(angle)};
}

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double t = std::remainder(a, 2.0 * kPi);
  if (t <= -kPi) t += 2.0 * kPi;
  return t;
}

}  // namespace detail

inline SortedCornerFrame corner_frame(const OrientedBox& box) {
  const Point2 c = box_center(box);
  std::array<std::pair<double, double>, 4> polar;  // (angle, radius)
  for (std::size_t i = 0; i < 4; ++i) {
    const Point2 d = box.corners[i] - c;
    const double r = norm(d);
    if (r <= kGeomEps) throw DegenerateInput("corner coincides with center");
    polar[i] = {detail::codec_angle(d, r), r};
  }
  std::sort(polar.begin(), polar.end());
  SortedCornerFrame frame;
  frame.center = c;
  for (std::size_t i = 0; i < 4; ++i) {
    frame.angles[i] = polar[i].first;
    frame.radii[i] = polar[i].second;
    if (i > 0 && !(frame.angles[i] > frame.angles[i - 1])) {
      throw DegenerateInput("coincident corner angles");
    }
  }
  return frame;
}

/// Center-to-boundary distance of the rectangle along one codec-frame
/// angle. The query is wrapped into (-pi, pi], the boundary edge whose
/// angular interval contains it is selected (the four sorted corner angles
/// split the circle into three inner intervals plus the wrap-around one),
/// and the distance follows from the polar line through that edge's two
/// corners:
///
///   d = rj*rk*sin(aj - ak) / (rk*sin(t - ak) + rj*sin(aj - t))
///
/// Angle differences sit inside sines, so the wrap-around edge needs no
/// special casing. A query equal to a corner angle returns that corner's
/// radius exactly. Throws NumericalGuard when the denominator magnitude
/// falls below 1e-12.
inline double boundary_distance(const SortedCornerFrame& frame, double angle) {
  const double t = detail::wrap_angle(angle);
  const auto begin = frame.angles.begin();
  const auto it = std::lower_bound(begin, frame.angles.end(), t);
  std::size_t j = 3;
  std::size_t k = 0;
  const std::size_t idx = static_cast<std::size_t>(it - begin);
  if (idx >= 1 && idx <= 3) {
    j = idx - 1;
    k = idx;
  }
  const double aj = frame.angles[j];
  const double ak = frame.angles[k];
  const double rj = frame.radii[j];
  const double rk = frame.radii[k];
  const double den = rk * std::sin(t - ak) + rj * std::sin(aj - t);
  if (std::abs(den) < 1e-12) {
    throw NumericalGuard("boundary interpolation denominator underflow");
  }
  return rj * rk * std::sin(aj - ak) / den;
}

/// Samples the center-to-boundary distances at angles pi*i/n, i = 1..n.
inline PolarEncoding encode(const OrientedBox& box, int n) {
  if (n < 2) throw DegenerateInput("encoding needs at least 2 samples");
  const SortedCornerFrame frame = corner_frame(box);
  PolarEncoding enc;
  enc.center = frame.center;
  enc.distances.resize(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    enc.distances[static_cast<std::size_t>(i - 1)] =
        boundary_distance(frame, kPi * i / n);
  }
  return enc;
}

/// Throws DegenerateInput unless the encoding has >= 2 strictly positive
/// finite distances.
inline void validate(const PolarEncoding& enc) {
  if (enc.distances.size() < 2) {
    throw DegenerateInput("encoding needs at least 2 samples");
  }
  for (double d : enc.distances) {
    if (!std::isfinite(d) || !(d > 0.0)) {
      throw DegenerateInput("encoding distances must be positive");
    }
  }
}

/// The 2n boundary points of an encoding: each sample contributes the
/// point along its angle and the centrally mirrored one.
inline std::vector<Point2> decode_points(const PolarEncoding& enc) {
  validate(enc);
  const std::size_t n = enc.distances.size();
  std::vector<Point2> pts;
  pts.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = kPi * static_cast<double>(i + 1) / static_cast<double>(n);
    const Point2 dir = detail::codec_direction(a);
    const Point2 step = enc.distances[i] * dir;
    pts.push_back(enc.center + step);
    pts.push_back(enc.center - step);
  }
  return pts;
}

/// Recovers a box as the minimum bounding box of the decoded points.
/// Throws DegenerateInput when the points are collinear.
inline OrientedBox decode(const PolarEncoding& enc) {
  const std::vector<Point2> pts = decode_points(enc);
  return min_bounding_box(convex_hull(pts));
}

}  // namespace polarobb
