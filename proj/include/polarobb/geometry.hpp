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

/// Planar geometry kernel: points, convex polygons, oriented boxes,
/// convex hull, polygon clipping, rotated IOU, and minimum-area
/// bounding boxes. All angles are radians, y grows upward.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "polarobb/common.hpp"

namespace polarobb {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

/// z-component of the 3-d cross product of a and b.
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

inline double squared_norm(Point2 p) { return p.x * p.x + p.y * p.y; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }

/// Simple polygon as an ordered vertex ring (no closing duplicate).
struct Polygon {
  std::vector<Point2> vertices;
};

/// Rectangle as four corners in boundary order; counter-clockwise when
/// produced by this library. Consecutive corners share an edge.
struct OrientedBox {
  std::array<Point2, 4> corners;
};

/// Center/size/angle form of a rectangle. `angle` is the direction of the
/// `width` edges, reduced to [0, pi/2); `height` spans the orthogonal edges.
struct BoxParam {
  Point2 center;
  double width = 0.0;
  double height = 0.0;
  double angle = 0.0;
};

/// Shoelace area, positive for counter-clockwise rings. Degenerate rings
/// (fewer than 3 vertices, collinear) come out as 0.
inline double signed_area(const Polygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = v[i];
    const Point2& b = v[(i + 1) % n];
    twice += cross(a, b);
  }
  return 0.5 * twice;
}

inline Polygon to_polygon(const OrientedBox& box) {
  return Polygon{{box.corners.begin(), box.corners.end()}};
}

inline Point2 box_center(const OrientedBox& box) {
  Point2 c;
  for (const Point2& p : box.corners) c = c + p;
  return 0.25 * c;
}

inline double box_area(const OrientedBox& box) {
  return std::abs(signed_area(to_polygon(box)));
}

/// Side lengths of a box as (short, long).
inline std::pair<double, double> box_sides(const OrientedBox& box) {
  const double a = norm(box.corners[1] - box.corners[0]);
  const double b = norm(box.corners[2] - box.corners[1]);
  return {std::min(a, b), std::max(a, b)};
}

/// Box from center, full side lengths and the direction of the w-edges.
/// Corners come out counter-clockwise.
inline OrientedBox make_box(Point2 center, double w, double h, double angle) {
  if (!(w > 0.0) || !(h > 0.0)) {
    throw DegenerateInput("box sides must be positive");
  }
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const Point2 ux{c, s};
  const Point2 uy{-s, c};
  const double hw = 0.5 * w;
  const double hh = 0.5 * h;
  return OrientedBox{{{center + hw * ux + hh * uy, center - hw * ux + hh * uy,
                       center - hw * ux - hh * uy,
                       center + hw * ux - hh * uy}}};
}

inline OrientedBox make_box(const BoxParam& p) {
  return make_box(p.center, p.width, p.height, p.angle);
}

/// Rotates a box about its own center.
inline OrientedBox rotate(const OrientedBox& box, double angle) {
  const Point2 c = box_center(box);
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  OrientedBox out = box;
  for (Point2& p : out.corners) {
    const Point2 d = p - c;
    p = {c.x + ca * d.x - sa * d.y, c.y + sa * d.x + ca * d.y};
  }
  return out;
}

inline OrientedBox translate(const OrientedBox& box, Point2 delta) {
  OrientedBox out = box;
  for (Point2& p : out.corners) p = p + delta;
  return out;
}

namespace detail {

/// Direction angle of a vector folded into [0, pi).
inline double edge_angle_mod_pi(Point2 e) {
  double a = std::atan2(e.y, e.x);
  if (a < 0.0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a;
}

}  // namespace detail

/// Extracts the center/size/angle form of a rectangle with the angle in
/// [0, pi/2): of the two orthogonal edge directions, the one lying in
/// [0, pi/2) becomes `angle` and its edge length becomes `width`. This
/// representation is intentionally discontinuous where an edge direction
/// crosses a multiple of pi/2: width and height swap roles there.
inline BoxParam to_box_param(const OrientedBox& box) {
  const Point2 e0 = box.corners[1] - box.corners[0];
  const Point2 e1 = box.corners[2] - box.corners[1];
  const double l0 = norm(e0);
  const double l1 = norm(e1);
  if (l0 <= kGeomEps || l1 <= kGeomEps) {
    throw DegenerateInput("box has a zero-length edge");
  }
  const double a0 = detail::edge_angle_mod_pi(e0);
  const double a1 = detail::edge_angle_mod_pi(e1);
  BoxParam out;
  out.center = box_center(box);
  const double half = 0.5 * kPi;
  if (a0 < half) {
    out.angle = a0;
    out.width = l0;
    out.height = l1;
  } else {
    out.angle = a1 < half ? a1 : a1 - half;
    out.width = l1;
    out.height = l0;
  }
  return out;
}

/// Convex hull (Andrew monotone chain) in counter-clockwise order with
/// exactly collinear points dropped. Exact duplicate points are removed
/// first. The turn test uses the exact cross-product sign: an epsilon
/// there would break the chain invariant on near-collinear runs and can
/// discard true extreme points. Throws DegenerateInput when fewer than 3
/// distinct points remain or all points are collinear.
inline Polygon convex_hull(std::span<const Point2> points) {
  std::vector<Point2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Point2 a, Point2 b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) throw DegenerateInput("convex hull needs 3 distinct points");

  std::vector<Point2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 &&
           cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) {
      --k;
    }
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {  // upper chain
    while (k >= lower &&
           cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) {
      --k;
    }
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);  // last point equals the first
  if (hull.size() < 3) throw DegenerateInput("input points are collinear");
  return Polygon{std::move(hull)};
}

namespace detail {

inline Polygon oriented_ccw(Polygon poly) {
  if (signed_area(poly) < 0.0) {
    std::reverse(poly.vertices.begin(), poly.vertices.end());
  }
  return poly;
}

/// Clips a convex subject polygon against one half-plane (left of a->b).
inline std::vector<Point2> clip_half_plane(const std::vector<Point2>& subject,
                                           Point2 a, Point2 b) {
  std::vector<Point2> out;
  out.reserve(subject.size() + 1);
  const Point2 dir = b - a;
  const std::size_t n = subject.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& cur = subject[i];
    const Point2& nxt = subject[(i + 1) % n];
    const double dc = cross(dir, cur - a);
    const double dn = cross(dir, nxt - a);
    const bool cur_in = dc >= -kGeomEps;
    const bool nxt_in = dn >= -kGeomEps;
    if (cur_in) out.push_back(cur);
    if (cur_in != nxt_in) {
      const double t = dc / (dc - dn);
      out.push_back(cur + t * (nxt - cur));
    }
  }
  return out;
}

}  // namespace detail

/// Area of the intersection of two convex polygons (Sutherland-Hodgman).
/// Vertex order of the inputs does not matter.
inline double intersection_area(const Polygon& a, const Polygon& b) {
  if (a.vertices.size() < 3 || b.vertices.size() < 3) return 0.0;
  const Polygon pa = detail::oriented_ccw(a);
  const Polygon pb = detail::oriented_ccw(b);
  std::vector<Point2> region = pa.vertices;
  const std::size_t nb = pb.vertices.size();
  for (std::size_t i = 0; i < nb && !region.empty(); ++i) {
    region = detail::clip_half_plane(region, pb.vertices[i],
                                     pb.vertices[(i + 1) % nb]);
  }
  if (region.size() < 3) return 0.0;
  return std::abs(signed_area(Polygon{std::move(region)}));
}

/// Intersection over union of two boxes, clamped into [0, 1].
inline double rotated_iou(const OrientedBox& a, const OrientedBox& b) {
  const Polygon pa = to_polygon(a);
  const Polygon pb = to_polygon(b);
  const double area_a = std::abs(signed_area(pa));
  const double area_b = std::abs(signed_area(pb));
  const double inter = intersection_area(pa, pb);
  const double uni = area_a + area_b - inter;
  if (uni <= kGeomEps) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

/// Minimum-area oriented bounding box of a convex hull. One hull edge is
/// flush with the result (rotating-calipers invariant), so only hull edge
/// directions need to be scanned. Throws DegenerateInput on a hull with
/// (near-)zero area.
inline OrientedBox min_bounding_box(const Polygon& hull) {
  const auto& v = hull.vertices;
  if (v.size() < 3 || std::abs(signed_area(hull)) <= kGeomEps) {
    throw DegenerateInput("hull is degenerate");
  }
  const std::size_t n = v.size();
  double best_area = std::numeric_limits<double>::infinity();
  OrientedBox best{};
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 edge = v[(i + 1) % n] - v[i];
    const double len = norm(edge);
    if (len <= kGeomEps) continue;
    const Point2 ep{edge.x / len, edge.y / len};    // along the edge
    const Point2 eo{edge.y / len, -edge.x / len};   // orthogonal
    double min_p = std::numeric_limits<double>::infinity();
    double max_p = -min_p;
    double min_o = min_p;
    double max_o = -min_p;
    for (const Point2& p : v) {
      const double u = dot(p, ep);
      const double w = dot(p, eo);
      min_p = std::min(min_p, u);
      max_p = std::max(max_p, u);
      min_o = std::min(min_o, w);
      max_o = std::max(max_o, w);
    }
    const double area = (max_p - min_p) * (max_o - min_o);
    if (area < best_area) {
      best_area = area;
      const auto corner = [&](double u, double w) {
        return Point2{u * ep.x + w * eo.x, u * ep.y + w * eo.y};
      };
      best = OrientedBox{{{corner(min_p, min_o), corner(min_p, max_o),
                           corner(max_p, max_o), corner(max_p, min_o)}}};
    }
  }
  return best;
}

/// True when p lies in the box, using signed distance to each edge with an
/// absolute tolerance in pixels.
inline bool box_contains(const OrientedBox& box, Point2 p,
                         double tol = kGeomEps) {
  double orient = signed_area(to_polygon(box)) >= 0.0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const Point2 a = box.corners[i];
    const Point2 b = box.corners[(i + 1) % 4];
    const double len = norm(b - a);
    if (len <= kGeomEps) return false;
    if (orient * cross(b - a, p - a) / len < -tol) return false;
  }
  return true;
}

}  // namespace polarobb
