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

/// Ground-truth map generation for the three detection heads (center
/// heatmap, sub-cell offsets, polar encodings) and the inference-side
/// inverse: peak extraction and detection assembly. Maps live at 1/R of
/// the input resolution; centers, offsets and encodings refer back to
/// input pixels.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "polarobb/codec.hpp"
#include "polarobb/common.hpp"
#include "polarobb/geometry.hpp"

namespace polarobb {

struct GridDims {
  int width = 0;
  int height = 0;
};

struct GridCell {
  int x = 0;
  int y = 0;
  friend bool operator==(GridCell a, GridCell b) {
    return a.x == b.x && a.y == b.y;
  }
};

/// Dense row-major real grid with a fixed channel count. Heatmaps use one
/// channel, offset maps two, encoding maps N; the channel count is checked
/// at use sites rather than in the type.
class MapGrid {
 public:
  MapGrid() = default;
  MapGrid(int width, int height, int channels)
      : width_(width), height_(height), channels_(channels) {
    if (width < 1 || height < 1 || channels < 1) {
      throw DegenerateInput("grid dimensions must be positive");
    }
    values_.assign(static_cast<std::size_t>(width) *
                       static_cast<std::size_t>(height) *
                       static_cast<std::size_t>(channels),
                   0.0);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }

  double at(int x, int y, int c = 0) const { return values_[index(x, y, c)]; }
  double& at(int x, int y, int c = 0) { return values_[index(x, y, c)]; }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }
  bool same_shape(const MapGrid& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }

  const std::vector<double>& data() const { return values_; }
  std::vector<double>& data() { return values_; }

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> values_;
};

using HeatmapGrid = MapGrid;   // 1 channel, values in [0,1]
using OffsetGrid = MapGrid;    // 2 channels (dx, dy) in cells
using EncodingGrid = MapGrid;  // N channels, distances in input pixels

/// Cells that carry supervision, one per surviving target, in input box
/// order after collision resolution.
struct CenterMask {
  int width = 0;
  int height = 0;
  std::vector<GridCell> cells;
  std::size_t count() const { return cells.size(); }
};

struct Peak {
  GridCell cell;
  double score = 0.0;
};

struct Detection {
  Point2 center;       // input pixels
  double score = 0.0;  // heatmap confidence in [0,1]
  OrientedBox box;
};

namespace detail {

struct CenterPlacement {
  std::size_t box_index = 0;
  GridCell cell;
};

inline GridCell center_cell(const OrientedBox& box, GridDims dims, int R) {
  const Point2 c = box_center(box);
  const double limit_x = static_cast<double>(dims.width) * R;
  const double limit_y = static_cast<double>(dims.height) * R;
  if (c.x < 0.0 || c.y < 0.0 || c.x >= limit_x || c.y >= limit_y) {
    throw DegenerateInput("box center outside the image");
  }
  return {static_cast<int>(std::floor(c.x / R)),
          static_cast<int>(std::floor(c.y / R))};
}

/// One winner per occupied cell: the larger-area box stays, ties keep the
/// earlier box. Each displaced box produces a warning line. Winners are
/// reported in input order.
inline std::vector<CenterPlacement> resolve_center_cells(
    std::span<const OrientedBox> boxes, GridDims dims, int R,
    std::vector<std::string>* warnings) {
  if (R < 1) throw DegenerateInput("downsample factor must be >= 1");
  std::unordered_map<long long, std::size_t> winner;  // cell key -> box index
  const auto key = [&](GridCell c) {
    return static_cast<long long>(c.y) * dims.width + c.x;
  };
  std::vector<GridCell> cells(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    cells[i] = center_cell(boxes[i], dims, R);
    const auto [it, fresh] = winner.try_emplace(key(cells[i]), i);
    if (fresh) continue;
    const std::size_t held = it->second;
    const bool replace = box_area(boxes[i]) > box_area(boxes[held]);
    const std::size_t losing = replace ? held : i;
    if (replace) it->second = i;
    if (warnings != nullptr) {
      warnings->push_back(
          "center cell (" + std::to_string(cells[i].x) + "," +
          std::to_string(cells[i].y) + ") collision: dropped box " +
          std::to_string(losing) + ", kept larger box " +
          std::to_string(replace ? i : held));
    }
  }
  std::vector<CenterPlacement> out;
  out.reserve(winner.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto it = winner.find(key(cells[i]));
    if (it != winner.end() && it->second == i) out.push_back({i, cells[i]});
  }
  return out;
}

}  // namespace detail

/// Ground-truth center heatmap: one isotropic Gaussian per box, centered
/// on the box's integer cell so the peak value is exactly 1, with
/// sigma = (short side)/(3R) cells floored at 0.5 (sub-half-cell Gaussians
/// vanish after rasterization). Overlaps keep the element-wise maximum.
inline HeatmapGrid gaussian_heatmap(std::span<const OrientedBox> boxes,
                                    GridDims dims, int R) {
  if (R < 1) throw DegenerateInput("downsample factor must be >= 1");
  HeatmapGrid grid(dims.width, dims.height, 1);
  for (const OrientedBox& box : boxes) {
    const GridCell c = detail::center_cell(box, dims, R);
    const double sigma =
        std::max(0.5, box_sides(box).first / (3.0 * static_cast<double>(R)));
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int y = 0; y < dims.height; ++y) {
      for (int x = 0; x < dims.width; ++x) {
        const double du = x - c.x;
        const double dv = y - c.y;
        const double g = std::exp(-(du * du + dv * dv) * inv);
        double& cell = grid.at(x, y);
        if (g > cell) cell = g;
      }
    }
  }
  return grid;
}

/// Sub-cell quantization targets: at each surviving center cell stores
/// center/R - floor(center/R), componentwise in [0,1); other cells zero.
inline std::pair<OffsetGrid, CenterMask> offset_targets(
    std::span<const OrientedBox> boxes, GridDims dims, int R,
    std::vector<std::string>* warnings = nullptr) {
  OffsetGrid grid(dims.width, dims.height, 2);
  CenterMask mask{dims.width, dims.height, {}};
  for (const auto& [i, cell] :
       detail::resolve_center_cells(boxes, dims, R, warnings)) {
    const Point2 c = box_center(boxes[i]);
    grid.at(cell.x, cell.y, 0) = c.x / R - cell.x;
    grid.at(cell.x, cell.y, 1) = c.y / R - cell.y;
    mask.cells.push_back(cell);
  }
  return {std::move(grid), std::move(mask)};
}

/// Polar-encoding targets: at each surviving center cell stores
/// encode(box, n).distances in input pixels; other cells zero.
inline std::pair<EncodingGrid, CenterMask> encoding_targets(
    std::span<const OrientedBox> boxes, int n, GridDims dims, int R,
    std::vector<std::string>* warnings = nullptr) {
  EncodingGrid grid(dims.width, dims.height, n);
  CenterMask mask{dims.width, dims.height, {}};
  for (const auto& [i, cell] :
       detail::resolve_center_cells(boxes, dims, R, warnings)) {
    const PolarEncoding enc = encode(boxes[i], n);
    for (int c = 0; c < n; ++c) {
      grid.at(cell.x, cell.y, c) = enc.distances[static_cast<std::size_t>(c)];
    }
    mask.cells.push_back(cell);
  }
  return {std::move(grid), std::move(mask)};
}

/// Cells equal to the maximum of their in-bounds 3x3 neighborhood with
/// value >= score_threshold, sorted by score descending (ties by row then
/// column), truncated to top_k. Plateau ties all qualify.
inline std::vector<Peak> extract_peaks(const HeatmapGrid& P,
                                       double score_threshold,
                                       std::size_t top_k) {
  if (P.channels() != 1) throw DimMismatch("heatmap must have one channel");
  std::vector<Peak> peaks;
  for (int y = 0; y < P.height(); ++y) {
    for (int x = 0; x < P.width(); ++x) {
      const double v = P.at(x, y);
      if (v < score_threshold) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          if (!P.in_bounds(nx, ny)) continue;
          if (P.at(nx, ny) > v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back({{x, y}, v});
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a,
                                                  const Peak& b) {
    return a.score > b.score;
  });
  if (peaks.size() > top_k) peaks.resize(top_k);
  return peaks;
}

/// Decodes detections from predicted maps: for each heatmap peak, the
/// center is refined by the offset channels and scaled back to input
/// pixels, and the encoding channels at the peak cell are decoded into a
/// box. Peaks whose encoding cannot be decoded are skipped, with a
/// diagnostic line when a sink is provided.
inline std::vector<Detection> assemble_detections(
    const HeatmapGrid& P, const OffsetGrid& O, const EncodingGrid& E, int R,
    double score_threshold, std::size_t top_k,
    std::vector<std::string>* diagnostics = nullptr) {
  if (!P.same_shape(O) || !P.same_shape(E)) {
    throw DimMismatch("detection maps must share one grid shape");
  }
  if (P.channels() != 1 || O.channels() != 2 || E.channels() < 2) {
    throw DimMismatch("bad channel counts for detection maps");
  }
  if (R < 1) throw DegenerateInput("downsample factor must be >= 1");
  std::vector<Detection> dets;
  for (const Peak& p : extract_peaks(P, score_threshold, top_k)) {
    const int x = p.cell.x;
    const int y = p.cell.y;
    PolarEncoding enc;
    enc.center = {(x + O.at(x, y, 0)) * R, (y + O.at(x, y, 1)) * R};
    enc.distances.resize(static_cast<std::size_t>(E.channels()));
    for (int c = 0; c < E.channels(); ++c) {
      enc.distances[static_cast<std::size_t>(c)] = E.at(x, y, c);
    }
    try {
      dets.push_back({enc.center, p.score, decode(enc)});
    } catch (const DegenerateInput& e) {
      if (diagnostics != nullptr) {
        diagnostics->push_back("peak (" + std::to_string(x) + "," +
                               std::to_string(y) +
                               ") skipped: " + e.what());
      }
    } catch (const NumericalGuard& e) {
      if (diagnostics != nullptr) {
        diagnostics->push_back("peak (" + std::to_string(x) + "," +
                               std::to_string(y) +
                               ") skipped: " + e.what());
      }
    }
  }
  return dets;
}

}  // namespace polarobb
