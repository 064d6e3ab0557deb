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

/// File formats: whitespace-separated quad annotations (optionally
/// scored), CSV curves, fit traces, and target-map dumps. Every writer
/// has a parser and round-trips byte-identically: doubles print with 17
/// significant digits except curve CSVs, which use the documented 12.

#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "polarobb/analysis.hpp"
#include "polarobb/common.hpp"
#include "polarobb/descent.hpp"
#include "polarobb/geometry.hpp"
#include "polarobb/targets.hpp"

namespace polarobb {

/// All quads of one image, in input order. scores is either empty (a
/// ground-truth record) or exactly parallel to quads (a detection
/// record); one file never mixes the two.
struct AnnotationRecord {
  std::string image_id;
  std::vector<OrientedBox> quads;
  std::vector<double> scores;
};

/// Run-wide knobs with the documented defaults.
struct RunConfig {
  int n = 8;
  int downsample = 4;
  double iou_thr = 0.5;
  double nms_thr = 0.1;
  double score_thr = 0.1;
  int top_k = 100;
  std::uint64_t seed = 0;
};

/// The three dense target maps plus the supervision mask, as produced
/// by the target-map generators at stride `downsample`.
struct TargetMaps {
  HeatmapGrid heatmap{1, 1, 1};
  OffsetGrid offsets{1, 1, 2};
  EncodingGrid encodings{1, 1, 8};
  CenterMask mask;
  int downsample = 4;
};

namespace detail {

inline std::string format_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline double parse_double(const std::string& token, int line) {
  double v = 0.0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(line, "bad number '" + token + "'");
  }
  return v;
}

inline long long parse_int(const std::string& token, int line) {
  long long v = 0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(line, "bad integer '" + token + "'");
  }
  return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

/// Checks the four corners for a rectangle: parallelogram closure and a
/// right angle, both within the relative tolerance.
inline bool is_rectangle(const std::array<Point2, 4>& p, double rel_tol) {
  const Point2 e1 = p[1] - p[0];
  const Point2 e3 = p[3] - p[0];
  const Point2 closure = (p[0] - p[1]) + (p[2] - p[3]);
  const double l1 = norm(e1);
  const double l3 = norm(e3);
  if (l1 <= kGeomEps || l3 <= kGeomEps) return false;
  return norm(closure) <= rel_tol * std::max(l1, l3) &&
         std::abs(dot(e1, e3)) <= rel_tol * l1 * l3;
}

}  // namespace detail

/// Parses `image_id x1 y1 x2 y2 x3 y3 x4 y4 [score]` lines. Text after
/// `#` is a comment; blank lines are skipped. Lines of one image group
/// into one record, records keep first-appearance order. Quads that are
/// not rectangles within 1e-3 relative tolerance are replaced by their
/// minimum bounding box with a warning. Score presence must be uniform
/// across the file.
inline std::vector<AnnotationRecord> parse_annotations(
    std::istream& in, std::vector<std::string>* warnings = nullptr) {
  std::vector<AnnotationRecord> records;
  std::vector<std::string> order;
  int line_no = 0;
  int score_mode = -1;  // -1 undecided, 0 plain, 1 scored
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::vector<std::string> parts;
    std::string token;
    while (tokens >> token) parts.push_back(token);
    if (parts.empty()) continue;
    if (parts.size() != 9 && parts.size() != 10) {
      throw ParseError(line_no,
                       "expected image_id, 8 coordinates, optional score");
    }
    const bool scored = parts.size() == 10;
    if (score_mode == -1) {
      score_mode = scored ? 1 : 0;
    } else if (score_mode != (scored ? 1 : 0)) {
      throw ParseError(line_no, "score column must be uniform per file");
    }
    std::array<Point2, 4> corners;
    for (int c = 0; c < 4; ++c) {
      corners[static_cast<std::size_t>(c)].x =
          detail::parse_double(parts[static_cast<std::size_t>(1 + 2 * c)],
                               line_no);
      corners[static_cast<std::size_t>(c)].y =
          detail::parse_double(parts[static_cast<std::size_t>(2 + 2 * c)],
                               line_no);
    }
    OrientedBox box{corners};
    if (!detail::is_rectangle(corners, 1e-3)) {
      try {
        box = min_bounding_box(convex_hull(
            {corners.begin(), corners.end()}));
      } catch (const DegenerateInput&) {
        throw ParseError(line_no, "quad is degenerate");
      }
      if (warnings != nullptr) {
        warnings->push_back("line " + std::to_string(line_no) +
                            ": non-rectangular quad replaced by its minimum "
                            "bounding box");
      }
    }
    AnnotationRecord* rec = nullptr;
    for (AnnotationRecord& r : records) {
      if (r.image_id == parts[0]) {
        rec = &r;
        break;
      }
    }
    if (rec == nullptr) {
      records.push_back({parts[0], {}, {}});
      rec = &records.back();
    }
    rec->quads.push_back(box);
    if (scored) {
      rec->scores.push_back(detail::parse_double(parts[9], line_no));
    }
  }
  return records;
}

inline std::vector<AnnotationRecord> load_annotations(
    const std::string& path, std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_annotations(in, warnings);
}

inline void write_annotations(std::ostream& out,
                              const std::vector<AnnotationRecord>& records) {
  for (const AnnotationRecord& rec : records) {
    for (std::size_t q = 0; q < rec.quads.size(); ++q) {
      out << rec.image_id;
      for (const Point2& p : rec.quads[q].corners) {
        out << ' ' << detail::format_g(p.x, 17) << ' '
            << detail::format_g(p.y, 17);
      }
      if (!rec.scores.empty()) {
        out << ' ' << detail::format_g(rec.scores[q], 17);
      }
      out << '\n';
    }
  }
}

inline void save_annotations(const std::string& path,
                             const std::vector<AnnotationRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for write");
  write_annotations(out, records);
}

/// Curve CSV: header `x,y,label`, points with 12 significant digits.
inline void write_curves_csv(std::ostream& out,
                             const std::vector<Curve>& curves) {
  out << "x,y,label\n";
  for (const Curve& curve : curves) {
    for (const CurvePoint& p : curve.points) {
      out << detail::format_g(p.x, 12) << ',' << detail::format_g(p.y, 12)
          << ',' << curve.label << '\n';
    }
  }
}

inline std::vector<Curve> parse_curves_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) return {};
  ++line_no;
  if (line != "x,y,label") throw ParseError(line_no, "expected x,y,label");
  std::vector<Curve> curves;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_csv(line);
    if (fields.size() != 3) throw ParseError(line_no, "expected 3 fields");
    if (curves.empty() || curves.back().label != fields[2]) {
      curves.push_back({fields[2], {}});
    }
    curves.back().points.push_back(
        {detail::parse_double(fields[0], line_no),
         detail::parse_double(fields[1], line_no)});
  }
  return curves;
}

/// Fit-trace CSV: header `step,loss,iou`, one row per record.
inline void write_fit_trace_csv(std::ostream& out, const FitTrace& trace) {
  out << "step,loss,iou\n";
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    out << i << ',' << detail::format_g(trace.records[i].loss, 17) << ','
        << detail::format_g(trace.records[i].iou, 17) << '\n';
  }
}

struct FitTraceRow {
  long long step = 0;
  double loss = 0.0;
  double iou = 0.0;
};

inline std::vector<FitTraceRow> parse_fit_trace_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) return {};
  ++line_no;
  if (line != "step,loss,iou") throw ParseError(line_no, "expected step,loss,iou");
  std::vector<FitTraceRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_csv(line);
    if (fields.size() != 3) throw ParseError(line_no, "expected 3 fields");
    rows.push_back({detail::parse_int(fields[0], line_no),
                    detail::parse_double(fields[1], line_no),
                    detail::parse_double(fields[2], line_no)});
  }
  return rows;
}

/// Target-map CSV: header `map,x,y,channel,value`; the first data row is
/// the `dims` row carrying width, height, encoding depth, and stride.
/// Heatmap, offset, and encoding cells follow densely; mask rows carry
/// the supervised center cells.
inline void write_target_maps_csv(std::ostream& out, const TargetMaps& maps) {
  out << "map,x,y,channel,value\n";
  out << "dims," << maps.heatmap.width() << ',' << maps.heatmap.height()
      << ',' << maps.encodings.channels() << ',' << maps.downsample << '\n';
  const auto dump = [&out](const char* name, const MapGrid& grid) {
    for (int y = 0; y < grid.height(); ++y) {
      for (int x = 0; x < grid.width(); ++x) {
        for (int c = 0; c < grid.channels(); ++c) {
          out << name << ',' << x << ',' << y << ',' << c << ','
              << detail::format_g(grid.at(x, y, c), 17) << '\n';
        }
      }
    }
  };
  dump("heatmap", maps.heatmap);
  dump("offset", maps.offsets);
  dump("encoding", maps.encodings);
  for (const GridCell& cell : maps.mask.cells) {
    out << "mask," << cell.x << ',' << cell.y << ",0,1\n";
  }
}

inline TargetMaps parse_target_maps_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line) || line != "map,x,y,channel,value") {
    throw ParseError(1, "expected map,x,y,channel,value");
  }
  ++line_no;
  if (!std::getline(in, line)) throw ParseError(line_no, "missing dims row");
  ++line_no;
  std::vector<std::string> fields = detail::split_csv(line);
  if (fields.size() != 5 || fields[0] != "dims") {
    throw ParseError(line_no, "expected the dims row first");
  }
  const int width = static_cast<int>(detail::parse_int(fields[1], line_no));
  const int height = static_cast<int>(detail::parse_int(fields[2], line_no));
  const int depth = static_cast<int>(detail::parse_int(fields[3], line_no));
  TargetMaps maps;
  maps.heatmap = HeatmapGrid(width, height, 1);
  maps.offsets = OffsetGrid(width, height, 2);
  maps.encodings = EncodingGrid(width, height, depth);
  maps.mask.width = width;
  maps.mask.height = height;
  maps.downsample = static_cast<int>(detail::parse_int(fields[4], line_no));
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    fields = detail::split_csv(line);
    if (fields.size() != 5) throw ParseError(line_no, "expected 5 fields");
    const int x = static_cast<int>(detail::parse_int(fields[1], line_no));
    const int y = static_cast<int>(detail::parse_int(fields[2], line_no));
    const int c = static_cast<int>(detail::parse_int(fields[3], line_no));
    MapGrid* grid = nullptr;
    if (fields[0] == "heatmap") {
      grid = &maps.heatmap;
    } else if (fields[0] == "offset") {
      grid = &maps.offsets;
    } else if (fields[0] == "encoding") {
      grid = &maps.encodings;
    } else if (fields[0] == "mask") {
      maps.mask.cells.push_back({x, y});
      continue;
    } else {
      throw ParseError(line_no, "unknown map '" + fields[0] + "'");
    }
    if (x < 0 || x >= grid->width() || y < 0 || y >= grid->height() ||
        c < 0 || c >= grid->channels()) {
      throw ParseError(line_no, "cell outside the declared dims");
    }
    grid->at(x, y, c) = detail::parse_double(fields[4], line_no);
  }
  return maps;
}

/// Roundtrip-report CSV: header `box,n,iou`, one row per box and
/// sampling count.
struct RoundtripRow {
  long long box = 0;
  int n = 8;
  double iou = 0.0;
};

inline void write_roundtrip_csv(std::ostream& out,
                                const std::vector<RoundtripRow>& rows) {
  out << "box,n,iou\n";
  for (const RoundtripRow& row : rows) {
    out << row.box << ',' << row.n << ','
        << detail::format_g(row.iou, 17) << '\n';
  }
}

inline std::vector<RoundtripRow> parse_roundtrip_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) return {};
  ++line_no;
  if (line != "box,n,iou") throw ParseError(line_no, "expected box,n,iou");
  std::vector<RoundtripRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_csv(line);
    if (fields.size() != 3) throw ParseError(line_no, "expected 3 fields");
    rows.push_back(
        {detail::parse_int(fields[0], line_no),
         static_cast<int>(detail::parse_int(fields[1], line_no)),
         detail::parse_double(fields[2], line_no)});
  }
  return rows;
}

}  // namespace polarobb
