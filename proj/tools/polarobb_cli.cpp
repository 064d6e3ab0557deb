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

/// Command-line front end: encode/decode roundtrip reports, detection
/// evaluation, curve emission, rotated NMS, target-map generation, and
/// the descent harness. Exit codes: 0 success, 1 usage error, 2 data
/// error (including a roundtrip minimum below the configured floor).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polarobb/polarobb.hpp"

namespace {

using namespace polarobb;

std::string fmt(double v) { return detail::format_g(v, 12); }

/// Writes `text` to `path`, or to stdout when the path is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for write");
  out << text;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::istringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    values.push_back(detail::parse_double(token, 0));
  }
  return values;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::istringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    values.push_back(static_cast<int>(detail::parse_int(token, 0)));
  }
  return values;
}

/// Detections of one record; a missing score column means score 1.
std::vector<Detection> to_detections(const AnnotationRecord& rec) {
  std::vector<Detection> dets;
  for (std::size_t q = 0; q < rec.quads.size(); ++q) {
    Detection d;
    d.box = rec.quads[q];
    d.center = box_center(d.box);
    d.score = rec.scores.empty() ? 1.0 : rec.scores[q];
    dets.push_back(d);
  }
  return dets;
}

int run_roundtrip(const std::string& input, const std::string& out_path,
                  int n, bool sweep, double iou_floor) {
  std::vector<std::string> warnings;
  const std::vector<AnnotationRecord> records =
      load_annotations(input, &warnings);
  print_warnings(warnings);
  const std::vector<int> n_values =
      sweep ? std::vector<int>{4, 6, 8, 10, 12, 16} : std::vector<int>{n};
  std::vector<RoundtripRow> rows;
  long long index = 0;
  for (const AnnotationRecord& rec : records) {
    for (const OrientedBox& box : rec.quads) {
      for (int nv : n_values) {
        rows.push_back({index, nv, rotated_iou(decode(encode(box, nv)), box)});
      }
      ++index;
    }
  }
  std::ostringstream csv;
  write_roundtrip_csv(csv, rows);
  emit(out_path, csv.str());
  bool floor_ok = true;
  for (int nv : n_values) {
    double min_iou = 1.0;
    double sum = 0.0;
    long long count = 0;
    for (const RoundtripRow& row : rows) {
      if (row.n != nv) continue;
      min_iou = std::min(min_iou, row.iou);
      sum += row.iou;
      ++count;
    }
    if (count == 0) continue;
    std::cerr << "n=" << nv << " boxes=" << count
              << " mean_iou=" << fmt(sum / static_cast<double>(count))
              << " min_iou=" << fmt(min_iou) << "\n";
    if (min_iou < iou_floor) floor_ok = false;
  }
  if (!floor_ok) {
    std::cerr << "error: roundtrip minimum fell below the floor "
              << fmt(iou_floor) << "\n";
    return 2;
  }
  return 0;
}

int run_eval(const std::string& gt_path, const std::string& det_path,
             const std::string& out_path, const RunConfig& cfg) {
  std::vector<std::string> warnings;
  const std::vector<AnnotationRecord> gt = load_annotations(gt_path, &warnings);
  const std::vector<AnnotationRecord> det =
      load_annotations(det_path, &warnings);
  print_warnings(warnings);
  std::size_t total_gt = 0;
  for (const AnnotationRecord& rec : gt) total_gt += rec.quads.size();
  if (total_gt == 0) {
    std::cerr << "error: GTEmpty: '" << gt_path
              << "' contains no ground-truth boxes\n";
    return 2;
  }
  std::set<std::string> ids;
  std::map<std::string, const AnnotationRecord*> gt_by_id;
  std::map<std::string, const AnnotationRecord*> det_by_id;
  for (const AnnotationRecord& rec : gt) {
    gt_by_id[rec.image_id] = &rec;
    ids.insert(rec.image_id);
  }
  for (const AnnotationRecord& rec : det) {
    det_by_id[rec.image_id] = &rec;
    ids.insert(rec.image_id);
  }
  std::vector<MatchResult> matches;
  for (const std::string& id : ids) {
    std::vector<Detection> dets;
    std::vector<OrientedBox> boxes;
    if (det_by_id.count(id) != 0) dets = to_detections(*det_by_id[id]);
    if (gt_by_id.count(id) != 0) boxes = gt_by_id[id]->quads;
    matches.push_back(match_detections(dets, boxes, cfg.iou_thr));
  }
  const PRCurve curve = pooled_pr_curve(matches, total_gt);
  Curve pr;
  pr.label = "precision_recall";
  for (const PRPoint& p : curve.points) {
    pr.points.push_back({p.recall, p.precision});
  }
  std::ostringstream csv;
  write_curves_csv(csv, {pr});
  emit(out_path, csv.str());
  std::cout << "ap=" << fmt(average_precision(curve)) << "\n";
  std::cout << "best_f1=" << fmt(best_f1(curve)) << "\n";
  return 0;
}

int run_analyze(const std::string& mode, const std::string& out_path,
                double start, double stop, double step, bool have_range,
                double box_w, double box_h, double box_angle,
                const std::string& n_list, const std::string& aspect_list,
                double rotation, bool normalize, int n) {
  SweepConfig cfg;
  cfg.box = make_box({0.0, 0.0}, box_w, box_h, box_angle);
  cfg.normalize = normalize;
  cfg.rotation = rotation;
  if (!n_list.empty()) cfg.n_values = parse_int_list(n_list);
  if (!aspect_list.empty()) cfg.aspects = parse_double_list(aspect_list);
  std::vector<Curve> curves;
  if (mode == "s-theta") {
    cfg.mode = SweepMode::kSTheta;
    cfg.range = have_range ? SweepRange{start, stop, step}
                           : SweepRange{0.0, kPi, kPi / 360.0};
    curves = emit_curves(cfg);
  } else if (mode == "d-phi") {
    cfg.mode = SweepMode::kDPhi;
    cfg.range = have_range ? SweepRange{start, stop, step}
                           : SweepRange{0.0, kPi, kPi / 360.0};
    curves = emit_curves(cfg);
  } else if (mode == "iou-sensitivity") {
    cfg.mode = SweepMode::kIouSensitivity;
    cfg.range = have_range ? SweepRange{start, stop, step}
                           : SweepRange{0.0, kPi / 2.0, kPi / 360.0};
    curves = emit_curves(cfg);
  } else if (mode == "boundary-compare") {
    const SweepRange range = have_range ? SweepRange{start, stop, step}
                                        : SweepRange{-0.1, 0.1, 1e-3};
    curves = boundary_sweep_compare(cfg.box, range, n);
  } else {
    std::cerr << "error: unknown analyze mode '" << mode << "'\n";
    return 1;
  }
  std::ostringstream csv;
  write_curves_csv(csv, curves);
  emit(out_path, csv.str());
  return 0;
}

int run_nms(const std::string& input, const std::string& out_path,
            const RunConfig& cfg) {
  std::vector<std::string> warnings;
  const std::vector<AnnotationRecord> records =
      load_annotations(input, &warnings);
  print_warnings(warnings);
  std::vector<AnnotationRecord> kept_records;
  long long before = 0;
  long long after = 0;
  for (const AnnotationRecord& rec : records) {
    const std::vector<Detection> dets = to_detections(rec);
    before += static_cast<long long>(dets.size());
    const std::vector<Detection> kept = rotated_nms(dets, cfg.nms_thr);
    after += static_cast<long long>(kept.size());
    AnnotationRecord out;
    out.image_id = rec.image_id;
    for (const Detection& d : kept) {
      out.quads.push_back(d.box);
      out.scores.push_back(d.score);
    }
    kept_records.push_back(out);
  }
  std::ostringstream text;
  write_annotations(text, kept_records);
  emit(out_path, text.str());
  std::cerr << "kept " << after << " of " << before << " detections\n";
  return 0;
}

int run_targets(const std::string& input, const std::string& out_path,
                int width, int height, const RunConfig& cfg) {
  std::vector<std::string> warnings;
  const std::vector<AnnotationRecord> records =
      load_annotations(input, &warnings);
  if (records.size() > 1) {
    std::cerr << "error: target generation expects a single-image file, got "
              << records.size() << " images\n";
    return 2;
  }
  const std::vector<OrientedBox> boxes =
      records.empty() ? std::vector<OrientedBox>{} : records[0].quads;
  const GridDims dims{(width + cfg.downsample - 1) / cfg.downsample,
                      (height + cfg.downsample - 1) / cfg.downsample};
  TargetMaps maps;
  maps.downsample = cfg.downsample;
  maps.heatmap = gaussian_heatmap(boxes, dims, cfg.downsample);
  auto [offsets, mask] = offset_targets(boxes, dims, cfg.downsample, &warnings);
  auto [encodings, mask2] =
      encoding_targets(boxes, cfg.n, dims, cfg.downsample, &warnings);
  (void)mask2;
  maps.offsets = offsets;
  maps.encodings = encodings;
  maps.mask = mask;
  print_warnings(warnings);
  std::ostringstream csv;
  write_target_maps_csv(csv, maps);
  emit(out_path, csv.str());
  std::cerr << "grid " << dims.width << "x" << dims.height << ", "
            << maps.mask.cells.size() << " supervised centers\n";
  return 0;
}

int run_fit(const std::string& input, const std::string& out_path,
            long long index, const FitConfig& fit_cfg, int n) {
  std::vector<std::string> warnings;
  const std::vector<AnnotationRecord> records =
      load_annotations(input, &warnings);
  print_warnings(warnings);
  std::vector<OrientedBox> boxes;
  for (const AnnotationRecord& rec : records) {
    boxes.insert(boxes.end(), rec.quads.begin(), rec.quads.end());
  }
  if (index < 0 || index >= static_cast<long long>(boxes.size())) {
    std::cerr << "error: box index " << index << " outside 0.."
              << (boxes.empty() ? 0 : boxes.size() - 1) << "\n";
    return 2;
  }
  const FitTrace trace =
      fit_polar(boxes[static_cast<std::size_t>(index)], fit_cfg, n);
  std::ostringstream csv;
  write_fit_trace_csv(csv, trace);
  emit(out_path, csv.str());
  std::cout << "final_loss=" << fmt(trace.records.back().loss) << "\n";
  std::cout << "final_iou=" << fmt(trace.records.back().iou) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polar-encoding toolkit for oriented bounding boxes"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string out_path;
  app.add_option("--n", cfg.n, "Number of sampled distances")
      ->check(CLI::Range(2, 360));
  app.add_option("--downsample", cfg.downsample, "Map stride in pixels")
      ->check(CLI::Range(1, 256));
  app.add_option("--iou-thr", cfg.iou_thr, "Matching IOU threshold")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  app.add_option("--nms-thr", cfg.nms_thr, "Suppression IOU threshold")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  app.add_option("--score-thr", cfg.score_thr, "Detection score threshold");
  app.add_option("--top-k", cfg.top_k, "Peak cap per image")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--out", out_path, "Output file (default stdout)");

  // roundtrip
  auto* roundtrip = app.add_subcommand(
      "roundtrip", "Encode-decode every box and report the IOU");
  std::string rt_input;
  bool rt_sweep = false;
  double rt_floor = 0.0;
  roundtrip->add_option("input", rt_input, "Annotation file")->required();
  roundtrip->add_flag("--sweep", rt_sweep,
                      "Sweep sampling counts 4,6,8,10,12,16");
  roundtrip->add_option("--iou-floor", rt_floor,
                        "Exit with an error if the minimum IOU drops below");

  // eval
  auto* eval = app.add_subcommand("eval", "Score detections against truth");
  std::string ev_gt;
  std::string ev_det;
  eval->add_option("--gt", ev_gt, "Ground-truth annotation file")->required();
  eval->add_option("--det", ev_det, "Detection file")->required();

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Emit analysis curves");
  std::string an_mode;
  double an_start = 0.0;
  double an_stop = 0.0;
  double an_step = 0.0;
  double an_w = 2.0;
  double an_h = 1.0;
  double an_angle = 0.0;
  double an_rotation = 0.5;
  std::string an_nlist;
  std::string an_aspects;
  bool an_norm = false;
  analyze
      ->add_option("--mode", an_mode,
                   "s-theta | d-phi | iou-sensitivity | boundary-compare")
      ->required()
      ->check(CLI::IsMember(
          {"s-theta", "d-phi", "iou-sensitivity", "boundary-compare"}));
  auto* opt_start = analyze->add_option("--start", an_start, "Sweep start");
  analyze->add_option("--stop", an_stop, "Sweep stop")->needs(opt_start);
  analyze->add_option("--step", an_step, "Sweep step")->needs(opt_start);
  analyze->add_option("--box-w", an_w, "Prototype box width");
  analyze->add_option("--box-h", an_h, "Prototype box height");
  analyze->add_option("--box-angle", an_angle, "Prototype box rotation");
  analyze->add_option("--n-values", an_nlist,
                      "Comma-separated sampling counts for s-theta");
  analyze->add_option("--aspects", an_aspects,
                      "Comma-separated aspect ratios for iou-sensitivity");
  analyze->add_option("--rotation", an_rotation,
                      "Rotation of the second d-phi curve");
  analyze->add_flag("--normalize", an_norm,
                    "Scale s-theta curves to a unit peak");

  // nms
  auto* nms = app.add_subcommand("nms", "Suppress duplicate detections");
  std::string nms_input;
  nms->add_option("input", nms_input, "Detection file")->required();

  // targets
  auto* targets = app.add_subcommand(
      "targets", "Generate heatmap/offset/encoding target maps");
  std::string tg_input;
  int tg_width = 0;
  int tg_height = 0;
  targets->add_option("input", tg_input, "Single-image annotation file")
      ->required();
  targets->add_option("--width", tg_width, "Image width in pixels")
      ->required()
      ->check(CLI::PositiveNumber);
  targets->add_option("--height", tg_height, "Image height in pixels")
      ->required()
      ->check(CLI::PositiveNumber);

  // fit
  auto* fit = app.add_subcommand(
      "fit", "Fit a perturbed encoding to a ground-truth box");
  std::string fit_input;
  long long fit_index = 0;
  FitConfig fit_cfg;
  fit->add_option("input", fit_input, "Annotation file")->required();
  fit->add_option("--index", fit_index, "Box index across the file");
  fit->add_option("--steps", fit_cfg.steps, "Descent steps")
      ->check(CLI::PositiveNumber);
  fit->add_option("--lr", fit_cfg.learning_rate, "Learning rate")
      ->check(CLI::PositiveNumber);
  fit->add_option("--perturbation", fit_cfg.init_perturbation,
                  "Relative initial perturbation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (roundtrip->parsed()) {
      return run_roundtrip(rt_input, out_path, cfg.n, rt_sweep, rt_floor);
    }
    if (eval->parsed()) return run_eval(ev_gt, ev_det, out_path, cfg);
    if (analyze->parsed()) {
      const bool have_range = opt_start->count() > 0;
      return run_analyze(an_mode, out_path, an_start, an_stop, an_step,
                         have_range, an_w, an_h, an_angle, an_nlist,
                         an_aspects, an_rotation, an_norm, cfg.n);
    }
    if (nms->parsed()) return run_nms(nms_input, out_path, cfg);
    if (targets->parsed()) {
      return run_targets(tg_input, out_path, tg_width, tg_height, cfg);
    }
    if (fit->parsed()) {
      fit_cfg.seed = cfg.seed;
      return run_fit(fit_input, out_path, fit_index, fit_cfg, cfg.n);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
