// Copyright 2026 The bgpatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bgpatch/eval/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "bgpatch/eval/groups.hpp"
#include "bgpatch/losses/selection.hpp"

namespace bgpatch {

void EvalConfig::validate() const {
  if (iou_thresholds.empty()) throw std::invalid_argument("EvalConfig: no IoU thresholds");
  for (double t : iou_thresholds) {
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("EvalConfig: IoU thresholds must lie in (0, 1)");
  }
  if (score_sweep_points < 2) throw std::invalid_argument("EvalConfig: score sweep needs two or more points");
  if (scale_group_count < 1 || distance_group_count < 1) {
    throw std::invalid_argument("EvalConfig: group counts must be at least 1");
  }
  if (num_threads < 1) throw std::invalid_argument("EvalConfig: num_threads must be at least 1");
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

Detections detect_all(const Detector& detector, std::span<const ImageBuffer> images, const PostprocessConfig& pp,
                      int threads) {
  Detections out(images.size());
  parallel_for(images.size(), threads, [&](std::size_t i) { out[i] = postprocess(detector.forward(images[i]), pp); });
  return out;
}

std::vector<AttackResult> attack_all(const Detector& detector, std::span<const LabeledImage> images,
                                     const AttackConfig& cfg, int threads) {
  std::vector<std::optional<AttackResult>> slots(images.size());
  parallel_for(images.size(), threads,
               [&](std::size_t i) { slots[i] = run_attack(images[i].image, images[i].gt, detector, cfg); });
  std::vector<AttackResult> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<ImageBuffer> clean_images(std::span<const LabeledImage> images) {
  std::vector<ImageBuffer> out;
  out.reserve(images.size());
  for (const LabeledImage& im : images) out.push_back(im.image);
  return out;
}

std::vector<ImageBuffer> adversarial_images(std::span<const AttackResult> results) {
  std::vector<ImageBuffer> out;
  out.reserve(results.size());
  for (const AttackResult& r : results) out.push_back(r.adversarial_image);
  return out;
}

std::vector<GroundTruth> ground_truths(std::span<const LabeledImage> images) {
  std::vector<GroundTruth> out;
  out.reserve(images.size());
  for (const LabeledImage& im : images) out.push_back(im.gt);
  return out;
}

std::vector<BaselineResult> random_baselines(std::span<const LabeledImage> images,
                                             std::span<const AttackResult> results, std::uint64_t seed) {
  if (images.size() != results.size()) throw std::invalid_argument("random_baselines: size mismatch");
  std::vector<BaselineResult> out;
  out.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    const AttackResult& r = results[i];
    if (r.patches.empty() || !std::isfinite(r.final_psnr)) {
      out.push_back({images[i].image, r.final_psnr, 0.0, true});
      continue;
    }
    out.push_back(random_baseline(images[i].image, r.patches, r.final_psnr, seed + i));
  }
  return out;
}

std::vector<ImageBuffer> replay_all(std::span<const LabeledImage> images, std::span<const AttackResult> results) {
  if (images.size() != results.size()) throw std::invalid_argument("replay_all: size mismatch");
  std::vector<ImageBuffer> out;
  out.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    out.push_back(replay_patches(images[i].image, results[i].patches, results[i]));
  }
  return out;
}

int count_background_fps(const std::vector<ScoredDetection>& dets, const GroundTruth& gt, double min_score,
                         std::optional<int> label) {
  int n = 0;
  for (const ScoredDetection& d : dets) {
    if (d.score < min_score || (label && d.label != *label)) continue;
    const bool touches = std::any_of(gt.boxes.begin(), gt.boxes.end(),
                                     [&](const BoxCWH& b) { return iou(d.box, b) >= kZeroIou; });
    if (!touches) ++n;
  }
  return n;
}

int images_with_background_fp(const Detections& dets, std::span<const GroundTruth> gts, double min_score,
                              int label) {
  if (dets.size() != gts.size()) throw std::invalid_argument("images_with_background_fp: size mismatch");
  int n = 0;
  for (std::size_t i = 0; i < dets.size(); ++i) n += count_background_fps(dets[i], gts[i], min_score, label) > 0;
  return n;
}

LossWeights parse_loss_combo(const std::string& combo) {
  LossWeights w;
  w.use_tpc = w.use_tps = w.use_fpc = false;
  std::stringstream ss(combo);
  std::string part;
  while (std::getline(ss, part, '+')) {
    if (part == "tpc") {
      w.use_tpc = true;
    } else if (part == "tps") {
      w.use_tps = true;
    } else if (part == "fpc") {
      w.use_fpc = true;
    } else {
      throw std::invalid_argument("unknown loss term '" + part + "' (expected tpc, tps, fpc)");
    }
  }
  if (!w.any()) throw std::invalid_argument("empty loss combination");
  return w;
}

std::string loss_combo_name(const LossWeights& w) {
  std::string s;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!s.empty()) s += '+';
    s += name;
  };
  add(w.use_tpc, "tpc");
  add(w.use_tps, "tps");
  add(w.use_fpc, "fpc");
  if (w.target_class) s += "@" + std::to_string(*w.target_class);
  return s;
}

double relative_drop(double clean, double attacked) { return clean > 0.0 ? (clean - attacked) / clean : 0.0; }

std::vector<MapResult> evaluate_maps(const Detections& dets, std::span<const GroundTruth> gts, int num_classes,
                                     const EvalConfig& cfg) {
  std::vector<MapResult> out;
  for (double t : cfg.iou_thresholds) out.push_back(mean_average_precision(dets, gts, t, num_classes));
  return out;
}

std::vector<FpCount> background_fp_sweep(const Detections& dets, std::span<const GroundTruth> gts,
                                         const EvalConfig& cfg) {
  if (dets.size() != gts.size()) throw std::invalid_argument("background_fp_sweep: size mismatch");
  std::vector<FpCount> out;
  for (int k = 0; k < cfg.score_sweep_points; ++k) {
    const double thr = static_cast<double>(k) / (cfg.score_sweep_points - 1);
    long n = 0;
    for (std::size_t i = 0; i < dets.size(); ++i) n += count_background_fps(dets[i], gts[i], thr);
    out.push_back({thr, n});
  }
  return out;
}

std::optional<PsnrStats> psnr_stats(std::span<const double> values) {
  PsnrStats s;
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    if (s.count == 0) s.min = s.max = v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
    sum += v;
    ++s.count;
  }
  if (s.count == 0) return std::nullopt;
  s.mean = sum / static_cast<double>(s.count);
  return s;
}

std::vector<ScaleGroupStat> scale_group_breakdown(std::span<const GroundTruth> gts, const Detections& clean,
                                                  const Detections& attacked, double iou_threshold,
                                                  int num_classes, int count) {
  std::vector<double> areas;
  std::vector<std::pair<std::size_t, std::size_t>> owner;  // (image, gt index)
  for (std::size_t i = 0; i < gts.size(); ++i) {
    for (std::size_t k = 0; k < gts[i].size(); ++k) {
      areas.push_back(gts[i].boxes[k].area());
      owner.emplace_back(i, k);
    }
  }
  const std::vector<int> group = scale_groups(areas, count);
  std::vector<std::vector<int>> group_of(gts.size());
  for (std::size_t i = 0; i < gts.size(); ++i) group_of[i].assign(gts[i].size(), 0);
  for (std::size_t o = 0; o < owner.size(); ++o) group_of[owner[o].first][owner[o].second] = group[o];

  std::vector<ScaleGroupStat> stats(static_cast<std::size_t>(count));
  for (int g = 0; g < count; ++g) stats[g].group = g;
  for (std::size_t o = 0; o < areas.size(); ++o) {
    ScaleGroupStat& s = stats[static_cast<std::size_t>(group[o])];
    s.min_area = s.objects == 0 ? areas[o] : std::min(s.min_area, areas[o]);
    s.max_area = s.objects == 0 ? areas[o] : std::max(s.max_area, areas[o]);
    ++s.objects;
  }
  // Unmatched detections go to the group whose lower area bound they reach.
  auto area_group = [&](double a) {
    int g = 0;
    for (int k = 1; k < count; ++k) {
      if (stats[k].objects > 0 && a >= stats[k].min_area) g = k;
    }
    return g;
  };
  for (int g = 0; g < count; ++g) {
    ScaleGroupStat& s = stats[static_cast<std::size_t>(g)];
    if (s.objects == 0) continue;
    auto ignore = [&](std::size_t im, std::size_t k) { return group_of[im][k] != g; };
    auto keep = [&](const ScoredDetection& d) { return area_group(d.box.area()) == g; };
    s.clean_map = mean_average_precision(clean, gts, iou_threshold, num_classes, ignore, keep).map;
    s.attacked_map = mean_average_precision(attacked, gts, iou_threshold, num_classes, ignore, keep).map;
    s.relative_drop = relative_drop(s.clean_map, s.attacked_map);
  }
  return stats;
}

std::vector<DistanceGroupStat> distance_group_breakdown(std::span<const LabeledImage> images,
                                                        std::span<const AttackResult> results, int count) {
  if (images.size() != results.size()) throw std::invalid_argument("distance_group_breakdown: size mismatch");
  std::vector<std::optional<double>> dist;
  std::vector<double> per_object;
  std::vector<int> has_objects;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const GroundTruth& gt = results[i].ground_truth;
    dist.push_back(mean_object_distance(gt, images[i].image.dims()));
    per_object.push_back(gt.empty() ? 0.0 : static_cast<double>(results[i].patches.size()) / gt.size());
    has_objects.push_back(!gt.empty());
  }
  const std::vector<int> group = distance_groups(dist, count);
  std::vector<DistanceGroupStat> stats(static_cast<std::size_t>(count));
  std::vector<double> dist_sum(stats.size(), 0.0);
  std::vector<int> dist_n(stats.size(), 0);
  std::vector<double> ppo_sum(stats.size(), 0.0);
  std::vector<int> ppo_n(stats.size(), 0);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto g = static_cast<std::size_t>(group[i]);
    ++stats[g].images;
    if (dist[i]) {
      dist_sum[g] += *dist[i];
      ++dist_n[g];
    }
    if (has_objects[i]) {
      ppo_sum[g] += per_object[i];
      ++ppo_n[g];
    }
  }
  for (std::size_t g = 0; g < stats.size(); ++g) {
    stats[g].group = static_cast<int>(g);
    if (dist_n[g] > 0) stats[g].mean_distance = dist_sum[g] / dist_n[g];
    if (ppo_n[g] > 0) stats[g].patches_per_object = ppo_sum[g] / ppo_n[g];
  }
  return stats;
}

std::vector<SweepPoint> distance_sweep(const Detector& detector, std::span<const LabeledImage> images,
                                       const AttackConfig& cfg, std::span<const double> distances,
                                       const EvalConfig& eval_cfg) {
  for (double d : distances) {
    if (!(d >= 0.0 && d <= 1.0)) throw std::invalid_argument("distance_sweep: distances must lie in [0, 1]");
  }
  const std::vector<GroundTruth> gts = ground_truths(images);
  std::vector<SweepPoint> points;
  std::vector<std::vector<AttackResult>> runs;
  std::vector<char> common(images.size(), 1);
  for (double d : distances) {
    AttackConfig c = cfg;
    c.loss_weights.use_fpc = false;
    c.loss_weights.target_class.reset();
    if (!c.loss_weights.needs_true_positives()) c.loss_weights.use_tpc = c.loss_weights.use_tps = true;
    c.geometry.ring_distance_factor = d;
    std::vector<AttackResult> res = attack_all(detector, images, c, eval_cfg.num_threads);
    SweepPoint p;
    p.distance = d;
    for (const AttackResult& r : res) p.attacked_images += !r.patches.empty();
    p.feasible = p.attacked_images > 0;
    if (p.feasible) {
      for (std::size_t i = 0; i < res.size(); ++i) common[i] = common[i] && !res[i].patches.empty();
    }
    points.push_back(p);
    runs.push_back(std::move(res));
  }

  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (common[i]) support.push_back(i);
  }
  std::vector<GroundTruth> support_gt;
  for (std::size_t i : support) support_gt.push_back(gts[i]);
  const int num_classes = detector.metadata().num_object_classes;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!points[k].feasible || support.empty()) continue;
    std::vector<ImageBuffer> adv;
    for (std::size_t i : support) adv.push_back(runs[k][i].adversarial_image);
    const Detections dets = detect_all(detector, adv, eval_cfg.postprocess, eval_cfg.num_threads);
    points[k].map = mean_average_precision(dets, support_gt, eval_cfg.iou_thresholds.front(), num_classes).map;
  }
  return points;
}

EvalReport attack_report(std::span<const LabeledImage> images, const Detections& clean, const Detections& attacked,
                         std::span<const AttackResult> results, int num_classes, const EvalConfig& cfg) {
  const std::vector<GroundTruth> gts = ground_truths(images);
  EvalReport rep;
  rep.metadata["ap_interpolation"] = "all-point";
  rep.metadata["images"] = std::to_string(images.size());
  rep.metadata["psnr_peak"] = "255";
  rep.clean = evaluate_maps(clean, gts, num_classes, cfg);
  rep.attacked = evaluate_maps(attacked, gts, num_classes, cfg);
  rep.clean_fps = background_fp_sweep(clean, gts, cfg);
  rep.attacked_fps = background_fp_sweep(attacked, gts, cfg);
  std::vector<double> psnrs;
  for (const AttackResult& r : results) psnrs.push_back(r.final_psnr);
  rep.psnr = psnr_stats(psnrs);
  return rep;
}

}  // namespace bgpatch
