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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bgpatch/attack/attack.hpp"
#include "bgpatch/detector/postprocess.hpp"
#include "bgpatch/eval/average_precision.hpp"
#include "bgpatch/eval/dataset.hpp"

namespace bgpatch {

/// Detections at or above this score count as reported objects when
/// counting background false positives.
inline constexpr double kReportedScore = 0.5;

struct EvalConfig {
  std::vector<double> iou_thresholds{0.5, 0.7};
  int score_sweep_points = 11;  // false-positive counts at evenly spaced score thresholds in [0, 1]
  int scale_group_count = 4;
  int distance_group_count = 5;
  PostprocessConfig postprocess;
  int num_threads = 1;

  void validate() const;
};

using Detections = std::vector<std::vector<ScoredDetection>>;

/// Calls fn(i) for every i in [0, n) on up to `threads` workers. The first
/// exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

Detections detect_all(const Detector& detector, std::span<const ImageBuffer> images, const PostprocessConfig& pp,
                      int threads);

std::vector<AttackResult> attack_all(const Detector& detector, std::span<const LabeledImage> images,
                                     const AttackConfig& cfg, int threads);

std::vector<ImageBuffer> clean_images(std::span<const LabeledImage> images);
std::vector<ImageBuffer> adversarial_images(std::span<const AttackResult> results);
std::vector<GroundTruth> ground_truths(std::span<const LabeledImage> images);

/// Random-noise counterpart of each attack: same patches, PSNR matched to
/// the attack's final PSNR. Images whose attack placed no patch or left the
/// pixels untouched are copied unchanged.
std::vector<BaselineResult> random_baselines(std::span<const LabeledImage> images,
                                             std::span<const AttackResult> results, std::uint64_t seed);

/// Each attack's patch pixels pasted onto its clean image (cross-detector replay).
std::vector<ImageBuffer> replay_all(std::span<const LabeledImage> images, std::span<const AttackResult> results);

/// Post-NMS detections scoring at least `min_score` that overlap no ground
/// truth box, optionally restricted to one label.
int count_background_fps(const std::vector<ScoredDetection>& dets, const GroundTruth& gt, double min_score,
                         std::optional<int> label = std::nullopt);

/// Images with at least one background false positive of `label` at `min_score`.
int images_with_background_fp(const Detections& dets, std::span<const GroundTruth> gts, double min_score, int label);

/// Parses "tpc", "tps", "fpc" joined by '+', e.g. "tpc+tps+fpc".
/// Throws std::invalid_argument on unknown names or an empty combination.
LossWeights parse_loss_combo(const std::string& combo);
std::string loss_combo_name(const LossWeights& w);

double relative_drop(double clean, double attacked);

struct FpCount {
  double score_threshold = 0.0;
  long count = 0;
};

struct PsnrStats {
  std::size_t count = 0;  // runs with a finite PSNR
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct ScaleGroupStat {
  int group = 0;
  std::size_t objects = 0;
  double min_area = 0.0;
  double max_area = 0.0;
  double clean_map = 0.0;
  double attacked_map = 0.0;
  double relative_drop = 0.0;
};

struct DistanceGroupStat {
  int group = 0;
  std::size_t images = 0;
  std::optional<double> mean_distance;  // over images with two or more objects
  std::optional<double> patches_per_object;
};

struct SweepPoint {
  double distance = 0.0;
  bool feasible = false;
  std::size_t attacked_images = 0;  // images where the ring admitted a patch
  double map = 0.0;                 // over images attacked at every feasible distance
};

/// Everything the harness reports about one experiment. Empty members mean
/// the corresponding analysis was not run.
struct EvalReport {
  std::map<std::string, std::string> metadata;
  std::vector<MapResult> clean;
  std::vector<MapResult> attacked;
  std::vector<FpCount> clean_fps;
  std::vector<FpCount> attacked_fps;
  std::optional<PsnrStats> psnr;
  std::vector<ScaleGroupStat> scale_groups;
  std::vector<DistanceGroupStat> distance_groups;
  std::vector<SweepPoint> distance_sweep;
  std::vector<std::string> notes;
};

std::vector<MapResult> evaluate_maps(const Detections& dets, std::span<const GroundTruth> gts, int num_classes,
                                     const EvalConfig& cfg);

std::vector<FpCount> background_fp_sweep(const Detections& dets, std::span<const GroundTruth> gts,
                                         const EvalConfig& cfg);

std::optional<PsnrStats> psnr_stats(std::span<const double> values);

/// mAP before and after the attack per object-scale group. Ground truth of
/// other groups is ignored; unmatched detections count towards the group
/// whose area range contains them.
std::vector<ScaleGroupStat> scale_group_breakdown(std::span<const GroundTruth> gts, const Detections& clean,
                                                  const Detections& attacked, double iou_threshold,
                                                  int num_classes, int count);

/// Patches per object and mean object distance per image distance group.
std::vector<DistanceGroupStat> distance_group_breakdown(std::span<const LabeledImage> images,
                                                        std::span<const AttackResult> results, int count);

/// Attack mAP as a function of the patch-to-object distance, normalized by
/// the largest object side. Each distance reruns the attack with patches
/// placed on a ring at exactly that distance and the false-positive loss
/// disabled. A distance where no image admits a patch is marked infeasible.
/// The mAP of feasible points is measured on the images attacked at every
/// feasible distance, so points are comparable. Throws std::invalid_argument
/// for distances outside [0, 1].
std::vector<SweepPoint> distance_sweep(const Detector& detector, std::span<const LabeledImage> images,
                                       const AttackConfig& cfg, std::span<const double> distances,
                                       const EvalConfig& eval_cfg);

/// Clean and attacked metrics for one attack configuration.
EvalReport attack_report(std::span<const LabeledImage> images, const Detections& clean, const Detections& attacked,
                         std::span<const AttackResult> results, int num_classes, const EvalConfig& cfg);

}  // namespace bgpatch
