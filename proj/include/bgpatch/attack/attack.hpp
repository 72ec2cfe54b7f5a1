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
#include <optional>
#include <utility>
#include <vector>

#include "bgpatch/core/ground_truth.hpp"
#include "bgpatch/core/image.hpp"
#include "bgpatch/core/patch.hpp"
#include "bgpatch/detector/detector.hpp"
#include "bgpatch/geometry/clustering.hpp"
#include "bgpatch/geometry/patch_placement.hpp"
#include "bgpatch/losses/losses.hpp"

namespace bgpatch {

inline constexpr double kPsnrFloorTwoStage = 35.0;
inline constexpr double kPsnrFloorSingleStage = 30.0;
/// Masked gradients with a smaller L2 norm are treated as zero.
inline constexpr double kZeroGradientNorm = 1e-12;

struct AttackConfig {
  double lambda = 30.0;
  int max_iter = 250;
  double psnr_floor = kPsnrFloorSingleStage;
  GeometryConfig geometry;
  LossWeights loss_weights;
  bool pseudo_gt = false;
  double pseudo_gt_score_floor = 0.5;
  std::uint64_t seed = 0;

  /// Defaults with the PSNR floor matching the detector's stage kind.
  static AttackConfig for_detector(const DetectorMetadata& meta);
  void validate() const;
};

enum class Termination { kMaxIter, kNoTruePositives, kPsnrFloor };

const char* to_string(Termination t);

/// Detection index paired with the class a loss term pushes it towards.
using ClassTarget = std::pair<int, int>;

struct IterationRecord {
  int iteration = 0;
  LossBreakdown loss;
  /// PSNR over the patch mask after this iteration's accepted state.
  double psnr = 0.0;
  PatchSet patches;
  std::vector<double> patch_areas;
  std::vector<ExpansionDecision> expansions;
  std::vector<ClassTarget> runner_up;  // TPC target per selected true positive
  std::vector<ClassTarget> fp_class;   // FPC target per selected false positive
  double update_norm = 0.0;            // before clipping; 0 when skipped
  bool skipped = false;
  bool rolled_back = false;
};

struct AttackResult {
  ImageBuffer adversarial_image;
  PatchSet patches;
  int iterations_run = 0;
  double final_psnr = 0.0;
  Termination termination = Termination::kMaxIter;
  std::vector<IterationRecord> trace;
  /// Ground truth the attack optimized against (rebuilt in pseudo-GT mode).
  GroundTruth ground_truth;
  /// Patches that could not be placed at initialization.
  int placement_shortfall = 0;
};

/// Builds ground truth from clean detections whose top object score reaches
/// `score_floor`.
GroundTruth pseudo_ground_truth(const Detector& detector, const ImageBuffer& img, double score_floor);

/// Iterative background patch attack. Throws std::invalid_argument on an
/// invalid config, an image/detector size mismatch, labels outside the
/// detector's classes, or an empty ground truth while a true-positive loss is
/// enabled.
AttackResult run_attack(const ImageBuffer& img, const GroundTruth& gt, const Detector& detector,
                        const AttackConfig& cfg);

/// Normal noise inside the patch mask, with its scale bisected so the PSNR
/// over the mask lands within `kBaselinePsnrTolerance` of the target.
struct BaselineResult {
  ImageBuffer image;
  double achieved_psnr = 0.0;
  double sigma = 0.0;
  bool reached_target = false;
};

inline constexpr double kBaselinePsnrTolerance = 0.1;

/// Throws std::invalid_argument on an empty patch set.
BaselineResult random_baseline(const ImageBuffer& img, const PatchSet& patches, double target_psnr,
                               std::uint64_t seed);

/// Copies the source adversarial pixels under `patches` into `img`.
/// Throws std::invalid_argument on a dimension mismatch.
ImageBuffer replay_patches(const ImageBuffer& img, const PatchSet& patches, const AttackResult& source);

}  // namespace bgpatch
