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

#include <optional>
#include <vector>

#include "bgpatch/core/ground_truth.hpp"
#include "bgpatch/core/patch.hpp"
#include "bgpatch/detector/detector.hpp"

namespace bgpatch {

inline constexpr double kTpIouThreshold = 0.5;
inline constexpr double kTpScoreThreshold = 0.1;
inline constexpr double kFpPatchIouThreshold = 0.1;
/// IoU below this counts as "no overlap with any ground-truth box".
inline constexpr double kZeroIou = 1e-9;

/// True-positive selection z_j with the runner-up class used by the class loss.
struct TpSelection {
  std::vector<char> selected;               // z_j
  std::vector<std::optional<int>> matched_gt;
  std::vector<int> correct_class;           // c_j; 0 when unmatched
  std::vector<int> runner_up;               // argmax over classes != c_j

  int count() const;
};

/// False-positive selection r_j with the class to promote.
struct FpSelection {
  std::vector<char> selected;  // r_j
  std::vector<int> fp_class;   // c'_j in 1..C

  int count() const;
};

/// Matches every detection to the ground-truth box of maximal IoU (ties to the
/// lowest index) and selects it when that IoU exceeds 0.5 and its score on the
/// matched class exceeds 0.1. For a class-agnostic RPN the matched class is 1.
TpSelection select_true_positives(const SsmOutputs& out, const GroundTruth& gt, const DetectorMetadata& meta);

/// Selects detections that have zero IoU with every ground-truth box and IoU
/// above 0.1 with at least one patch. The promoted class is `target` when set,
/// otherwise the highest-scoring object class. Throws std::invalid_argument
/// when `target` lies outside 1..C.
FpSelection select_false_positives(const SsmOutputs& out, const GroundTruth& gt, const PatchSet& patches,
                                   std::optional<int> target, const DetectorMetadata& meta);

/// Every detection with zero IoU against all ground-truth boxes, with the same
/// promoted class as select_false_positives. Seeds patch placement for
/// FPC-only attacks, before any patch exists.
FpSelection select_background(const SsmOutputs& out, const GroundTruth& gt, std::optional<int> target,
                              const DetectorMetadata& meta);

}  // namespace bgpatch
