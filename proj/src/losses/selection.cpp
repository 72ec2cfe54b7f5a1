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

#include "bgpatch/losses/selection.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace bgpatch {

int TpSelection::count() const { return static_cast<int>(std::count(selected.begin(), selected.end(), 1)); }

int FpSelection::count() const { return static_cast<int>(std::count(selected.begin(), selected.end(), 1)); }

TpSelection select_true_positives(const SsmOutputs& out, const GroundTruth& gt, const DetectorMetadata& meta) {
  const std::size_t m = out.size();
  const int num_scores = meta.num_scores();
  const bool agnostic = meta.stage_kind == StageKind::kTwoStageRpn;
  TpSelection sel;
  sel.selected.assign(m, 0);
  sel.matched_gt.assign(m, std::nullopt);
  sel.correct_class.assign(m, 0);
  sel.runner_up.assign(m, 0);
  for (std::size_t j = 0; j < m; ++j) {
    const DetectionRecord& det = out.detections[j];
    double best = 0.0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      const double v = iou(det.box, gt.boxes[i]);
      if (v > best) {
        best = v;
        sel.matched_gt[j] = static_cast<int>(i);
      }
    }
    int c = 0;
    if (sel.matched_gt[j]) c = agnostic ? 1 : gt.labels[static_cast<std::size_t>(*sel.matched_gt[j])];
    sel.correct_class[j] = c;

    int runner = -1;
    for (int k = 0; k < num_scores; ++k) {
      if (k == c) continue;
      if (runner < 0 || det.scores[k] > det.scores[runner]) runner = k;
    }
    sel.runner_up[j] = runner;

    if (sel.matched_gt[j] && best > kTpIouThreshold && c >= 1 && c < num_scores &&
        det.scores[c] > kTpScoreThreshold) {
      sel.selected[j] = 1;
    }
  }
  return sel;
}

namespace {

void check_target(std::optional<int> target, const DetectorMetadata& meta) {
  if (target && (*target < 1 || *target > meta.num_object_classes)) {
    throw std::invalid_argument("target class " + std::to_string(*target) + " outside 1.." +
                                std::to_string(meta.num_object_classes));
  }
}

int promoted_class(const DetectionRecord& det, std::optional<int> target, const DetectorMetadata& meta) {
  if (target) return *target;
  int cls = 1;
  for (int k = 2; k < meta.num_scores(); ++k) {
    if (det.scores[k] > det.scores[cls]) cls = k;
  }
  return cls;
}

bool touches_gt(const DetectionRecord& det, const GroundTruth& gt) {
  for (const BoxCWH& g : gt.boxes) {
    if (iou(det.box, g) >= kZeroIou) return true;
  }
  return false;
}

}  // namespace

FpSelection select_false_positives(const SsmOutputs& out, const GroundTruth& gt, const PatchSet& patches,
                                   std::optional<int> target, const DetectorMetadata& meta) {
  check_target(target, meta);
  const std::size_t m = out.size();
  FpSelection sel;
  sel.selected.assign(m, 0);
  sel.fp_class.assign(m, 1);
  for (std::size_t j = 0; j < m; ++j) {
    const DetectionRecord& det = out.detections[j];
    sel.fp_class[j] = promoted_class(det, target, meta);
    if (patches.empty() || touches_gt(det, gt)) continue;
    double best_patch = 0.0;
    for (const Patch& p : patches.patches()) best_patch = std::max(best_patch, iou(det.box, p.box));
    if (best_patch > kFpPatchIouThreshold) sel.selected[j] = 1;
  }
  return sel;
}

FpSelection select_background(const SsmOutputs& out, const GroundTruth& gt, std::optional<int> target,
                              const DetectorMetadata& meta) {
  check_target(target, meta);
  const std::size_t m = out.size();
  FpSelection sel;
  sel.selected.assign(m, 0);
  sel.fp_class.assign(m, 1);
  for (std::size_t j = 0; j < m; ++j) {
    sel.fp_class[j] = promoted_class(out.detections[j], target, meta);
    sel.selected[j] = touches_gt(out.detections[j], gt) ? 0 : 1;
  }
  return sel;
}

}  // namespace bgpatch
