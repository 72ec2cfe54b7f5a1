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

#include <functional>
#include <span>
#include <vector>

#include "bgpatch/core/ground_truth.hpp"
#include "bgpatch/detector/postprocess.hpp"

namespace bgpatch {

struct ClassAp {
  int label = 0;
  int num_gt = 0;
  int num_detections = 0;
  double ap = 0.0;
};

struct MapResult {
  double iou_threshold = 0.5;
  std::vector<ClassAp> per_class;
  double map = 0.0;  // mean over classes with at least one ground-truth instance
};

/// All-point interpolated area under a precision/recall curve given the
/// true/false-positive flags of a ranked list and the number of positives.
double average_precision(std::span<const char> is_true_positive, int num_gt);

/// Dataset-level mAP. Detections of one class are ranked by descending score
/// (ties keep image then in-image order); each is matched to the same-class
/// ground truth of highest IoU, which counts once. Detections matched to a
/// box rejected by `ignore_gt` are dropped, as are unmatched detections
/// rejected by `keep_unmatched`; both filters are optional and exist for
/// per-group breakdowns.
MapResult mean_average_precision(std::span<const std::vector<ScoredDetection>> detections,
                                 std::span<const GroundTruth> ground_truth, double iou_threshold, int num_classes,
                                 const std::function<bool(std::size_t image, std::size_t gt_index)>& ignore_gt = {},
                                 const std::function<bool(const ScoredDetection&)>& keep_unmatched = {});

}  // namespace bgpatch
