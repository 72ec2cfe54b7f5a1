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

#include <vector>

#include "bgpatch/core/box.hpp"
#include "bgpatch/detector/detector.hpp"

namespace bgpatch {

/// A final (post-NMS) detection.
struct ScoredDetection {
  BoxCWH box;
  int label = 1;
  double score = 0.0;
};

struct PostprocessConfig {
  double score_threshold = 0.05;
  double nms_iou = 0.45;
  int max_detections = 100;
};

/// Per-class greedy NMS over every (detection, object class) pair scoring at
/// least the threshold; result sorted by descending score.
std::vector<ScoredDetection> postprocess(const SsmOutputs& out, const PostprocessConfig& cfg = {});

}  // namespace bgpatch
