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

#include "bgpatch/detector/postprocess.hpp"

#include <algorithm>

namespace bgpatch {

std::vector<ScoredDetection> postprocess(const SsmOutputs& out, const PostprocessConfig& cfg) {
  std::vector<ScoredDetection> kept;
  if (out.detections.empty()) return kept;
  const int num_scores = static_cast<int>(out.detections.front().scores.size());
  for (int c = 1; c < num_scores; ++c) {
    std::vector<ScoredDetection> cand;
    for (const DetectionRecord& d : out.detections) {
      if (d.scores[c] >= cfg.score_threshold) cand.push_back({d.box, c, d.scores[c]});
    }
    std::stable_sort(cand.begin(), cand.end(),
                     [](const ScoredDetection& a, const ScoredDetection& b) { return a.score > b.score; });
    std::vector<ScoredDetection> chosen;
    for (const ScoredDetection& d : cand) {
      bool suppressed = false;
      for (const ScoredDetection& k : chosen) {
        if (iou(d.box, k.box) > cfg.nms_iou) {
          suppressed = true;
          break;
        }
      }
      if (!suppressed) chosen.push_back(d);
    }
    kept.insert(kept.end(), chosen.begin(), chosen.end());
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const ScoredDetection& a, const ScoredDetection& b) { return a.score > b.score; });
  if (static_cast<int>(kept.size()) > cfg.max_detections) kept.erase(kept.begin() + cfg.max_detections, kept.end());
  return kept;
}

}  // namespace bgpatch
