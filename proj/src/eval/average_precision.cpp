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

#include "bgpatch/eval/average_precision.hpp"

#include <algorithm>
#include <stdexcept>

namespace bgpatch {

double average_precision(std::span<const char> is_tp, int num_gt) {
  if (num_gt <= 0) return 0.0;
  const std::size_t n = is_tp.size();
  std::vector<double> precision(n);
  std::vector<double> recall(n);
  int tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (is_tp[k]) ++tp;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
    recall[k] = static_cast<double>(tp) / static_cast<double>(num_gt);
  }
  for (std::size_t k = n; k-- > 1;) precision[k - 1] = std::max(precision[k - 1], precision[k]);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (recall[k] > prev_recall) {
      ap += (recall[k] - prev_recall) * precision[k];
      prev_recall = recall[k];
    }
  }
  return ap;
}

MapResult mean_average_precision(std::span<const std::vector<ScoredDetection>> detections,
                                 std::span<const GroundTruth> ground_truth, double iou_threshold, int num_classes,
                                 const std::function<bool(std::size_t, std::size_t)>& ignore_gt,
                                 const std::function<bool(const ScoredDetection&)>& keep_unmatched) {
  if (detections.size() != ground_truth.size()) {
    throw std::invalid_argument("mean_average_precision: detections and ground truth differ in image count");
  }
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw std::invalid_argument("mean_average_precision: IoU threshold must be in (0, 1)");
  }
  MapResult result;
  result.iou_threshold = iou_threshold;
  double sum = 0.0;
  int counted = 0;
  for (int c = 1; c <= num_classes; ++c) {
    struct Ranked {
      double score;
      std::size_t image;
      std::size_t index;
    };
    std::vector<Ranked> ranked;
    int num_gt = 0;
    for (std::size_t im = 0; im < ground_truth.size(); ++im) {
      for (std::size_t g = 0; g < ground_truth[im].size(); ++g) {
        if (ground_truth[im].labels[g] == c && !(ignore_gt && ignore_gt(im, g))) ++num_gt;
      }
      for (std::size_t d = 0; d < detections[im].size(); ++d) {
        if (detections[im][d].label == c) ranked.push_back({detections[im][d].score, im, d});
      }
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) { return a.score > b.score; });

    std::vector<std::vector<char>> taken(ground_truth.size());
    for (std::size_t im = 0; im < ground_truth.size(); ++im) taken[im].assign(ground_truth[im].size(), 0);
    std::vector<char> flags;
    for (const Ranked& r : ranked) {
      const ScoredDetection& det = detections[r.image][r.index];
      const GroundTruth& gt = ground_truth[r.image];
      double best = 0.0;
      std::ptrdiff_t best_g = -1;
      for (std::size_t g = 0; g < gt.size(); ++g) {
        if (gt.labels[g] != c) continue;
        const double v = iou(det.box, gt.boxes[g]);
        if (v > best) {
          best = v;
          best_g = static_cast<std::ptrdiff_t>(g);
        }
      }
      if (best_g >= 0 && best >= iou_threshold) {
        const auto g = static_cast<std::size_t>(best_g);
        if (ignore_gt && ignore_gt(r.image, g)) continue;
        if (!taken[r.image][g]) {
          taken[r.image][g] = 1;
          flags.push_back(1);
          continue;
        }
      }
      if (keep_unmatched && !keep_unmatched(det)) continue;
      flags.push_back(0);
    }
    ClassAp cap{c, num_gt, static_cast<int>(flags.size()), average_precision(flags, num_gt)};
    result.per_class.push_back(cap);
    if (num_gt > 0) {
      sum += cap.ap;
      ++counted;
    }
  }
  result.map = counted > 0 ? sum / counted : 0.0;
  return result;
}

}  // namespace bgpatch
