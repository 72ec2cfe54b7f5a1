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

#include "bgpatch/losses/losses.hpp"

#include <algorithm>
#include <cmath>

namespace bgpatch {

namespace {

double squared_offset_error(const DetectionRecord& det, const BoxCWH& target, Offsets* diff) {
  const Offsets truth = encode_offsets(det.anchor, target);
  const Offsets d{det.pred_offsets.dx - truth.dx, det.pred_offsets.dy - truth.dy, det.pred_offsets.dw - truth.dw,
                  det.pred_offsets.dh - truth.dh};
  if (diff != nullptr) *diff = d;
  return d.dx * d.dx + d.dy * d.dy + d.dw * d.dw + d.dh * d.dh;
}

double tps_exponent(const SsmOutputs& out, const TpSelection& sel, const GroundTruth& gt) {
  double s = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (!sel.selected[j]) continue;
    s += squared_offset_error(out.detections[j], gt.boxes[static_cast<std::size_t>(*sel.matched_gt[j])], nullptr);
  }
  return s;
}

}  // namespace

double tpc_loss(const SsmOutputs& out, const TpSelection& sel) {
  double l = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (sel.selected[j]) l -= std::log(std::max(out.detections[j].scores[sel.runner_up[j]], kLogClamp));
  }
  return l;
}

double tps_loss(const SsmOutputs& out, const TpSelection& sel, const GroundTruth& gt) {
  return std::exp(-tps_exponent(out, sel, gt));
}

double fpc_loss(const SsmOutputs& out, const FpSelection& sel) {
  double l = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (sel.selected[j]) l -= std::log(std::max(out.detections[j].scores[sel.fp_class[j]], kLogClamp));
  }
  return l;
}

LossBreakdown combine_losses(const SsmOutputs& out, const TpSelection& tp, const FpSelection& fp,
                             const GroundTruth& gt, const LossWeights& weights) {
  LossBreakdown b;
  b.tpc = tpc_loss(out, tp);
  b.tps = tps_loss(out, tp, gt);
  b.fpc = fpc_loss(out, fp);
  b.active_tp_count = tp.count();
  b.active_fp_count = fp.count();
  if (weights.use_tpc) b.total += weights.tpc_weight * b.tpc;
  if (weights.use_tps) b.total += weights.tps_weight * b.tps;
  if (weights.use_fpc) b.total += weights.fpc_weight * b.fpc;
  return b;
}

LossBreakdown total_loss(const SsmOutputs& out, const GroundTruth& gt, const PatchSet& patches,
                         const LossWeights& weights, const DetectorMetadata& meta) {
  weights.validate();
  const TpSelection tp = select_true_positives(out, gt, meta);
  const FpSelection fp = select_false_positives(out, gt, patches, weights.target_class, meta);
  return combine_losses(out, tp, fp, gt, weights);
}

bool has_active_term(const TpSelection& tp, const FpSelection& fp, const LossWeights& weights) {
  return (weights.needs_true_positives() && tp.count() > 0) || (weights.use_fpc && fp.count() > 0);
}

std::optional<OutputGradient> loss_output_gradient(const SsmOutputs& out, const TpSelection& tp,
                                                   const FpSelection& fp, const GroundTruth& gt,
                                                   const LossWeights& weights) {
  if (!has_active_term(tp, fp, weights)) return std::nullopt;
  const int num_scores = out.detections.empty() ? 0 : static_cast<int>(out.detections.front().scores.size());
  OutputGradient g = OutputGradient::zeros(out.size(), num_scores);

  const double tps_value = weights.use_tps ? tps_loss(out, tp, gt) : 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const DetectionRecord& det = out.detections[j];
    if (tp.selected[j]) {
      if (weights.use_tpc) {
        const double s = det.scores[tp.runner_up[j]];
        if (s > kLogClamp) g.d_scores[j][tp.runner_up[j]] -= weights.tpc_weight / s;
      }
      if (weights.use_tps) {
        Offsets d;
        squared_offset_error(det, gt.boxes[static_cast<std::size_t>(*tp.matched_gt[j])], &d);
        const double k = -2.0 * weights.tps_weight * tps_value;
        g.d_offsets[j] = Offsets{k * d.dx, k * d.dy, k * d.dw, k * d.dh};
      }
    }
    if (weights.use_fpc && fp.selected[j]) {
      const double s = det.scores[fp.fp_class[j]];
      if (s > kLogClamp) g.d_scores[j][fp.fp_class[j]] -= weights.fpc_weight / s;
    }
  }
  return g;
}

}  // namespace bgpatch
