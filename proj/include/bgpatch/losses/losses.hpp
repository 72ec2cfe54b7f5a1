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

#include "bgpatch/losses/selection.hpp"

namespace bgpatch {

/// Floor applied to probabilities inside log().
inline constexpr double kLogClamp = 1e-12;

struct LossBreakdown {
  double tpc = 0.0;
  double tps = 1.0;
  double fpc = 0.0;
  double total = 0.0;
  int active_tp_count = 0;
  int active_fp_count = 0;
};

/// Cross entropy towards the runner-up class over selected true positives.
double tpc_loss(const SsmOutputs& out, const TpSelection& sel);

/// exp(-sum_j z_j * |pred_offsets_j - true_offsets_j|^2); 1 when nothing is selected.
double tps_loss(const SsmOutputs& out, const TpSelection& sel, const GroundTruth& gt);

/// Cross entropy towards the promoted object class over selected background detections.
double fpc_loss(const SsmOutputs& out, const FpSelection& sel);

/// Loss terms for fixed selections; `total` sums the enabled, weighted terms.
LossBreakdown combine_losses(const SsmOutputs& out, const TpSelection& tp, const FpSelection& fp,
                             const GroundTruth& gt, const LossWeights& weights);

/// Recomputes both selections from `out` and evaluates every term.
LossBreakdown total_loss(const SsmOutputs& out, const GroundTruth& gt, const PatchSet& patches,
                         const LossWeights& weights, const DetectorMetadata& meta);

/// True when at least one enabled term has a non-empty selection, i.e. the
/// combined loss has a gradient that can be non-zero.
bool has_active_term(const TpSelection& tp, const FpSelection& fp, const LossWeights& weights);

/// d(total)/d(outputs) for fixed selections, or nullopt when no term is active.
std::optional<OutputGradient> loss_output_gradient(const SsmOutputs& out, const TpSelection& tp,
                                                   const FpSelection& fp, const GroundTruth& gt,
                                                   const LossWeights& weights);

}  // namespace bgpatch
