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

#include "bgpatch/core/image.hpp"
#include "bgpatch/losses/losses.hpp"

namespace bgpatch {

struct InputGradientResult {
  SsmOutputs outputs;
  TpSelection tp;
  FpSelection fp;
  LossBreakdown loss;
  /// Full-image dL/d pixel; empty signals "no active loss".
  std::optional<PlanarArray> gradient;

  bool no_active_loss() const { return !gradient.has_value(); }
};

/// Forward pass, selections from that pass, combined loss, and its gradient
/// with respect to every input pixel. Masking is left to the caller.
InputGradientResult input_gradient(const Detector& detector, const ImageBuffer& img, const GroundTruth& gt,
                                   const PatchSet& patches, const LossWeights& weights);

/// Same, but with selections held fixed (the loss is then smooth in the pixels).
InputGradientResult input_gradient_fixed(const Detector& detector, const ImageBuffer& img, const GroundTruth& gt,
                                         const TpSelection& tp, const FpSelection& fp, const LossWeights& weights);

}  // namespace bgpatch
