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

#include "bgpatch/losses/input_gradient.hpp"

namespace bgpatch {

InputGradientResult input_gradient(const Detector& detector, const ImageBuffer& img, const GroundTruth& gt,
                                   const PatchSet& patches, const LossWeights& weights) {
  weights.validate();
  const DetectorMetadata& meta = detector.metadata();
  InputGradientResult r;
  GradientQuery q = detector.gradient(img, [&](const SsmOutputs& out) {
    r.tp = select_true_positives(out, gt, meta);
    r.fp = select_false_positives(out, gt, patches, weights.target_class, meta);
    r.loss = combine_losses(out, r.tp, r.fp, gt, weights);
    return loss_output_gradient(out, r.tp, r.fp, gt, weights);
  });
  r.outputs = std::move(q.outputs);
  r.gradient = std::move(q.input_gradient);
  return r;
}

InputGradientResult input_gradient_fixed(const Detector& detector, const ImageBuffer& img, const GroundTruth& gt,
                                         const TpSelection& tp, const FpSelection& fp, const LossWeights& weights) {
  weights.validate();
  InputGradientResult r;
  r.tp = tp;
  r.fp = fp;
  GradientQuery q = detector.gradient(img, [&](const SsmOutputs& out) {
    r.loss = combine_losses(out, tp, fp, gt, weights);
    return loss_output_gradient(out, tp, fp, gt, weights);
  });
  r.outputs = std::move(q.outputs);
  r.gradient = std::move(q.input_gradient);
  return r;
}

}  // namespace bgpatch
