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

#include "bgpatch/detector/detector.hpp"

#include <stdexcept>

namespace bgpatch {

const char* to_string(StageKind kind) {
  switch (kind) {
    case StageKind::kTwoStageRpn:
      return "two-stage-rpn";
    case StageKind::kSingleStage:
      return "single-stage";
  }
  return "unknown";
}

void DetectorMetadata::validate() const {
  if (num_object_classes < 1) throw std::invalid_argument("detector needs at least one object class");
  if (stage_kind == StageKind::kTwoStageRpn && num_object_classes != 1) {
    throw std::invalid_argument("a two-stage RPN is class agnostic (C = 1)");
  }
}

void LossWeights::validate() const {
  if (!any()) throw std::invalid_argument("LossWeights: at least one loss term must be enabled");
}

OutputGradient OutputGradient::zeros(std::size_t m, int num_scores) {
  OutputGradient g;
  g.d_scores.assign(m, std::vector<double>(static_cast<std::size_t>(num_scores), 0.0));
  g.d_offsets.assign(m, Offsets{});
  return g;
}

}  // namespace bgpatch
