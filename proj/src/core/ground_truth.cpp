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

#include "bgpatch/core/ground_truth.hpp"

#include <stdexcept>
#include <string>

namespace bgpatch {

void GroundTruth::add(const BoxCWH& box, int label) {
  if (label < 1) throw std::invalid_argument("GroundTruth: label must be >= 1");
  boxes.push_back(box);
  labels.push_back(label);
}

void GroundTruth::validate(int num_classes) const {
  if (boxes.size() != labels.size()) throw std::invalid_argument("GroundTruth: boxes/labels length mismatch");
  for (int label : labels) {
    if (label < 1 || label > num_classes) {
      throw std::invalid_argument("GroundTruth: label " + std::to_string(label) + " outside 1.." +
                                  std::to_string(num_classes));
    }
  }
}

}  // namespace bgpatch
