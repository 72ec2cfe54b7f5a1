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

#include <cstddef>
#include <vector>

#include "bgpatch/core/box.hpp"

namespace bgpatch {

/// Annotated objects of one image. Labels are object classes in 1..C; the
/// background index 0 is never a label.
struct GroundTruth {
  std::vector<BoxCWH> boxes;
  std::vector<int> labels;

  std::size_t size() const { return boxes.size(); }
  bool empty() const { return boxes.empty(); }
  void add(const BoxCWH& box, int label);
  /// Throws std::invalid_argument on length mismatch or a label outside 1..num_classes.
  void validate(int num_classes) const;
};

}  // namespace bgpatch
