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
#include <span>
#include <vector>

#include "bgpatch/core/ground_truth.hpp"
#include "bgpatch/core/image.hpp"

namespace bgpatch {

/// Object-scale groups: objects sorted by ascending box area (ties by index)
/// and split into `count` equal-count groups. Returns the 0-based group of
/// every object. Throws std::invalid_argument when count < 1.
std::vector<int> scale_groups(std::span<const double> areas, int count);

/// Mean pairwise box distance normalized by the shorter image side; nullopt
/// for images with fewer than two objects.
std::optional<double> mean_object_distance(const GroundTruth& gt, ImageDims dims);

/// Image distance groups: images with a defined distance are sorted by
/// descending distance (ties by index) and split into `count` equal-count
/// groups; images without one join group 0. Throws when count < 1.
std::vector<int> distance_groups(std::span<const std::optional<double>> distances, int count);

/// Per-group averages of a per-item value, with empty groups reported as
/// nullopt.
std::vector<std::optional<double>> group_means(std::span<const int> groups, std::span<const double> values,
                                               int count);

}  // namespace bgpatch
