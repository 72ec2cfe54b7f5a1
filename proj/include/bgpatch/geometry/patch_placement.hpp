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

#include <vector>

#include "bgpatch/core/ground_truth.hpp"
#include "bgpatch/core/patch.hpp"
#include "bgpatch/geometry/clustering.hpp"

namespace bgpatch {

/// Summed-area table of per-pixel gradient intensity (L1 over channels).
class IntensityTable {
 public:
  explicit IntensityTable(const PlanarArray& gradient);

  /// Intensity summed over the pixels a box covers under the snapping rule.
  double box_sum(const BoxCWH& box) const;
  double rect_sum(const PixelRect& r) const;
  ImageDims dims() const { return dims_; }

 private:
  ImageDims dims_;
  std::vector<double> table_;  // (height + 1) x (width + 1)
};

/// Width and height of a patch with area (scale * object side)^2 per object
/// area, reshaped to `aspect` (width / height) at constant area.
struct PatchSize {
  double w = 0.0;
  double h = 0.0;
};
PatchSize candidate_patch_size(const BoxCWH& object, double init_scale, double aspect);

/// Minimum patch-to-object distance required for a group.
double group_min_distance(const ObjectGroup& group, const GeometryConfig& cfg);

struct PatchInit {
  PatchSet patches;
  int shortfall = 0;  // requested minus placed
};

/// Greedy sliding-window initialization: per group, repeatedly place the
/// feasible candidate with the largest gradient intensity until
/// `patches_per_group` are placed or no feasible position remains. Ties go to
/// the first candidate in row-major order.
PatchInit init_patches(const std::vector<ObjectGroup>& groups, const GroundTruth& gt, const PlanarArray& gradient,
                       ImageDims dims, const GeometryConfig& cfg);

/// Placement for images without objects: square patches sized from a virtual
/// object of side `free_object_factor` x shorter image side, group id 0.
PatchInit init_free_patches(const GroundTruth& gt, const PlanarArray& gradient, ImageDims dims,
                            const GeometryConfig& cfg);

enum class Direction { kNone, kLeft, kRight, kTop, kDown };

const char* to_string(Direction d);

struct ExpansionDecision {
  int patch_index = 0;
  Direction direction = Direction::kNone;
  double gain = 0.0;
};

struct PatchExpansion {
  PatchSet patches;
  std::vector<ExpansionDecision> decisions;
};

/// Grows every patch by one stride towards the side whose added strip carries
/// the most gradient intensity (ties resolve left, right, top, down). Moves
/// that leave the image, touch a ground-truth box or another patch, or come
/// closer to the patch's group than its minimum distance are blocked.
PatchExpansion expand_patches(const PatchSet& patches, const PlanarArray& gradient, const GroundTruth& gt,
                              const std::vector<ObjectGroup>& groups, ImageDims dims, const GeometryConfig& cfg);

}  // namespace bgpatch
