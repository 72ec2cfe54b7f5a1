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
#include <vector>

#include "bgpatch/core/ground_truth.hpp"
#include "bgpatch/core/image.hpp"

namespace bgpatch {

struct GeometryConfig {
  int patches_per_group = 3;
  double init_scale = 0.2;  // linear scale of a patch relative to its object
  std::vector<double> aspect_ratios{1.0, 0.67, 0.75, 1.5, 1.33};  // width / height
  double min_dist_factor = 0.2;           // x largest object side in the group
  double expand_stride_factor = 0.02;     // x shorter image side
  double cluster_threshold_factor = 0.2;  // x shorter image side
  /// When set, patches are initialized in a band [d, d + stride] around the
  /// group instead of at >= the minimum distance, with d = factor x largest
  /// object side. Used by the distance sweep.
  std::optional<double> ring_distance_factor;
  /// Virtual object side (x shorter image side) sizing patches when the image
  /// has no objects.
  double free_object_factor = 0.5;

  void validate() const;
  double stride(ImageDims dims) const { return expand_stride_factor * dims.shorter_side(); }
  double cluster_threshold(ImageDims dims) const { return cluster_threshold_factor * dims.shorter_side(); }
};

struct ObjectGroup {
  std::vector<int> members;  // ascending ground-truth indices
  BoxCWH bounding_region;
  double largest_side = 0.0;
};

/// Single-linkage clustering: objects whose rectangles are within the cluster
/// threshold of each other (transitively) share a group. Groups are ordered by
/// their smallest member index. Empty input yields no groups.
std::vector<ObjectGroup> cluster_objects(const GroundTruth& gt, ImageDims dims, const GeometryConfig& cfg);

}  // namespace bgpatch
