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

#include "bgpatch/geometry/clustering.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "bgpatch/core/box.hpp"

namespace bgpatch {

void GeometryConfig::validate() const {
  if (patches_per_group < 1) throw std::invalid_argument("GeometryConfig: patches_per_group must be >= 1");
  if (!(init_scale > 0) || !(min_dist_factor > 0) || !(expand_stride_factor > 0) ||
      !(cluster_threshold_factor > 0) || !(free_object_factor > 0)) {
    throw std::invalid_argument("GeometryConfig: all factors must be positive");
  }
  if (aspect_ratios.empty()) throw std::invalid_argument("GeometryConfig: no aspect ratios");
  for (double r : aspect_ratios) {
    if (!(r > 0)) throw std::invalid_argument("GeometryConfig: aspect ratios must be positive");
  }
  if (ring_distance_factor && !(*ring_distance_factor >= 0.0 && *ring_distance_factor <= 1.0)) {
    throw std::invalid_argument("GeometryConfig: ring distance must lie in [0, 1]");
  }
}

std::vector<ObjectGroup> cluster_objects(const GroundTruth& gt, ImageDims dims, const GeometryConfig& cfg) {
  cfg.validate();
  const std::size_t n = gt.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  const double threshold = cfg.cluster_threshold(dims);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (box_min_distance(gt.boxes[i], gt.boxes[j]) <= threshold) {
        const std::size_t a = find(i);
        const std::size_t b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::map<std::size_t, std::vector<int>> by_root;
  for (std::size_t i = 0; i < n; ++i) by_root[find(i)].push_back(static_cast<int>(i));

  std::vector<ObjectGroup> groups;
  for (auto& [root, members] : by_root) {
    BoxCorners c = gt.boxes[static_cast<std::size_t>(members.front())].corners();
    double largest = 0.0;
    for (int m : members) {
      const BoxCWH& b = gt.boxes[static_cast<std::size_t>(m)];
      c.x0 = std::min(c.x0, b.x0());
      c.y0 = std::min(c.y0, b.y0());
      c.x1 = std::max(c.x1, b.x1());
      c.y1 = std::max(c.y1, b.y1());
      largest = std::max({largest, b.w(), b.h()});
    }
    groups.push_back(ObjectGroup{members, BoxCWH::from_corners(c), largest});
  }
  std::sort(groups.begin(), groups.end(),
            [](const ObjectGroup& a, const ObjectGroup& b) { return a.members.front() < b.members.front(); });
  return groups;
}

}  // namespace bgpatch
