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
#include "bgpatch/core/image.hpp"

namespace bgpatch {

struct Patch {
  BoxCWH box;
  int group_id = 0;
};

/// Integer pixel range [begin, end) covered by a real interval. A pixel is
/// covered when its center lies in (lo, hi], i.e. both edges snap to the
/// grid with round-half-up.
struct PixelSpan {
  int begin = 0;
  int end = 0;
  int length() const { return end > begin ? end - begin : 0; }
};

PixelSpan snap_interval(double lo, double hi);

/// Pixel rectangle covered by a box under the snapping rule, clipped to the image.
struct PixelRect {
  PixelSpan cols;
  PixelSpan rows;
  long long area() const { return static_cast<long long>(cols.length()) * rows.length(); }
};

PixelRect snap_box(const BoxCWH& box, ImageDims dims);

/// Background patches. Patches never overlap each other (touching allowed);
/// add/replace throw std::invalid_argument otherwise.
class PatchSet {
 public:
  PatchSet() = default;

  void add(const Patch& p);
  void replace(std::size_t index, const BoxCWH& box);

  const std::vector<Patch>& patches() const { return patches_; }
  std::size_t size() const { return patches_.size(); }
  bool empty() const { return patches_.empty(); }
  const Patch& operator[](std::size_t i) const { return patches_[i]; }

  /// True when `box` overlaps any patch except the one at `skip`.
  bool overlaps_any(const BoxCWH& box, std::size_t skip = static_cast<std::size_t>(-1)) const;

 private:
  std::vector<Patch> patches_;
};

/// Union mask of the patch rectangles. Throws std::out_of_range when a patch
/// leaves the image.
PixelMask rasterize(const PatchSet& patches, ImageDims dims);

}  // namespace bgpatch
