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

#include "bgpatch/core/patch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bgpatch {

PixelSpan snap_interval(double lo, double hi) {
  return {static_cast<int>(std::floor(lo + 0.5)), static_cast<int>(std::floor(hi + 0.5))};
}

PixelRect snap_box(const BoxCWH& box, ImageDims dims) {
  PixelSpan cols = snap_interval(box.x0(), box.x1());
  PixelSpan rows = snap_interval(box.y0(), box.y1());
  cols.begin = std::clamp(cols.begin, 0, dims.width);
  cols.end = std::clamp(cols.end, 0, dims.width);
  rows.begin = std::clamp(rows.begin, 0, dims.height);
  rows.end = std::clamp(rows.end, 0, dims.height);
  return {cols, rows};
}

void PatchSet::add(const Patch& p) {
  if (overlaps_any(p.box)) throw std::invalid_argument("PatchSet: patch overlaps an existing patch");
  patches_.push_back(p);
}

void PatchSet::replace(std::size_t index, const BoxCWH& box) {
  if (index >= patches_.size()) throw std::out_of_range("PatchSet: index out of range");
  if (overlaps_any(box, index)) throw std::invalid_argument("PatchSet: patch overlaps an existing patch");
  patches_[index].box = box;
}

bool PatchSet::overlaps_any(const BoxCWH& box, std::size_t skip) const {
  for (std::size_t i = 0; i < patches_.size(); ++i) {
    if (i != skip && overlaps(box, patches_[i].box)) return true;
  }
  return false;
}

PixelMask rasterize(const PatchSet& patches, ImageDims dims) {
  PixelMask mask(dims.height, dims.width);
  for (const Patch& p : patches.patches()) {
    if (!inside_image(p.box, dims.height, dims.width)) {
      throw std::out_of_range("rasterize: patch outside image");
    }
    const PixelRect r = snap_box(p.box, dims);
    for (int y = r.rows.begin; y < r.rows.end; ++y) {
      for (int x = r.cols.begin; x < r.cols.end; ++x) mask.set(y, x, true);
    }
  }
  return mask;
}

}  // namespace bgpatch
