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

#include "bgpatch/core/box.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bgpatch {

BoxCWH::BoxCWH(double cx, double cy, double w, double h) : cx_(cx), cy_(cy), w_(w), h_(h) {
  if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(w) || !std::isfinite(h)) {
    throw std::invalid_argument("BoxCWH: non-finite coordinate");
  }
  if (!(w > 0.0) || !(h > 0.0)) {
    throw std::invalid_argument("BoxCWH: width and height must be positive, got w=" +
                                std::to_string(w) + " h=" + std::to_string(h));
  }
}

BoxCWH BoxCWH::from_corners(const BoxCorners& c) { return from_corners(c.x0, c.y0, c.x1, c.y1); }

BoxCWH BoxCWH::from_corners(double x0, double y0, double x1, double y1) {
  return BoxCWH(0.5 * (x0 + x1), 0.5 * (y0 + y1), x1 - x0, y1 - y0);
}

BoxCWH BoxCWH::from_top_left(double x, double y, double w, double h) {
  return BoxCWH(x + 0.5 * w, y + 0.5 * h, w, h);
}

double intersection_area(const BoxCWH& a, const BoxCWH& b) {
  const double iw = std::min(a.x1(), b.x1()) - std::max(a.x0(), b.x0());
  const double ih = std::min(a.y1(), b.y1()) - std::max(a.y0(), b.y0());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

double iou(const BoxCWH& a, const BoxCWH& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

bool overlaps(const BoxCWH& a, const BoxCWH& b) { return intersection_area(a, b) > 0.0; }

double box_min_distance(const BoxCWH& a, const BoxCWH& b) {
  const double gx = std::max({0.0, a.x0() - b.x1(), b.x0() - a.x1()});
  const double gy = std::max({0.0, a.y0() - b.y1(), b.y0() - a.y1()});
  return std::hypot(gx, gy);
}

bool inside_image(const BoxCWH& box, int height, int width) {
  return box.x0() >= 0.0 && box.y0() >= 0.0 && box.x1() <= static_cast<double>(width) &&
         box.y1() <= static_cast<double>(height);
}

}  // namespace bgpatch
