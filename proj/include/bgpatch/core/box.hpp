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

#include <stdexcept>

namespace bgpatch {

/// Axis-aligned corner form (x0, y0) top-left, (x1, y1) bottom-right, in pixels.
struct BoxCorners {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
};

/// Axis-aligned box in center/size form. Width and height are strictly
/// positive; construction of a degenerate box throws std::invalid_argument.
class BoxCWH {
 public:
  BoxCWH(double cx, double cy, double w, double h);

  static BoxCWH from_corners(const BoxCorners& c);
  static BoxCWH from_corners(double x0, double y0, double x1, double y1);
  /// COCO-style (x, y, w, h) with (x, y) the top-left corner.
  static BoxCWH from_top_left(double x, double y, double w, double h);

  double cx() const { return cx_; }
  double cy() const { return cy_; }
  double w() const { return w_; }
  double h() const { return h_; }
  double area() const { return w_ * h_; }

  double x0() const { return cx_ - 0.5 * w_; }
  double y0() const { return cy_ - 0.5 * h_; }
  double x1() const { return cx_ + 0.5 * w_; }
  double y1() const { return cy_ + 0.5 * h_; }
  BoxCorners corners() const { return {x0(), y0(), x1(), y1()}; }

  bool operator==(const BoxCWH&) const = default;

 private:
  double cx_;
  double cy_;
  double w_;
  double h_;
};

double intersection_area(const BoxCWH& a, const BoxCWH& b);

/// Intersection over union, in [0, 1] and symmetric.
double iou(const BoxCWH& a, const BoxCWH& b);

/// True when the two rectangles share a region of positive area. Touching
/// edges do not count as overlap.
bool overlaps(const BoxCWH& a, const BoxCWH& b);

/// Minimum Euclidean distance between the point sets of two rectangles;
/// zero when they touch or overlap.
double box_min_distance(const BoxCWH& a, const BoxCWH& b);

/// True when `box` lies inside [0, width] x [0, height].
bool inside_image(const BoxCWH& box, int height, int width);

}  // namespace bgpatch
