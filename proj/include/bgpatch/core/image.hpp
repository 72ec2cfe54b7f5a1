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
#include <cstdint>
#include <span>
#include <vector>

namespace bgpatch {

struct ImageDims {
  int height = 0;
  int width = 0;
  static constexpr int channels = 3;

  std::size_t plane() const { return static_cast<std::size_t>(height) * width; }
  std::size_t size() const { return plane() * channels; }
  int shorter_side() const { return height < width ? height : width; }
  bool operator==(const ImageDims&) const = default;
};

/// Unconstrained real array with image shape, stored channel-planar
/// (index = (c * height + y) * width + x). Used for gradients and deltas.
class PlanarArray {
 public:
  PlanarArray() = default;
  explicit PlanarArray(ImageDims dims, double fill = 0.0);
  PlanarArray(ImageDims dims, std::vector<double> values);

  ImageDims dims() const { return dims_; }
  double& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  double at(int c, int y, int x) const { return data_[index(c, y, x)]; }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double l2_norm() const;
  PlanarArray& operator*=(double k);

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * dims_.height + y) * dims_.width + x;
  }

  ImageDims dims_;
  std::vector<double> data_;
};

/// H x W x 3 image with real-valued pixels. Every value stays in [0, 255];
/// writers clamp and constructors validate.
class ImageBuffer {
 public:
  static constexpr double kMaxValue = 255.0;

  ImageBuffer() = default;
  explicit ImageBuffer(ImageDims dims, double fill = 0.0);
  /// Throws std::invalid_argument when any value falls outside [0, 255].
  ImageBuffer(ImageDims dims, std::vector<double> pixels);

  ImageDims dims() const { return dims_; }
  int height() const { return dims_.height; }
  int width() const { return dims_.width; }

  double at(int c, int y, int x) const { return data_[index(c, y, x)]; }
  /// Stores clamp(v, 0, 255).
  void set(int c, int y, int x, double v);
  std::span<const double> values() const { return data_; }

  bool operator==(const ImageBuffer&) const = default;

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * dims_.height + y) * dims_.width + x;
  }

  ImageDims dims_;
  std::vector<double> data_;
};

/// Binary height x width mask.
class PixelMask {
 public:
  PixelMask() = default;
  PixelMask(int height, int width);

  int height() const { return height_; }
  int width() const { return width_; }
  bool at(int y, int x) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int y, int x, bool v) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }

  bool operator==(const PixelMask&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Returns img with every masked pixel replaced by clip(old - delta, 0, 255).
/// Pixels outside the mask are copied unchanged. Throws on shape mismatch.
ImageBuffer masked_update(const ImageBuffer& img, const PlanarArray& delta, const PixelMask& mask);

/// Elementwise product of an array with a mask broadcast over channels.
PlanarArray apply_mask(const PlanarArray& values, const PixelMask& mask);

/// Per-pixel L1 norm over channels, row-major height x width.
std::vector<double> channel_l1(const PlanarArray& values);

}  // namespace bgpatch
