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

#include "bgpatch/core/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bgpatch {

namespace {

void check_dims(ImageDims dims) {
  if (dims.height <= 0 || dims.width <= 0) {
    throw std::invalid_argument("image dimensions must be positive");
  }
}

}  // namespace

PlanarArray::PlanarArray(ImageDims dims, double fill) : dims_(dims), data_(dims.size(), fill) {
  check_dims(dims);
}

PlanarArray::PlanarArray(ImageDims dims, std::vector<double> values)
    : dims_(dims), data_(std::move(values)) {
  check_dims(dims);
  if (data_.size() != dims.size()) throw std::invalid_argument("PlanarArray: size mismatch");
}

double PlanarArray::l2_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

PlanarArray& PlanarArray::operator*=(double k) {
  for (double& v : data_) v *= k;
  return *this;
}

ImageBuffer::ImageBuffer(ImageDims dims, double fill) : dims_(dims) {
  check_dims(dims);
  data_.assign(dims.size(), std::clamp(fill, 0.0, kMaxValue));
}

ImageBuffer::ImageBuffer(ImageDims dims, std::vector<double> pixels)
    : dims_(dims), data_(std::move(pixels)) {
  check_dims(dims);
  if (data_.size() != dims.size()) throw std::invalid_argument("ImageBuffer: size mismatch");
  for (double v : data_) {
    if (!(v >= 0.0 && v <= kMaxValue)) {
      throw std::invalid_argument("ImageBuffer: pixel outside [0, 255]");
    }
  }
}

void ImageBuffer::set(int c, int y, int x, double v) {
  data_[index(c, y, x)] = std::clamp(v, 0.0, kMaxValue);
}

PixelMask::PixelMask(int height, int width)
    : height_(height), width_(width), bits_(static_cast<std::size_t>(height) * width, 0) {
  if (height <= 0 || width <= 0) throw std::invalid_argument("mask dimensions must be positive");
}

std::size_t PixelMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

ImageBuffer masked_update(const ImageBuffer& img, const PlanarArray& delta, const PixelMask& mask) {
  const ImageDims d = img.dims();
  if (!(delta.dims() == d) || mask.height() != d.height || mask.width() != d.width) {
    throw std::invalid_argument("masked_update: shape mismatch");
  }
  ImageBuffer out = img;
  for (int y = 0; y < d.height; ++y) {
    for (int x = 0; x < d.width; ++x) {
      if (!mask.at(y, x)) continue;
      for (int c = 0; c < ImageDims::channels; ++c) {
        out.set(c, y, x, img.at(c, y, x) - delta.at(c, y, x));
      }
    }
  }
  return out;
}

PlanarArray apply_mask(const PlanarArray& values, const PixelMask& mask) {
  const ImageDims d = values.dims();
  if (mask.height() != d.height || mask.width() != d.width) {
    throw std::invalid_argument("apply_mask: shape mismatch");
  }
  PlanarArray out(d, 0.0);
  for (int c = 0; c < ImageDims::channels; ++c) {
    for (int y = 0; y < d.height; ++y) {
      for (int x = 0; x < d.width; ++x) {
        if (mask.at(y, x)) out.at(c, y, x) = values.at(c, y, x);
      }
    }
  }
  return out;
}

std::vector<double> channel_l1(const PlanarArray& values) {
  const ImageDims d = values.dims();
  std::vector<double> out(d.plane(), 0.0);
  const auto v = values.values();
  for (int c = 0; c < ImageDims::channels; ++c) {
    const std::size_t off = static_cast<std::size_t>(c) * d.plane();
    for (std::size_t i = 0; i < d.plane(); ++i) out[i] += std::abs(v[off + i]);
  }
  return out;
}

}  // namespace bgpatch
