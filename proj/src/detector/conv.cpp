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

#include "bgpatch/detector/conv.hpp"

#include <cmath>

namespace bgpatch::nn {

Conv2d::Conv2d(ConvShape shape)
    : weight(Matrix::Zero(shape.out_channels, shape.patch_size())),
      bias(Vector::Zero(shape.out_channels)),
      shape_(shape) {}

void Conv2d::im2col(const FeatureMap& in, Matrix& cols, int& out_h, int& out_w) const {
  const int k = shape_.kernel;
  const int s = shape_.stride;
  const int d = shape_.dilation;
  const int p = shape_.padding();
  out_h = shape_.out_extent(in.height);
  out_w = shape_.out_extent(in.width);
  cols.resize(shape_.patch_size(), static_cast<Eigen::Index>(out_h) * out_w);
  for (int c = 0; c < shape_.in_channels; ++c) {
    const double* src = in.values.row(c).data();
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        double* dst = cols.row((c * k + ky) * k + kx).data();
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * s - p + ky * d;
          double* row = dst + static_cast<std::ptrdiff_t>(oy) * out_w;
          if (iy < 0 || iy >= in.height) {
            for (int ox = 0; ox < out_w; ++ox) row[ox] = 0.0;
            continue;
          }
          const double* srow = src + static_cast<std::ptrdiff_t>(iy) * in.width;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * s - p + kx * d;
            row[ox] = (ix >= 0 && ix < in.width) ? srow[ix] : 0.0;
          }
        }
      }
    }
  }
}

void Conv2d::col2im(const Matrix& dcols, int in_h, int in_w, Matrix& din) const {
  const int k = shape_.kernel;
  const int s = shape_.stride;
  const int d = shape_.dilation;
  const int p = shape_.padding();
  const int out_h = shape_.out_extent(in_h);
  const int out_w = shape_.out_extent(in_w);
  din.setZero(shape_.in_channels, static_cast<Eigen::Index>(in_h) * in_w);
  for (int c = 0; c < shape_.in_channels; ++c) {
    double* dst = din.row(c).data();
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const double* src = dcols.row((c * k + ky) * k + kx).data();
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * s - p + ky * d;
          if (iy < 0 || iy >= in_h) continue;
          double* drow = dst + static_cast<std::ptrdiff_t>(iy) * in_w;
          const double* srow = src + static_cast<std::ptrdiff_t>(oy) * out_w;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * s - p + kx * d;
            if (ix >= 0 && ix < in_w) drow[ix] += srow[ox];
          }
        }
      }
    }
  }
}

Matrix Conv2d::apply(const Matrix& cols) const {
  Matrix out(weight.rows(), cols.cols());
  out.noalias() = weight * cols;
  out.colwise() += bias;
  return out;
}

void silu_inplace(Matrix& z) {
  z = z.unaryExpr([](double v) { return v * sigmoid(v); });
}

void silu_backward(const Matrix& pre, Matrix& grad) {
  grad = grad.binaryExpr(pre, [](double g, double z) {
    const double sg = sigmoid(z);
    return g * sg * (1.0 + z * (1.0 - sg));
  });
}

}  // namespace bgpatch::nn
