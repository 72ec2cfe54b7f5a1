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

#include <cmath>

#include <Eigen/Core>

namespace bgpatch::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct ConvShape {
  int in_channels = 1;
  int out_channels = 1;
  int kernel = 3;
  int stride = 1;
  int dilation = 1;
  /// Zero padding on each side; defaults to "same" for odd kernels.
  int padding() const { return dilation * (kernel - 1) / 2; }
  int out_extent(int in) const { return (in + 2 * padding() - dilation * (kernel - 1) - 1) / stride + 1; }
  int patch_size() const { return in_channels * kernel * kernel; }
};

/// Feature map: channels x (height * width), row-major.
struct FeatureMap {
  Matrix values;
  int height = 0;
  int width = 0;
};

/// 2-D convolution lowered to a GEMM over an im2col buffer.
class Conv2d {
 public:
  Conv2d() = default;
  explicit Conv2d(ConvShape shape);

  const ConvShape& shape() const { return shape_; }

  void im2col(const FeatureMap& in, Matrix& cols, int& out_h, int& out_w) const;
  /// Scatter-adds column gradients back onto an input-shaped buffer.
  void col2im(const Matrix& dcols, int in_h, int in_w, Matrix& din) const;

  /// Pre-activation output for already-lowered input.
  Matrix apply(const Matrix& cols) const;

  Matrix weight;  // out_channels x patch_size
  Vector bias;    // out_channels

 private:
  ConvShape shape_;
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// SiLU, z * sigmoid(z); smooth so finite-difference checks stay clean.
void silu_inplace(Matrix& z);
/// dst = grad * silu'(pre)
void silu_backward(const Matrix& pre, Matrix& grad);

}  // namespace bgpatch::nn
