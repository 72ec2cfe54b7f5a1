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

#include "bgpatch/eval/psnr.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bgpatch {

std::optional<double> psnr(const ImageBuffer& a, const ImageBuffer& b, const PixelMask& mask) {
  const ImageDims d = a.dims();
  if (!(b.dims() == d) || mask.height() != d.height || mask.width() != d.width) {
    throw std::invalid_argument("psnr: shape mismatch");
  }
  double sse = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < d.height; ++y) {
    for (int x = 0; x < d.width; ++x) {
      if (!mask.at(y, x)) continue;
      for (int c = 0; c < ImageDims::channels; ++c) {
        const double e = a.at(c, y, x) - b.at(c, y, x);
        sse += e * e;
      }
      n += ImageDims::channels;
    }
  }
  if (n == 0) return std::nullopt;
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(kPsnrPeak * kPsnrPeak / (sse / static_cast<double>(n)));
}

double mse_for_psnr(double psnr_db) { return kPsnrPeak * kPsnrPeak / std::pow(10.0, psnr_db / 10.0); }

}  // namespace bgpatch
