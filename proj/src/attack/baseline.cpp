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

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "bgpatch/attack/attack.hpp"
#include "bgpatch/eval/psnr.hpp"

namespace bgpatch {

namespace {

ImageBuffer add_noise(const ImageBuffer& img, const PlanarArray& noise, const PixelMask& mask, double sigma) {
  ImageBuffer out = img;
  const ImageDims d = img.dims();
  for (int c = 0; c < ImageDims::channels; ++c) {
    for (int y = 0; y < d.height; ++y) {
      for (int x = 0; x < d.width; ++x) {
        if (mask.at(y, x)) out.set(c, y, x, img.at(c, y, x) + sigma * noise.at(c, y, x));
      }
    }
  }
  return out;
}

}  // namespace

BaselineResult random_baseline(const ImageBuffer& img, const PatchSet& patches, double target_psnr,
                               std::uint64_t seed) {
  if (patches.empty()) throw std::invalid_argument("random_baseline: empty patch set");
  const ImageDims d = img.dims();
  const PixelMask mask = rasterize(patches, d);

  // One fixed draw scaled by sigma keeps PSNR monotone in sigma.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PlanarArray noise(d);
  for (double& v : noise.values()) v = normal(rng);

  BaselineResult best{img, std::numeric_limits<double>::infinity(), 0.0, false};
  if (std::isinf(target_psnr) && target_psnr > 0) {
    best.reached_target = true;
    return best;
  }
  auto evaluate = [&](double sigma) {
    BaselineResult r{add_noise(img, noise, mask, sigma), 0.0, sigma, false};
    r.achieved_psnr = *psnr(img, r.image, mask);
    r.reached_target = std::abs(r.achieved_psnr - target_psnr) <= kBaselinePsnrTolerance;
    return r;
  };
  auto closer = [&](const BaselineResult& r) {
    return std::abs(r.achieved_psnr - target_psnr) < std::abs(best.achieved_psnr - target_psnr);
  };

  double lo = 0.0;
  double hi = std::sqrt(mse_for_psnr(target_psnr));
  // Clipping shrinks the realized error, so widen until the target is bracketed.
  for (int i = 0; i < 64; ++i) {
    BaselineResult r = evaluate(hi);
    if (closer(r)) best = r;
    if (r.reached_target) return r;
    if (r.achieved_psnr < target_psnr) break;
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    BaselineResult r = evaluate(mid);
    if (closer(r)) best = r;
    if (r.reached_target) return r;
    (r.achieved_psnr > target_psnr ? lo : hi) = mid;
  }
  return best;
}

ImageBuffer replay_patches(const ImageBuffer& img, const PatchSet& patches, const AttackResult& source) {
  const ImageDims d = img.dims();
  if (!(source.adversarial_image.dims() == d)) throw std::invalid_argument("replay_patches: dimension mismatch");
  const PixelMask mask = rasterize(patches, d);
  ImageBuffer out = img;
  for (int c = 0; c < ImageDims::channels; ++c) {
    for (int y = 0; y < d.height; ++y) {
      for (int x = 0; x < d.width; ++x) {
        if (mask.at(y, x)) out.set(c, y, x, source.adversarial_image.at(c, y, x));
      }
    }
  }
  return out;
}

}  // namespace bgpatch
