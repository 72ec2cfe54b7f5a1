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

#include <optional>

#include "bgpatch/core/image.hpp"

namespace bgpatch {

inline constexpr double kPsnrPeak = 255.0;

/// 10 log10(255^2 / MSE) with the MSE averaged over masked pixels and all
/// channels. Identical images give +infinity; an empty mask gives nullopt.
/// Throws std::invalid_argument on shape mismatch.
std::optional<double> psnr(const ImageBuffer& a, const ImageBuffer& b, const PixelMask& mask);

/// Mean squared error that yields the given PSNR.
double mse_for_psnr(double psnr_db);

}  // namespace bgpatch
