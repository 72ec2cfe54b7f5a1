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

#include <filesystem>

#include "bgpatch/core/image.hpp"

namespace bgpatch {

/// Lossless image files. The format follows the extension:
///   .png  8-bit RGB (values rounded on write)
///   .ppm  binary 8-bit RGB (P6)
///   .pfm  32-bit float RGB, keeps sub-integer perturbations
/// Throws std::runtime_error on I/O or format errors and for other extensions.
ImageBuffer read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const ImageBuffer& img);

}  // namespace bgpatch
