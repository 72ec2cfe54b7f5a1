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

#include "bgpatch/core/box.hpp"

namespace bgpatch {

/// Anchor-relative regression target: translation normalized by anchor size
/// and log size ratio.
struct Offsets {
  double dx = 0.0;
  double dy = 0.0;
  double dw = 0.0;
  double dh = 0.0;
  bool operator==(const Offsets&) const = default;
};

/// Log size ratios are clamped to +-kMaxLogScale when decoding.
inline constexpr double kMaxLogScale = 4.135166556742356;  // ln(1000 / 16)

Offsets encode_offsets(const BoxCWH& anchor, const BoxCWH& target);
BoxCWH decode_offsets(const BoxCWH& anchor, const Offsets& offsets);

}  // namespace bgpatch
