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

#include "bgpatch/detector/offsets.hpp"

#include <algorithm>
#include <cmath>

namespace bgpatch {

Offsets encode_offsets(const BoxCWH& anchor, const BoxCWH& target) {
  // BoxCWH already guarantees positive sizes.
  return {(target.cx() - anchor.cx()) / anchor.w(), (target.cy() - anchor.cy()) / anchor.h(),
          std::log(target.w() / anchor.w()), std::log(target.h() / anchor.h())};
}

BoxCWH decode_offsets(const BoxCWH& anchor, const Offsets& o) {
  const double dw = std::clamp(o.dw, -kMaxLogScale, kMaxLogScale);
  const double dh = std::clamp(o.dh, -kMaxLogScale, kMaxLogScale);
  return BoxCWH(anchor.cx() + o.dx * anchor.w(), anchor.cy() + o.dy * anchor.h(),
                anchor.w() * std::exp(dw), anchor.h() * std::exp(dh));
}

}  // namespace bgpatch
