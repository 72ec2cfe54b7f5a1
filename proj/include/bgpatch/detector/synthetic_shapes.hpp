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

#include <cstdint>
#include <vector>

#include "bgpatch/core/ground_truth.hpp"
#include "bgpatch/core/image.hpp"

namespace bgpatch {

/// Procedural "colored shapes on textured background" scenes used to train
/// and evaluate the toy detector.
///
/// Classes: 1 = warm rectangle, 2 = cool ellipse, 3 = cool rectangle.
/// Clutter shapes of any hue are drawn into the background without labels.
struct SyntheticConfig {
  ImageDims dims{128, 128};
  int num_object_classes = 3;
  int min_objects = 1;
  int max_objects = 3;
  double min_side = 12.0;
  double max_side = 52.0;
  double max_aspect = 1.6;
  double min_gap = 3.0;        // pixels kept between objects
  double noise_stddev = 2.0;   // per-pixel noise
  double min_opacity = 0.08;   // objects are alpha-blended over the background
  double max_opacity = 0.5;
  int max_distractors = 4;     // unlabeled clutter and decoy shapes
};

struct SyntheticSample {
  ImageBuffer image;
  GroundTruth gt;
};

SyntheticSample generate_synthetic(const SyntheticConfig& cfg, std::uint64_t seed);

/// `count` samples with seeds derived from `base_seed`.
std::vector<SyntheticSample> generate_synthetic_set(const SyntheticConfig& cfg, std::uint64_t base_seed,
                                                    int count);

}  // namespace bgpatch
