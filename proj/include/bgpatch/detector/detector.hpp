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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bgpatch/core/box.hpp"
#include "bgpatch/core/image.hpp"
#include "bgpatch/detector/offsets.hpp"

namespace bgpatch {

enum class StageKind { kTwoStageRpn, kSingleStage };

const char* to_string(StageKind kind);

struct DetectorMetadata {
  static constexpr int kBackground = 0;

  int num_object_classes = 1;
  StageKind stage_kind = StageKind::kSingleStage;
  ImageDims input_dims;

  int num_scores() const { return num_object_classes + 1; }
  /// Throws std::invalid_argument when C < 1 or an RPN declares C != 1.
  void validate() const;
};

struct DetectionRecord {
  std::vector<double> scores;  // post-softmax, length C + 1, index 0 = background
  BoxCWH box;                  // decode(anchor, pred_offsets)
  BoxCWH anchor;
  Offsets pred_offsets;
};

struct SsmOutputs {
  std::vector<DetectionRecord> detections;
  std::string source_image_id;

  std::size_t size() const { return detections.size(); }
};

/// Which attack losses are active. Weights scale each term (default 1).
struct LossWeights {
  bool use_tpc = true;
  bool use_tps = true;
  bool use_fpc = true;
  std::optional<int> target_class;
  double tpc_weight = 1.0;
  double tps_weight = 1.0;
  double fpc_weight = 1.0;

  bool any() const { return use_tpc || use_tps || use_fpc; }
  bool needs_true_positives() const { return use_tpc || use_tps; }
  /// Throws std::invalid_argument when no term is enabled.
  void validate() const;

  static LossWeights tpc_tps_fpc() { return {}; }
  static LossWeights fpc_only(std::optional<int> target = std::nullopt) {
    LossWeights w;
    w.use_tpc = w.use_tps = false;
    w.target_class = target;
    return w;
  }
};

/// Gradient of a scalar loss with respect to the detector outputs.
struct OutputGradient {
  std::vector<std::vector<double>> d_scores;  // M x (C + 1)
  std::vector<Offsets> d_offsets;             // M

  static OutputGradient zeros(std::size_t m, int num_scores);
};

/// Result of one forward/backward query. `input_gradient` is empty when the
/// loss callback reports no active term.
struct GradientQuery {
  SsmOutputs outputs;
  std::optional<PlanarArray> input_gradient;
};

/// Adapter contract for any single shot module. Implementations must be safe
/// for concurrent const calls.
class Detector {
 public:
  using LossCallback = std::function<std::optional<OutputGradient>(const SsmOutputs&)>;

  virtual ~Detector() = default;

  virtual const DetectorMetadata& metadata() const = 0;

  /// Deterministic forward pass. Throws std::invalid_argument on dimension mismatch.
  virtual SsmOutputs forward(const ImageBuffer& img) const = 0;

  /// One forward pass, then `loss` maps the outputs to dL/d(outputs) and the
  /// result is back-propagated to the input pixels (dL/d pixel, full image).
  virtual GradientQuery gradient(const ImageBuffer& img, const LossCallback& loss) const = 0;
};

}  // namespace bgpatch
