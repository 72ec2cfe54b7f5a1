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
#include <filesystem>
#include <vector>

#include "bgpatch/detector/conv.hpp"
#include "bgpatch/detector/detector.hpp"

namespace bgpatch {

struct ToySsmArchitecture {
  ImageDims input{128, 128};
  int num_object_classes = 3;
  StageKind stage_kind = StageKind::kSingleStage;
  std::vector<int> channels{16, 32, 48, 48, 48, 48};
  std::vector<int> strides{2, 2, 2, 1, 1, 1};
  std::vector<int> dilations{1, 1, 1, 1, 2, 4};
  std::vector<double> anchor_sizes{20.0, 32.0, 48.0};

  int grid_stride() const;
  int num_anchors() const { return static_cast<int>(anchor_sizes.size()); }
  /// Head channels per anchor: C + 1 logits then four offsets.
  int values_per_anchor() const { return num_object_classes + 1 + 4; }
  void validate() const;
};

/// Small fully convolutional single-shot detector: strided SiLU conv stack,
/// dilated context layers, and a 1x1 head with square anchors on one grid.
class ToySsm final : public Detector {
 public:
  /// Per-layer activations kept for back-propagation.
  struct Trace {
    std::vector<nn::Matrix> cols;      // lowered input of every layer (head last)
    std::vector<nn::Matrix> pre;       // pre-activation of every hidden layer
    std::vector<int> in_heights;
    std::vector<int> in_widths;
    nn::Matrix head;                   // raw head output, channels x cells
  };

  struct Gradients {
    std::vector<nn::Matrix> weight;
    std::vector<nn::Vector> bias;
  };

  explicit ToySsm(ToySsmArchitecture arch);

  /// He-style initialization from a seed.
  void init_weights(std::uint64_t seed);

  const DetectorMetadata& metadata() const override { return metadata_; }
  SsmOutputs forward(const ImageBuffer& img) const override;
  GradientQuery gradient(const ImageBuffer& img, const LossCallback& loss) const override;

  const ToySsmArchitecture& architecture() const { return arch_; }
  const std::vector<BoxCWH>& anchors() const { return anchors_; }
  std::size_t num_detections() const { return anchors_.size(); }
  std::size_t num_parameters() const;

  Trace run(const ImageBuffer& img) const;
  SsmOutputs decode(const nn::Matrix& head) const;
  /// dL/d pixel given dL/d(raw head output).
  PlanarArray backward_input(const Trace& trace, const nn::Matrix& d_head) const;
  /// Accumulates dL/d(parameters) into `grads`.
  void backward_params(const Trace& trace, const nn::Matrix& d_head, Gradients& grads) const;
  Gradients zero_gradients() const;

  std::vector<nn::Conv2d>& layers() { return layers_; }
  const std::vector<nn::Conv2d>& layers() const { return layers_; }

  std::uint64_t seed() const { return seed_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  /// Head row of logit k / offset i for anchor a.
  int logit_row(int anchor, int k) const { return anchor * arch_.values_per_anchor() + k; }
  int offset_row(int anchor, int i) const {
    return anchor * arch_.values_per_anchor() + arch_.num_object_classes + 1 + i;
  }

  /// Versioned little-endian weight file.
  void save(const std::filesystem::path& path) const;
  static ToySsm load(const std::filesystem::path& path);

 private:
  nn::Matrix input_matrix(const ImageBuffer& img) const;
  nn::Matrix backward_to_input(const Trace& trace, const nn::Matrix& d_head, Gradients* grads) const;

  ToySsmArchitecture arch_;
  DetectorMetadata metadata_;
  std::vector<nn::Conv2d> layers_;  // hidden layers, then the head
  std::vector<BoxCWH> anchors_;
  int grid_h_ = 0;
  int grid_w_ = 0;
  std::uint64_t seed_ = 0;
};

/// Input scaling applied by the toy detector: x = pixel * kInputScale - 1.
inline constexpr double kInputScale = 2.0 / 255.0;

}  // namespace bgpatch
