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
#include <functional>

#include "bgpatch/detector/synthetic_shapes.hpp"
#include "bgpatch/detector/toy_ssm.hpp"

namespace bgpatch {

struct ToyTrainConfig {
  std::uint64_t seed = 1;
  ToySsmArchitecture arch;
  SyntheticConfig data;
  int steps = 1500;
  int batch_size = 8;
  double learning_rate = 2e-3;
  int warmup_steps = 50;
  double grad_clip = 5.0;
  double positive_iou = 0.5;
  double negative_iou = 0.4;
  int negatives_per_positive = 2;
  int min_negatives = 8;
};

struct TrainProgress {
  int step = 0;
  double loss = 0.0;
  double class_loss = 0.0;
  double box_loss = 0.0;
};

/// Training loss of one image and its gradient with respect to the raw head.
struct DetectionTrainingLoss {
  double class_loss = 0.0;
  double box_loss = 0.0;
  nn::Matrix d_head;
};

/// SSD-style objective: softmax cross-entropy with hard negative mining
/// plus smooth-L1 offset regression on anchors matched at IoU >= 0.5.
DetectionTrainingLoss detection_training_loss(const ToySsm& model, const nn::Matrix& head, const GroundTruth& gt,
                                              const ToyTrainConfig& cfg);

/// Trains a toy detector from scratch on procedurally generated scenes.
/// Deterministic for a given config. Throws std::runtime_error on divergence.
ToySsm train_toy_ssm(const ToyTrainConfig& cfg,
                     const std::function<void(const TrainProgress&)>& on_progress = {});

}  // namespace bgpatch
