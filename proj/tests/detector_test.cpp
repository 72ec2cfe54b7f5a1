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
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>

#include <gtest/gtest.h>

#include "bgpatch/detector/offsets.hpp"
#include "bgpatch/detector/postprocess.hpp"
#include "bgpatch/detector/synthetic_shapes.hpp"
#include "bgpatch/detector/toy_training.hpp"
#include "test_support.hpp"

namespace bgpatch {
namespace {

namespace fs = std::filesystem;
using testing::make_outputs;
using testing::make_record;
using testing::small_toy;

ImageBuffer random_image(ImageDims dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pix(0.0, 255.0);
  std::vector<double> px(dims.size());
  for (double& v : px) v = pix(rng);
  return ImageBuffer(dims, px);
}

std::string file_bytes(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

TEST(Metadata, Validation) {
  EXPECT_THROW(testing::single_stage(0).validate(), std::invalid_argument);
  DetectorMetadata rpn = testing::single_stage(2);
  rpn.stage_kind = StageKind::kTwoStageRpn;
  EXPECT_THROW(rpn.validate(), std::invalid_argument);
  rpn.num_object_classes = 1;
  EXPECT_NO_THROW(rpn.validate());
}

TEST(LossWeightsTest, AtLeastOneTerm) {
  LossWeights w;
  w.use_tpc = w.use_tps = w.use_fpc = false;
  EXPECT_THROW(w.validate(), std::invalid_argument);
  EXPECT_NO_THROW(LossWeights::fpc_only().validate());
}

TEST(Offsets, EncodeExample) {
  const BoxCWH anchor(10, 10, 10, 10);
  const Offsets o = encode_offsets(anchor, BoxCWH(15, 10, 20, 10));
  EXPECT_DOUBLE_EQ(o.dx, 0.5);
  EXPECT_DOUBLE_EQ(o.dy, 0.0);
  EXPECT_NEAR(o.dw, 0.6931471805599453, 1e-12);
  EXPECT_DOUBLE_EQ(o.dh, 0.0);
  EXPECT_EQ(encode_offsets(anchor, anchor), Offsets{});
}

TEST(Offsets, DecodeExample) {
  const BoxCWH anchor(10, 10, 10, 10);
  const BoxCWH b = decode_offsets(anchor, {0.5, 0.0, std::log(2.0), 0.0});
  EXPECT_NEAR(b.cx(), 15.0, 1e-12);
  EXPECT_NEAR(b.cy(), 10.0, 1e-12);
  EXPECT_NEAR(b.w(), 20.0, 1e-12);
  EXPECT_NEAR(b.h(), 10.0, 1e-12);
  EXPECT_EQ(decode_offsets(anchor, {}), anchor);
}

TEST(Offsets, RoundTripOnRandomPairs) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(-50, 150), size(4, 120);  // log ratios stay inside the decode clamp
  for (int i = 0; i < 1000; ++i) {
    const BoxCWH anchor(pos(rng), pos(rng), size(rng), size(rng));
    const BoxCWH g(pos(rng), pos(rng), size(rng), size(rng));
    const BoxCWH r = decode_offsets(anchor, encode_offsets(anchor, g));
    ASSERT_NEAR(r.cx(), g.cx(), 1e-9);
    ASSERT_NEAR(r.cy(), g.cy(), 1e-9);
    ASSERT_NEAR(r.w(), g.w(), 1e-9);
    ASSERT_NEAR(r.h(), g.h(), 1e-9);
  }
}

TEST(ToySsmTest, ForwardIsNormalizedAndDeterministic) {
  const ToySsm model = small_toy(3);
  EXPECT_EQ(model.metadata().num_scores(), 4);
  const ImageBuffer img = random_image(model.metadata().input_dims, 1);
  const SsmOutputs a = model.forward(img);
  const SsmOutputs b = model.forward(img);
  ASSERT_EQ(a.size(), model.num_detections());
  for (std::size_t j = 0; j < a.size(); ++j) {
    double sum = 0.0;
    for (double s : a.detections[j].scores) {
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
      sum += s;
    }
    EXPECT_NEAR(sum, 1.0, 1e-6);
    EXPECT_EQ(a.detections[j].scores, b.detections[j].scores);
    EXPECT_EQ(a.detections[j].box, b.detections[j].box);
    EXPECT_EQ(a.detections[j].box, decode_offsets(a.detections[j].anchor, a.detections[j].pred_offsets));
  }
}

TEST(ToySsmTest, DetectionCountDependsOnlyOnInputSize) {
  const ToySsm model = small_toy(4);
  const ImageDims dims = model.metadata().input_dims;
  EXPECT_EQ(model.forward(random_image(dims, 1)).size(), model.forward(ImageBuffer(dims, 0.0)).size());
  EXPECT_THROW(model.forward(ImageBuffer({16, 16}, 0.0)), std::invalid_argument);
}

TEST(ToySsmTest, DefaultArchitectureHasThreeClasses) {
  const ToySsm model{ToySsmArchitecture{}};
  EXPECT_EQ(model.metadata().num_object_classes, 3);
  EXPECT_EQ(model.metadata().num_scores(), 4);
}

TEST(ToySsmTest, SaveLoadRoundTrip) {
  const ToySsm model = small_toy(9, 1, StageKind::kTwoStageRpn);
  const fs::path path = fs::temp_directory_path() / "bgpatch_detector_test_weights.bin";
  model.save(path);
  const ToySsm loaded = ToySsm::load(path);
  EXPECT_EQ(loaded.metadata().stage_kind, StageKind::kTwoStageRpn);
  const ImageBuffer img = random_image(model.metadata().input_dims, 2);
  const SsmOutputs a = model.forward(img);
  const SsmOutputs b = loaded.forward(img);
  for (std::size_t j = 0; j < a.size(); ++j) ASSERT_EQ(a.detections[j].scores, b.detections[j].scores);
  fs::remove(path);
}

TEST(ToySsmTest, LoadRejectsForeignFile) {
  const fs::path path = fs::temp_directory_path() / "bgpatch_detector_test_garbage.bin";
  std::ofstream(path) << "not a weight file";
  EXPECT_THROW(ToySsm::load(path), std::runtime_error);
  fs::remove(path);
}

TEST(ToyTraining, SameSeedGivesBitIdenticalWeights) {
  ToyTrainConfig cfg;
  cfg.seed = 21;
  cfg.steps = 6;
  cfg.batch_size = 2;
  cfg.arch = small_toy(0).architecture();
  cfg.data.dims = cfg.arch.input;
  cfg.data.min_side = 6;
  cfg.data.max_side = 12;
  const fs::path a = fs::temp_directory_path() / "bgpatch_train_a.bin";
  const fs::path b = fs::temp_directory_path() / "bgpatch_train_b.bin";
  train_toy_ssm(cfg).save(a);
  train_toy_ssm(cfg).save(b);
  EXPECT_EQ(file_bytes(a), file_bytes(b));
  cfg.seed = 22;
  train_toy_ssm(cfg).save(b);
  EXPECT_NE(file_bytes(a), file_bytes(b));
  fs::remove(a);
  fs::remove(b);
}

TEST(ToyTraining, LossGradientMatchesFiniteDifference) {
  ToyTrainConfig cfg;
  const ToySsm model = small_toy(6);
  cfg.arch = model.architecture();
  GroundTruth gt;
  gt.add(BoxCWH(12, 14, 10, 8), 2);
  const ImageBuffer img = random_image(model.metadata().input_dims, 3);
  nn::Matrix head = model.run(img).head;
  const DetectionTrainingLoss base = detection_training_loss(model, head, gt, cfg);
  std::mt19937_64 rng(1);
  const double h = 1e-6;
  for (int k = 0; k < 20; ++k) {
    const int r = static_cast<int>(rng() % head.rows());
    const int c = static_cast<int>(rng() % head.cols());
    nn::Matrix plus = head, minus = head;
    plus(r, c) += h;
    minus(r, c) -= h;
    const DetectionTrainingLoss lp = detection_training_loss(model, plus, gt, cfg);
    const DetectionTrainingLoss lm = detection_training_loss(model, minus, gt, cfg);
    const double fd = (lp.class_loss + lp.box_loss - lm.class_loss - lm.box_loss) / (2 * h);
    EXPECT_NEAR(base.d_head(r, c), fd, 1e-5 * (1.0 + std::abs(fd)));
  }
}

TEST(Synthetic, DeterministicAndLabeled) {
  const SyntheticConfig cfg;
  const SyntheticSample a = generate_synthetic(cfg, 42);
  const SyntheticSample b = generate_synthetic(cfg, 42);
  EXPECT_EQ(a.image, b.image);
  EXPECT_EQ(a.gt.boxes, b.gt.boxes);
  for (const auto& s : generate_synthetic_set(cfg, 100, 30)) {
    ASSERT_GE(static_cast<int>(s.gt.size()), cfg.min_objects);
    ASSERT_LE(static_cast<int>(s.gt.size()), cfg.max_objects);
    EXPECT_NO_THROW(s.gt.validate(cfg.num_object_classes));
    for (std::size_t i = 0; i < s.gt.size(); ++i) {
      EXPECT_TRUE(inside_image(s.gt.boxes[i], cfg.dims.height, cfg.dims.width));
      for (std::size_t k = i + 1; k < s.gt.size(); ++k) EXPECT_FALSE(overlaps(s.gt.boxes[i], s.gt.boxes[k]));
    }
  }
}

TEST(Postprocess, ThresholdNmsAndOrdering) {
  const BoxCWH a = BoxCWH::from_top_left(0, 0, 10, 10);
  const BoxCWH a2 = BoxCWH::from_top_left(1, 0, 10, 10);
  const BoxCWH far = BoxCWH::from_top_left(30, 30, 10, 10);
  const SsmOutputs out = make_outputs({
      make_record({0.1, 0.8, 0.1}, a),
      make_record({0.2, 0.7, 0.1}, a2),     // suppressed by the first
      make_record({0.3, 0.05, 0.65}, a2),   // other class, survives
      make_record({0.97, 0.02, 0.01}, far), // below threshold
  });
  const std::vector<ScoredDetection> dets = postprocess(out, {0.05, 0.45, 100});
  ASSERT_EQ(dets.size(), 2u);
  EXPECT_EQ(dets[0].label, 1);
  EXPECT_DOUBLE_EQ(dets[0].score, 0.8);
  EXPECT_EQ(dets[1].label, 2);
  EXPECT_DOUBLE_EQ(dets[1].score, 0.65);
}

}  // namespace
}  // namespace bgpatch
