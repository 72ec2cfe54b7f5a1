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

#include <gtest/gtest.h>

#include "bgpatch/attack/attack.hpp"
#include "bgpatch/eval/psnr.hpp"
#include "test_support.hpp"

namespace bgpatch {
namespace {

using testing::FixedDetector;
using testing::make_outputs;
using testing::make_record;
using testing::single_stage;

const ImageDims kDims{64, 64};
const BoxCWH kObject = BoxCWH::from_top_left(20, 20, 20, 20);

GroundTruth one_object() {
  GroundTruth gt;
  gt.add(kObject, 1);
  return gt;
}

FixedDetector detector_on_object(double gradient_value) {
  return FixedDetector(single_stage(1, kDims), make_outputs({make_record({0.3, 0.7}, kObject)}), gradient_value);
}

AttackConfig loose_config(int max_iter) {
  AttackConfig cfg;
  cfg.max_iter = max_iter;
  cfg.psnr_floor = 1.0;
  return cfg;
}

TEST(AttackConfigTest, FloorsByDetectorKind) {
  DetectorMetadata rpn = single_stage(1);
  rpn.stage_kind = StageKind::kTwoStageRpn;
  EXPECT_DOUBLE_EQ(AttackConfig::for_detector(rpn).psnr_floor, 35.0);
  EXPECT_DOUBLE_EQ(AttackConfig::for_detector(single_stage(3)).psnr_floor, 30.0);
  AttackConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.lambda, 30.0);
  EXPECT_EQ(cfg.max_iter, 250);
  cfg.lambda = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = AttackConfig{};
  cfg.max_iter = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = AttackConfig{};
  cfg.psnr_floor = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(RunAttack, UpdateIsNormalizedToLambda) {
  const ImageBuffer img(kDims, 128.0);
  const AttackResult probe = run_attack(img, one_object(), detector_on_object(1.0), loose_config(1));
  const std::size_t count = rasterize(probe.patches, kDims).count();
  ASSERT_GT(count, 0u);
  // Masked gradient norm 60 with lambda 30 halves every gradient value.
  const double v = 60.0 / std::sqrt(3.0 * count);
  const AttackResult r = run_attack(img, one_object(), detector_on_object(v), loose_config(1));
  ASSERT_EQ(r.iterations_run, 1);
  EXPECT_NEAR(r.trace[0].update_norm, 30.0, 1e-9);
  const PixelMask mask = rasterize(r.patches, kDims);
  for (int y = 0; y < kDims.height; ++y)
    for (int x = 0; x < kDims.width; ++x)
      EXPECT_NEAR(r.adversarial_image.at(0, y, x), mask.at(y, x) ? 128.0 - 0.5 * v : 128.0, 1e-9);
}

TEST(RunAttack, StopsWithoutTruePositives) {
  const ImageBuffer img(kDims, 128.0);
  const FixedDetector off_object(single_stage(1, kDims),
                                 make_outputs({make_record({0.3, 0.7}, BoxCWH::from_top_left(0, 0, 8, 8))}), 1.0);
  const AttackResult r = run_attack(img, one_object(), off_object, AttackConfig{});
  EXPECT_EQ(r.termination, Termination::kNoTruePositives);
  EXPECT_EQ(r.iterations_run, 0);
  EXPECT_TRUE(r.trace.empty());
  EXPECT_EQ(r.adversarial_image, img);
  EXPECT_TRUE(std::isinf(r.final_psnr));
}

TEST(RunAttack, NeedsObjectsForTruePositiveTerms) {
  const ImageBuffer img(kDims, 128.0);
  EXPECT_THROW(run_attack(img, GroundTruth{}, detector_on_object(1.0), AttackConfig{}), std::invalid_argument);
  AttackConfig fpc = loose_config(3);
  fpc.loss_weights = LossWeights::fpc_only();
  const AttackResult r = run_attack(img, GroundTruth{}, detector_on_object(1.0), fpc);
  EXPECT_EQ(r.termination, Termination::kMaxIter);
  EXPECT_EQ(r.iterations_run, 3);
  EXPECT_GT(r.patches.size(), 0u);
}

TEST(RunAttack, RollsBackUpdateBelowPsnrFloor) {
  const ImageBuffer img(kDims, 128.0);
  AttackConfig cfg;
  cfg.psnr_floor = 80.0;
  const AttackResult r = run_attack(img, one_object(), detector_on_object(1.0), cfg);
  EXPECT_EQ(r.termination, Termination::kPsnrFloor);
  ASSERT_EQ(r.iterations_run, 1);
  EXPECT_TRUE(r.trace[0].rolled_back);
  EXPECT_EQ(r.adversarial_image, img);
  EXPECT_GE(r.final_psnr, cfg.psnr_floor);
}

TEST(RunAttack, ZeroGradientSkipsUpdatesButCountsIterations) {
  const ImageBuffer img(kDims, 128.0);
  const AttackResult r = run_attack(img, one_object(), detector_on_object(0.0), loose_config(5));
  EXPECT_EQ(r.termination, Termination::kMaxIter);
  EXPECT_EQ(r.iterations_run, 5);
  for (const IterationRecord& rec : r.trace) EXPECT_TRUE(rec.skipped);
  EXPECT_EQ(r.adversarial_image, img);
  // Geometry still grows while updates are skipped.
  EXPECT_GT(r.trace.back().patch_areas.front(), r.trace.front().patch_areas.front());
}

TEST(RunAttack, PseudoGroundTruthFromCleanDetections) {
  const ImageBuffer img(kDims, 128.0);
  const FixedDetector det = detector_on_object(1.0);
  const GroundTruth pseudo = pseudo_ground_truth(det, img, 0.5);
  ASSERT_EQ(pseudo.size(), 1u);
  EXPECT_EQ(pseudo.labels[0], 1);
  EXPECT_EQ(pseudo.boxes[0], kObject);
  EXPECT_TRUE(pseudo_ground_truth(det, img, 0.75).empty());
  AttackConfig cfg = loose_config(2);
  cfg.pseudo_gt = true;
  const AttackResult r = run_attack(img, GroundTruth{}, det, cfg);
  EXPECT_EQ(r.ground_truth.boxes, pseudo.boxes);
  EXPECT_EQ(r.iterations_run, 2);
}

ImageBuffer textured_image(ImageDims dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pix(0.0, 255.0);
  std::vector<double> px(dims.size());
  for (double& v : px) v = pix(rng);
  return ImageBuffer(dims, px);
}

TEST(RunAttack, InvariantsOnSmallDetector) {
  const ToySsm model = testing::small_toy(2);
  const ImageDims dims = model.metadata().input_dims;
  int attacked = 0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const ImageBuffer img = textured_image(dims, seed);
    GroundTruth gt;
    gt.add(BoxCWH::from_top_left(8, 8, 12, 10), 1 + static_cast<int>(seed % 3));
    AttackConfig cfg = AttackConfig::for_detector(model.metadata());
    cfg.max_iter = 25;
    cfg.lambda = 10.0;
    const AttackResult r = run_attack(img, gt, model, cfg);
    EXPECT_EQ(r.iterations_run, static_cast<int>(r.trace.size()));
    EXPECT_LE(r.iterations_run, cfg.max_iter);
    if (r.termination == Termination::kNoTruePositives && r.iterations_run == 0) continue;
    ++attacked;
    std::vector<double> prev_areas;
    for (const IterationRecord& rec : r.trace) {
      for (std::size_t i = 0; i < rec.patches.size(); ++i) {
        for (const BoxCWH& g : gt.boxes) EXPECT_LT(iou(rec.patches[i].box, g), 1e-9);
        for (std::size_t k = 0; k < i; ++k) EXPECT_FALSE(overlaps(rec.patches[i].box, rec.patches[k].box));
        if (!prev_areas.empty()) {
          EXPECT_GE(rec.patch_areas[i], prev_areas[i]);
        }
      }
      if (!rec.skipped) {
        EXPECT_NEAR(rec.update_norm, cfg.lambda, 1e-9);
      }
      prev_areas = rec.patch_areas;
    }
    const PixelMask mask = rasterize(r.patches, dims);
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < dims.height; ++y)
        for (int x = 0; x < dims.width; ++x) {
          const double v = r.adversarial_image.at(c, y, x);
          ASSERT_GE(v, 0.0);
          ASSERT_LE(v, 255.0);
          if (!mask.at(y, x)) {
            ASSERT_EQ(v, img.at(c, y, x));
          }
        }
    EXPECT_GE(r.final_psnr, cfg.psnr_floor);
  }
  EXPECT_GT(attacked, 0);
}

PatchSet two_patches() {
  PatchSet p;
  p.add({BoxCWH::from_top_left(2, 2, 10, 8), 0});
  p.add({BoxCWH::from_top_left(40, 30, 12, 12), 0});
  return p;
}

TEST(RandomBaseline, MatchesTargetPsnr) {
  const ImageBuffer img(kDims, 128.0);
  const PatchSet patches = two_patches();
  const BaselineResult r = random_baseline(img, patches, 48.13, 7);
  EXPECT_TRUE(r.reached_target);
  EXPECT_NEAR(r.achieved_psnr, 48.13, kBaselinePsnrTolerance);
  const PixelMask mask = rasterize(patches, kDims);
  double sq = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < kDims.height; ++y)
      for (int x = 0; x < kDims.width; ++x) {
        const double d = r.image.at(c, y, x) - img.at(c, y, x);
        if (!mask.at(y, x)) {
          EXPECT_EQ(d, 0.0);
        }
        sq += d * d;
      }
  EXPECT_NEAR(std::sqrt(sq / (3.0 * mask.count())), 1.0, 0.015);
  EXPECT_EQ(random_baseline(img, patches, 48.13, 7).image, r.image);
  EXPECT_NE(random_baseline(img, patches, 48.13, 8).image, r.image);
  EXPECT_THROW(random_baseline(img, PatchSet{}, 40.0, 1), std::invalid_argument);
}

TEST(RandomBaseline, ReachesLowTargetsDespiteClipping) {
  const ImageBuffer img(kDims, 250.0);
  const BaselineResult r = random_baseline(img, two_patches(), 25.0, 3);
  EXPECT_TRUE(r.reached_target);
  EXPECT_NEAR(r.achieved_psnr, 25.0, kBaselinePsnrTolerance);
}

TEST(RandomBaseline, ReportsUnattainableTarget) {
  // A white image can only darken; even huge noise cannot reach 1 dB.
  const ImageBuffer img(kDims, 255.0);
  const BaselineResult r = random_baseline(img, two_patches(), 1.0, 3);
  EXPECT_FALSE(r.reached_target);
  EXPECT_GT(r.achieved_psnr, 1.0);
}

TEST(Replay, PastesSourcePixelsInsidePatches) {
  const ImageBuffer clean = textured_image(kDims, 1);
  const PatchSet patches = two_patches();
  AttackResult source;
  source.adversarial_image = masked_update(clean, PlanarArray(kDims, 7.0), rasterize(patches, kDims));
  source.patches = patches;
  EXPECT_EQ(replay_patches(clean, patches, source), source.adversarial_image);

  const ImageBuffer other = textured_image(kDims, 2);
  const ImageBuffer replayed = replay_patches(other, patches, source);
  const PixelMask mask = rasterize(patches, kDims);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < kDims.height; ++y)
      for (int x = 0; x < kDims.width; ++x)
        EXPECT_EQ(replayed.at(c, y, x), mask.at(y, x) ? source.adversarial_image.at(c, y, x) : other.at(c, y, x));
  EXPECT_THROW(replay_patches(ImageBuffer({32, 32}), patches, source), std::invalid_argument);
}

}  // namespace
}  // namespace bgpatch
