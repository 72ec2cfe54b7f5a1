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
#include <random>

#include <gtest/gtest.h>

#include "bgpatch/geometry/clustering.hpp"
#include "bgpatch/geometry/patch_placement.hpp"

namespace bgpatch {
namespace {

GroundTruth objects(std::initializer_list<BoxCWH> boxes) {
  GroundTruth gt;
  for (const BoxCWH& b : boxes) gt.add(b, 1);
  return gt;
}

PlanarArray random_gradient(ImageDims dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  PlanarArray g(dims);
  for (double& v : g.values()) v = n(rng);
  return g;
}

TEST(GeometryConfigTest, Validation) {
  GeometryConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.patches_per_group = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = GeometryConfig{};
  cfg.init_scale = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = GeometryConfig{};
  cfg.aspect_ratios = {1.0, -1.0};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(GeometryConfigTest, StrideFromShorterSide) {
  const GeometryConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.stride({500, 640}), 10.0);
  EXPECT_DOUBLE_EQ(cfg.cluster_threshold({100, 80}), 16.0);
}

TEST(Clustering, Examples) {
  const ImageDims dims{100, 100};  // threshold 20 px
  const GeometryConfig cfg;
  EXPECT_TRUE(cluster_objects(GroundTruth{}, dims, cfg).empty());
  EXPECT_EQ(cluster_objects(objects({BoxCWH::from_top_left(10, 10, 10, 10)}), dims, cfg).size(), 1u);
  const auto two = cluster_objects(
      objects({BoxCWH::from_top_left(0, 0, 10, 10), BoxCWH::from_top_left(40, 0, 10, 10)}), dims, cfg);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].members, std::vector<int>{0});
  EXPECT_EQ(two[1].members, std::vector<int>{1});
  // A-B gap 15, B-C gap 15, A-C gap 40: chained into one group.
  const auto chain = cluster_objects(objects({BoxCWH::from_top_left(0, 0, 10, 10),
                                              BoxCWH::from_top_left(50, 0, 10, 10),
                                              BoxCWH::from_top_left(25, 0, 10, 10)}),
                                     dims, cfg);
  ASSERT_EQ(chain.size(), 1u);
  EXPECT_EQ(chain[0].members, (std::vector<int>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(chain[0].largest_side, 10.0);
}

TEST(Clustering, PartitionAndPermutationInvariance) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(0, 110), size(3, 25);
  const ImageDims dims{128, 128};
  const GeometryConfig cfg;
  for (int trial = 0; trial < 100; ++trial) {
    GroundTruth gt;
    const int n = 1 + static_cast<int>(rng() % 7);
    for (int i = 0; i < n; ++i) gt.add(BoxCWH::from_top_left(pos(rng), pos(rng), size(rng), size(rng)), 1);
    const auto groups = cluster_objects(gt, dims, cfg);
    std::vector<int> seen(n, 0);
    for (const ObjectGroup& g : groups) {
      ASSERT_FALSE(g.members.empty());
      for (int m : g.members) ++seen[m];
    }
    for (int s : seen) EXPECT_EQ(s, 1);

    // Reverse the objects: the same sets of boxes must be grouped together.
    GroundTruth rev;
    for (int i = n - 1; i >= 0; --i) rev.add(gt.boxes[i], 1);
    const auto rgroups = cluster_objects(rev, dims, cfg);
    ASSERT_EQ(rgroups.size(), groups.size());
    std::vector<int> label(n), rlabel(n);
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (int m : groups[g].members) label[m] = static_cast<int>(g);
    for (std::size_t g = 0; g < rgroups.size(); ++g)
      for (int m : rgroups[g].members) rlabel[n - 1 - m] = static_cast<int>(g);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) EXPECT_EQ(label[a] == label[b], rlabel[a] == rlabel[b]);
  }
}

TEST(Placement, CandidateSizePreservesArea) {
  const BoxCWH object(100, 100, 50, 50);
  const PatchSize s = candidate_patch_size(object, 0.2, 1.5);
  EXPECT_NEAR(s.w, std::sqrt(150.0), 1e-12);
  EXPECT_NEAR(s.h, std::sqrt(100.0 * 100.0 / 150.0), 1e-12);
  EXPECT_NEAR(s.w, 12.2474, 1e-4);
  EXPECT_NEAR(s.h, 8.1650, 1e-4);
  for (double r : GeometryConfig{}.aspect_ratios) {
    const PatchSize t = candidate_patch_size(object, 0.2, r);
    EXPECT_NEAR(t.w * t.h, 100.0, 1e-9);
    EXPECT_NEAR(t.w / t.h, r, 1e-12);
  }
}

TEST(Placement, MinimumDistanceFromLargestSide) {
  const ObjectGroup g{{0}, BoxCWH(50, 50, 100, 40), 100.0};
  EXPECT_DOUBLE_EQ(group_min_distance(g, GeometryConfig{}), 20.0);
  GeometryConfig ring;
  ring.ring_distance_factor = 0.5;
  EXPECT_DOUBLE_EQ(group_min_distance(g, ring), 50.0);
}

TEST(Placement, ZeroGradientPicksRowMajorFirst) {
  const ImageDims dims{100, 100};
  GeometryConfig cfg;
  cfg.patches_per_group = 1;
  cfg.aspect_ratios = {1.0};
  const GroundTruth gt = objects({BoxCWH::from_top_left(60, 60, 25, 25)});
  const auto groups = cluster_objects(gt, dims, cfg);
  const PatchInit init = init_patches(groups, gt, PlanarArray(dims), dims, cfg);
  ASSERT_EQ(init.patches.size(), 1u);
  EXPECT_EQ(init.shortfall, 0);
  EXPECT_DOUBLE_EQ(init.patches[0].box.x0(), 0.0);
  EXPECT_DOUBLE_EQ(init.patches[0].box.y0(), 0.0);
  EXPECT_NEAR(init.patches[0].box.w(), 5.0, 1e-12);
}

TEST(Placement, PicksHighestIntensityWindow) {
  const ImageDims dims{100, 100};
  GeometryConfig cfg;
  cfg.patches_per_group = 1;
  cfg.aspect_ratios = {1.0};
  const GroundTruth gt = objects({BoxCWH::from_top_left(10, 10, 25, 25)});
  PlanarArray g(dims);
  for (int y = 80; y < 85; ++y)
    for (int x = 70; x < 75; ++x) g.at(1, y, x) = -1.0;
  const PatchInit init = init_patches(cluster_objects(gt, dims, cfg), gt, g, dims, cfg);
  ASSERT_EQ(init.patches.size(), 1u);
  EXPECT_DOUBLE_EQ(init.patches[0].box.x0(), 70.0);
  EXPECT_DOUBLE_EQ(init.patches[0].box.y0(), 80.0);
}

TEST(Placement, ShortfallWhenImageIsFull) {
  const ImageDims dims{40, 40};
  GeometryConfig cfg;
  const GroundTruth gt = objects({BoxCWH::from_top_left(2, 2, 36, 36)});
  const PatchInit init = init_patches(cluster_objects(gt, dims, cfg), gt, random_gradient(dims, 1), dims, cfg);
  EXPECT_EQ(init.patches.size(), 0u);
  EXPECT_EQ(init.shortfall, 3);
}

TEST(Placement, InitInvariantsAndDeterminism) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> pos(0, 100), size(8, 40);
  const ImageDims dims{128, 128};
  const GeometryConfig cfg;
  for (int trial = 0; trial < 40; ++trial) {
    GroundTruth gt;
    for (int i = 0; i < 1 + static_cast<int>(rng() % 3); ++i) {
      const BoxCWH b = BoxCWH::from_top_left(pos(rng), pos(rng), size(rng), size(rng));
      if (inside_image(b, dims.height, dims.width)) gt.add(b, 1);
    }
    if (gt.empty()) continue;
    const auto groups = cluster_objects(gt, dims, cfg);
    const PlanarArray grad = random_gradient(dims, trial);
    const PatchInit a = init_patches(groups, gt, grad, dims, cfg);
    const PatchInit b = init_patches(groups, gt, grad, dims, cfg);
    ASSERT_EQ(a.patches.size(), b.patches.size());
    EXPECT_EQ(static_cast<int>(a.patches.size()) + a.shortfall,
              cfg.patches_per_group * static_cast<int>(groups.size()));
    for (std::size_t i = 0; i < a.patches.size(); ++i) {
      const Patch& p = a.patches[i];
      EXPECT_EQ(p.box, b.patches[i].box);
      EXPECT_TRUE(inside_image(p.box, dims.height, dims.width));
      for (const BoxCWH& g : gt.boxes) EXPECT_LT(iou(p.box, g), 1e-9);
      const ObjectGroup& group = groups[static_cast<std::size_t>(p.group_id)];
      for (int m : group.members) {
        EXPECT_GE(box_min_distance(p.box, gt.boxes[m]), group_min_distance(group, cfg) - 1e-9);
      }
    }
  }
}

TEST(Placement, RingConfinesDistance) {
  const ImageDims dims{128, 128};
  GeometryConfig cfg;
  cfg.ring_distance_factor = 0.5;
  const GroundTruth gt = objects({BoxCWH::from_top_left(50, 50, 30, 20)});
  const auto groups = cluster_objects(gt, dims, cfg);
  const PatchInit init = init_patches(groups, gt, random_gradient(dims, 2), dims, cfg);
  ASSERT_GT(init.patches.size(), 0u);
  for (const Patch& p : init.patches.patches()) {
    const double d = box_min_distance(p.box, gt.boxes[0]);
    EXPECT_GE(d, 15.0 - 1e-9);
    EXPECT_LE(d, 15.0 + cfg.stride(dims) + 1e-9);
  }
}

TEST(Placement, FreePatchesWithoutObjects) {
  const ImageDims dims{64, 64};
  const GeometryConfig cfg;
  const PatchInit init = init_free_patches(GroundTruth{}, random_gradient(dims, 4), dims, cfg);
  EXPECT_EQ(init.patches.size(), 3u);
  for (const Patch& p : init.patches.patches()) EXPECT_EQ(p.group_id, 0);
}

// Gradient fixture whose one-stride strips around a 10x10 patch at (40, 40)
// carry masses left 1.0, right 2.0, top 0.5, down 2.0.
PlanarArray strip_fixture(ImageDims dims) {
  PlanarArray g(dims);
  g.at(0, 45, 39) = 1.0;
  g.at(0, 45, 50) = -2.0;
  g.at(2, 39, 45) = 0.5;
  g.at(1, 50, 45) = 2.0;
  return g;
}

TEST(Expansion, DirectionTieBreak) {
  const GeometryConfig cfg;
  const ImageDims big{100, 100};
  PatchSet p2;
  p2.add({BoxCWH::from_top_left(40, 40, 10, 10), 0});
  const PatchExpansion e2 = expand_patches(p2, strip_fixture(big), GroundTruth{}, {}, big, cfg);
  EXPECT_EQ(e2.decisions[0].direction, Direction::kRight);
  EXPECT_DOUBLE_EQ(e2.decisions[0].gain, 2.0);
  EXPECT_EQ(e2.patches[0].box, BoxCWH::from_top_left(40, 40, 12, 10));
  // With right blocked by an object, the equal-mass down strip wins.
  const GroundTruth gt = objects({BoxCWH::from_top_left(51, 30, 20, 30)});
  const PatchExpansion e3 = expand_patches(p2, strip_fixture(big), gt, {}, big, cfg);
  EXPECT_EQ(e3.decisions[0].direction, Direction::kDown);
}

TEST(Expansion, BlockedAtImageBorderAndByObjects) {
  const ImageDims dims{100, 100};
  const GeometryConfig cfg;
  PlanarArray g(dims);
  for (double& v : g.values()) v = 1.0;
  PatchSet patches;
  patches.add({BoxCWH::from_top_left(0, 0, 10, 10), 0});
  const PatchExpansion e = expand_patches(patches, g, GroundTruth{}, {}, dims, cfg);
  EXPECT_NE(e.decisions[0].direction, Direction::kLeft);
  EXPECT_NE(e.decisions[0].direction, Direction::kTop);

  // Boxed in: image corner, an object to the right, another patch below.
  PatchSet boxed;
  boxed.add({BoxCWH::from_top_left(0, 0, 10, 10), 0});
  boxed.add({BoxCWH::from_top_left(0, 10, 10, 10), 0});
  const GroundTruth gt = objects({BoxCWH::from_top_left(10, 0, 20, 9)});
  const PatchExpansion blocked = expand_patches(boxed, g, gt, {}, dims, cfg);
  EXPECT_EQ(blocked.decisions[0].direction, Direction::kNone);
  EXPECT_EQ(blocked.patches[0].box, boxed[0].box);
}

TEST(Expansion, RespectsGroupDistance) {
  const ImageDims dims{100, 100};
  const GeometryConfig cfg;
  const GroundTruth gt = objects({BoxCWH::from_top_left(50, 0, 50, 50)});  // min distance 10
  const auto groups = cluster_objects(gt, dims, cfg);
  PatchSet patches;
  patches.add({BoxCWH::from_top_left(30, 0, 10, 10), 0});  // right edge exactly 10 px away
  PlanarArray g(dims);
  g.at(0, 5, 41) = 100.0;
  const PatchExpansion e = expand_patches(patches, g, gt, groups, dims, cfg);
  EXPECT_NE(e.decisions[0].direction, Direction::kRight);
}

TEST(Expansion, GrowthIsStrideExactAndNeverShrinks) {
  std::mt19937_64 rng(31);
  const ImageDims dims{128, 128};
  const GeometryConfig cfg;
  const double s = cfg.stride(dims);
  const GroundTruth gt = objects({BoxCWH::from_top_left(40, 40, 30, 30), BoxCWH::from_top_left(90, 95, 20, 20)});
  const auto groups = cluster_objects(gt, dims, cfg);
  PatchSet patches = init_patches(groups, gt, random_gradient(dims, 7), dims, cfg).patches;
  ASSERT_GT(patches.size(), 0u);
  for (int it = 0; it < 60; ++it) {
    const PatchExpansion e = expand_patches(patches, random_gradient(dims, 100 + it), gt, groups, dims, cfg);
    for (std::size_t i = 0; i < patches.size(); ++i) {
      const BoxCWH& before = patches[i].box;
      const BoxCWH& after = e.patches[i].box;
      const double dw = after.w() - before.w();
      const double dh = after.h() - before.h();
      if (e.decisions[i].direction == Direction::kNone) {
        EXPECT_EQ(after, before);
      } else {
        EXPECT_TRUE((std::abs(dw - s) < 1e-9 && std::abs(dh) < 1e-9) || (std::abs(dh - s) < 1e-9 && std::abs(dw) < 1e-9));
      }
      EXPECT_TRUE(inside_image(after, dims.height, dims.width));
      for (const BoxCWH& g : gt.boxes) EXPECT_LT(iou(after, g), 1e-9);
      for (std::size_t k = 0; k < i; ++k) EXPECT_FALSE(overlaps(after, e.patches[k].box));
    }
    patches = e.patches;
  }
}

}  // namespace
}  // namespace bgpatch
