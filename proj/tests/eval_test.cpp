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

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "bgpatch/eval/average_precision.hpp"
#include "bgpatch/eval/dataset.hpp"
#include "bgpatch/eval/groups.hpp"
#include "bgpatch/eval/harness.hpp"
#include "bgpatch/eval/image_io.hpp"
#include "bgpatch/eval/psnr.hpp"
#include "bgpatch/eval/report.hpp"
#include "bgpatch/eval/serialization.hpp"
#include "map_oracle.hpp"

namespace bgpatch {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() / ("bgpatch_eval_test_" + std::to_string(::getpid()) + "_" +
                                         std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

PixelMask full_mask(ImageDims d) {
  PixelMask m(d.height, d.width);
  for (int y = 0; y < d.height; ++y)
    for (int x = 0; x < d.width; ++x) m.set(y, x, true);
  return m;
}

ImageBuffer random_image(ImageDims dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pix(0.0, 255.0);
  std::vector<double> px(dims.size());
  for (double& v : px) v = pix(rng);
  return ImageBuffer(dims, px);
}

TEST(Psnr, Examples) {
  const ImageDims d{4, 5};
  const PixelMask mask = full_mask(d);
  const ImageBuffer a(d, 100.0);
  EXPECT_TRUE(std::isinf(*psnr(a, a, mask)));
  EXPECT_NEAR(*psnr(ImageBuffer(d, 0.0), ImageBuffer(d, 255.0), mask), 0.0, 1e-12);
  EXPECT_NEAR(*psnr(a, ImageBuffer(d, 101.0), mask), 48.1308, 1e-3);
  EXPECT_NEAR(*psnr(a, ImageBuffer(d, 101.0), mask), 20.0 * std::log10(255.0), 1e-12);
  EXPECT_FALSE(psnr(a, ImageBuffer(d, 101.0), PixelMask(4, 5)).has_value());
  EXPECT_THROW(psnr(a, ImageBuffer({5, 4}, 0.0), mask), std::invalid_argument);
  EXPECT_NEAR(mse_for_psnr(20.0 * std::log10(255.0)), 1.0, 1e-12);
}

TEST(Psnr, OnlyMaskedPixelsCount) {
  const ImageDims d{4, 4};
  PixelMask mask(4, 4);
  mask.set(1, 1, true);
  ImageBuffer b(d, 10.0);
  b.set(0, 3, 3, 200.0);  // outside the mask
  b.set(1, 1, 1, 11.0);
  // One channel of the single masked pixel differs by 1: MSE = 1/3.
  EXPECT_NEAR(*psnr(ImageBuffer(d, 10.0), b, mask), 10.0 * std::log10(255.0 * 255.0 * 3.0), 1e-12);
}

TEST(Psnr, SymmetricAndDecreasingWithNoise) {
  const ImageDims d{16, 16};
  const PixelMask mask = full_mask(d);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  const ImageBuffer a(d, 128.0);
  PlanarArray noise(d);
  for (double& v : noise.values()) v = n(rng);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 6; ++k) {
    PlanarArray step = noise;
    step *= k;
    const ImageBuffer b = masked_update(a, step, mask);
    const double p = *psnr(a, b, mask);
    EXPECT_DOUBLE_EQ(p, *psnr(b, a, mask));
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(AveragePrecision, RankedFlags) {
  const std::vector<char> flags{1, 0, 1};
  EXPECT_NEAR(average_precision(flags, 2), 0.8333, 1e-4);
  EXPECT_DOUBLE_EQ(average_precision(flags, 2), 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(average_precision(std::vector<char>{}, 3), 0.0);
  EXPECT_DOUBLE_EQ(average_precision(std::vector<char>{1, 1}, 0), 0.0);
}

TEST(MeanAveragePrecision, Examples) {
  GroundTruth gt;
  gt.add(BoxCWH::from_top_left(0, 0, 10, 10), 1);
  gt.add(BoxCWH::from_top_left(30, 30, 10, 10), 1);
  gt.add(BoxCWH::from_top_left(60, 0, 10, 10), 2);
  const std::vector<GroundTruth> gts{gt};
  std::vector<std::vector<ScoredDetection>> perfect(1);
  for (std::size_t i = 0; i < gt.size(); ++i) perfect[0].push_back({gt.boxes[i], gt.labels[i], 1.0});
  EXPECT_DOUBLE_EQ(mean_average_precision(perfect, gts, 0.5, 3).map, 1.0);
  EXPECT_DOUBLE_EQ(mean_average_precision(std::vector<std::vector<ScoredDetection>>(1), gts, 0.5, 3).map, 0.0);

  // One class, two objects, ranked (TP, FP, TP).
  GroundTruth two;
  two.add(BoxCWH::from_top_left(0, 0, 10, 10), 1);
  two.add(BoxCWH::from_top_left(30, 30, 10, 10), 1);
  const std::vector<std::vector<ScoredDetection>> ranked{{{two.boxes[0], 1, 0.9},
                                                          {BoxCWH::from_top_left(60, 60, 5, 5), 1, 0.8},
                                                          {two.boxes[1], 1, 0.7}}};
  const MapResult r = mean_average_precision(ranked, std::vector<GroundTruth>{two}, 0.5, 1);
  EXPECT_NEAR(r.map, 0.8333, 1e-4);
  ASSERT_EQ(r.per_class.size(), 1u);
  EXPECT_EQ(r.per_class[0].num_gt, 2);
  EXPECT_EQ(r.per_class[0].num_detections, 3);
}

TEST(MeanAveragePrecision, DuplicateCountsOnceAndClassesWithoutObjectsAreExcluded) {
  GroundTruth gt;
  gt.add(BoxCWH::from_top_left(0, 0, 10, 10), 1);
  const std::vector<std::vector<ScoredDetection>> dets{
      {{gt.boxes[0], 1, 0.9}, {gt.boxes[0], 1, 0.8}, {gt.boxes[0], 2, 0.95}}};
  const MapResult r = mean_average_precision(dets, std::vector<GroundTruth>{gt}, 0.5, 2);
  EXPECT_DOUBLE_EQ(r.per_class[0].ap, 1.0);
  EXPECT_DOUBLE_EQ(r.map, 1.0);
  EXPECT_THROW(mean_average_precision(dets, std::vector<GroundTruth>{}, 0.5, 2), std::invalid_argument);
  EXPECT_THROW(mean_average_precision(dets, std::vector<GroundTruth>{gt}, 1.0, 2), std::invalid_argument);
}

TEST(MeanAveragePrecision, EqualsBruteForceOracleOnSmallFixtures) {
  for (std::uint64_t seed = 0; seed < 3000; ++seed) {
    const testing::MapFixture f = testing::random_map_fixture(seed, 6);
    for (double thr : {0.5, 0.7}) {
      const MapResult r = mean_average_precision(f.dets, f.gts, thr, f.num_classes);
      ASSERT_EQ(r.map, testing::oracle_map(f.dets, f.gts, f.num_classes, thr)) << "seed " << seed;
    }
  }
}

TEST(Groups, ScaleGroupExamples) {
  const std::vector<double> areas{5, 1, 8, 3, 2, 7, 4, 6};
  const std::vector<int> g = scale_groups(areas, 4);
  EXPECT_EQ(g, (std::vector<int>{2, 0, 3, 1, 0, 3, 1, 2}));
  const std::vector<double> equal(6, 4.0);
  EXPECT_EQ(scale_groups(equal, 3), (std::vector<int>{0, 0, 1, 1, 2, 2}));
  EXPECT_EQ(scale_groups(std::vector<double>{2.0, 1.0}, 4), (std::vector<int>{2, 0}));
  EXPECT_THROW(scale_groups(areas, 0), std::invalid_argument);
}

TEST(Groups, ScaleGroupsPartitionIntoEqualCounts) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(1, 100);
  for (int n : {4, 9, 40, 101}) {
    std::vector<double> areas(n);
    for (double& a : areas) a = u(rng);
    const std::vector<int> g = scale_groups(areas, 4);
    std::vector<int> sizes(4, 0);
    for (int v : g) ++sizes[v];
    EXPECT_LE(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()), 1);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        if (areas[i] < areas[k]) {
          EXPECT_LE(g[i], g[k]);
        }
  }
}

TEST(Groups, DistanceGroups) {
  const std::vector<std::optional<double>> one{0.3};
  EXPECT_EQ(distance_groups(one, 5), std::vector<int>{0});
  const std::vector<std::optional<double>> d{0.1, std::nullopt, 0.5, 0.3, 0.2, 0.4};
  EXPECT_EQ(distance_groups(d, 5), (std::vector<int>{4, 0, 0, 2, 3, 1}));
  EXPECT_THROW(distance_groups(d, 0), std::invalid_argument);
}

TEST(Groups, MeanObjectDistance) {
  GroundTruth gt;
  gt.add(BoxCWH::from_top_left(0, 0, 10, 10), 1);
  EXPECT_FALSE(mean_object_distance(gt, {100, 200}).has_value());
  gt.add(BoxCWH::from_top_left(30, 0, 10, 10), 1);   // 20 from the first
  gt.add(BoxCWH::from_top_left(0, 50, 10, 10), 1);   // 40 from the first, hypot(20, 40) from the second
  const double expected = (20.0 + 40.0 + std::hypot(20.0, 40.0)) / 3.0 / 100.0;
  EXPECT_NEAR(*mean_object_distance(gt, {100, 200}), expected, 1e-12);
}

TEST(Groups, GroupMeans) {
  const std::vector<int> groups{0, 0, 2};
  const std::vector<double> values{1.0, 3.0, 5.0};
  const auto m = group_means(groups, values, 3);
  EXPECT_DOUBLE_EQ(*m[0], 2.0);
  EXPECT_FALSE(m[1].has_value());
  EXPECT_DOUBLE_EQ(*m[2], 5.0);
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

TEST(Dataset, IngestConvertsAndFilters) {
  TempDir dir;
  write_text(dir.path() / "a.json", R"({
    "categories": [{"id": 7, "name": "b"}, {"id": 3, "name": "a"}],
    "images": [{"id": 1, "file_name": "x.png", "width": 10, "height": 10},
               {"id": 2, "file_name": "y.png"},
               {"file_name": "no-id.png"}],
    "annotations": [
      {"image_id": 1, "category_id": 3, "bbox": [3, 4, 4, 2], "iscrowd": 0},
      {"image_id": 1, "category_id": 7, "bbox": [0, 0, 5, 5], "iscrowd": 1},
      {"image_id": 1, "category_id": 7, "bbox": [1, 1, 2, 2]},
      {"image_id": 1, "category_id": 99, "bbox": [1, 1, 2, 2]},
      {"image_id": 1, "category_id": 3, "bbox": [1, 1, 0, 2]},
      {"image_id": 1, "category_id": 3, "bbox": [1, 1, 2]}
    ]})");
  const Dataset ds = ingest_annotations(dir.path() / "a.json");
  ASSERT_EQ(ds.num_classes(), 2);
  EXPECT_EQ(ds.categories[0].id, 3);
  ASSERT_EQ(ds.items.size(), 2u);
  const GroundTruth& gt = ds.items[0].gt;
  ASSERT_EQ(gt.size(), 2u);
  EXPECT_EQ(gt.boxes[0], BoxCWH(5, 5, 4, 2));
  EXPECT_EQ(gt.labels[0], 1);
  EXPECT_EQ(gt.labels[1], 2);
  EXPECT_TRUE(ds.items[1].gt.empty());
  EXPECT_EQ(ds.errors.size(), 4u);
}

TEST(Dataset, UnreadableFilesThrow) {
  TempDir dir;
  EXPECT_THROW(ingest_annotations(dir.path() / "absent.json"), std::runtime_error);
  write_text(dir.path() / "bad.json", "{ not json");
  EXPECT_THROW(ingest_annotations(dir.path() / "bad.json"), std::runtime_error);
  write_text(dir.path() / "noimages.json", R"({"annotations": []})");
  EXPECT_THROW(ingest_annotations(dir.path() / "noimages.json"), std::runtime_error);
}

TEST(Dataset, MissingImagesAreSkippedAndReported) {
  TempDir dir;
  const ImageDims d{8, 8};
  write_image(dir.path() / "present.pfm", random_image(d, 1));
  Dataset ds;
  ds.categories = {{1, "thing"}};
  GroundTruth gt;
  gt.add(BoxCWH::from_top_left(1, 1, 3, 3), 1);
  ds.items.push_back({1, "present.pfm", 8, 8, gt});
  ds.items.push_back({2, "absent.pfm", 8, 8, {}});
  write_annotations(dir.path() / "ann.json", ds);
  const Dataset back = ingest_annotations(dir.path() / "ann.json", dir.path());
  ASSERT_EQ(back.items.size(), 1u);
  EXPECT_EQ(back.items[0].gt.boxes, gt.boxes);
  EXPECT_EQ(back.errors.size(), 1u);
  std::vector<std::string> errors;
  const std::vector<LabeledImage> images = load_images(back, dir.path(), errors);
  ASSERT_EQ(images.size(), 1u);
  EXPECT_TRUE(errors.empty());
  EXPECT_EQ(images[0].image.dims(), d);
}

TEST(Dataset, SubsampleIsSeededAndOrdered) {
  Dataset ds;
  for (int i = 0; i < 50; ++i) ds.items.push_back({i, std::to_string(i), 1, 1, {}});
  const Dataset a = subsample(ds, 10, 5);
  const Dataset b = subsample(ds, 10, 5);
  const Dataset c = subsample(ds, 10, 6);
  ASSERT_EQ(a.items.size(), 10u);
  std::vector<std::int64_t> ia, ib, ic;
  for (const auto& it : a.items) ia.push_back(it.image_id);
  for (const auto& it : b.items) ib.push_back(it.image_id);
  for (const auto& it : c.items) ic.push_back(it.image_id);
  EXPECT_EQ(ia, ib);
  EXPECT_NE(ia, ic);
  EXPECT_TRUE(std::is_sorted(ia.begin(), ia.end()));
  EXPECT_EQ(subsample(ds, 100, 1).items.size(), 50u);
}

TEST(ImageIo, LosslessRoundTrips) {
  TempDir dir;
  const ImageDims d{7, 9};
  const ImageBuffer img = random_image(d, 3);
  write_image(dir.path() / "a.pfm", img);
  const ImageBuffer pfm = read_image(dir.path() / "a.pfm");
  for (std::size_t i = 0; i < img.values().size(); ++i)
    EXPECT_EQ(pfm.values()[i], static_cast<double>(static_cast<float>(img.values()[i])));

  std::vector<double> ints(d.size());
  for (std::size_t i = 0; i < ints.size(); ++i) ints[i] = static_cast<double>((i * 37) % 256);
  const ImageBuffer eight_bit(d, ints);
  for (const char* ext : {"b.png", "b.ppm"}) {
    write_image(dir.path() / ext, eight_bit);
    EXPECT_EQ(read_image(dir.path() / ext), eight_bit) << ext;
  }
  EXPECT_THROW(write_image(dir.path() / "c.jpg", eight_bit), std::runtime_error);
  EXPECT_THROW(read_image(dir.path() / "missing.png"), std::runtime_error);
}

TEST(Serialization, PatchesRoundTrip) {
  PatchSet p;
  p.add({BoxCWH(10.5, 20.25, 4, 6), 0});
  p.add({BoxCWH(40, 40, 8, 2.5), 3});
  const json j = patches_to_json(p);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[1]["group_id"], 3);
  EXPECT_DOUBLE_EQ(j[0]["cx"].get<double>(), 10.5);
  const PatchSet back = patches_from_json(json::parse(j.dump()));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].box, p[0].box);
  EXPECT_EQ(back[1].group_id, 3);
}

TEST(Serialization, SummaryAndTrace) {
  AttackResult r;
  r.iterations_run = 2;
  r.termination = Termination::kNoTruePositives;
  r.final_psnr = std::numeric_limits<double>::infinity();
  r.trace.resize(2);
  r.trace[1].iteration = 1;
  r.trace[1].loss.tpc = 0.25;
  const json s = summary_json(r);
  EXPECT_EQ(s["termination"], "no_true_positives");
  EXPECT_TRUE(s["final_psnr"].is_null());
  std::ostringstream os;
  write_trace(os, r);
  std::istringstream is(os.str());
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) {
    const json rec = json::parse(line);
    EXPECT_EQ(rec["iteration"], lines);
    ++lines;
  }
  EXPECT_EQ(lines, 2);
}

TEST(Harness, LossCombos) {
  const LossWeights w = parse_loss_combo("tpc+fpc");
  EXPECT_TRUE(w.use_tpc);
  EXPECT_FALSE(w.use_tps);
  EXPECT_TRUE(w.use_fpc);
  EXPECT_EQ(loss_combo_name(w), "tpc+fpc");
  EXPECT_EQ(loss_combo_name(parse_loss_combo("fpc+tps+tpc")), "tpc+tps+fpc");
  EXPECT_THROW(parse_loss_combo("tpc+xyz"), std::invalid_argument);
  EXPECT_THROW(parse_loss_combo(""), std::invalid_argument);
}

TEST(Harness, BackgroundFalsePositives) {
  GroundTruth gt;
  gt.add(BoxCWH::from_top_left(0, 0, 10, 10), 1);
  const std::vector<ScoredDetection> dets{
      {BoxCWH::from_top_left(50, 50, 10, 10), 2, 0.9},
      {BoxCWH::from_top_left(50, 50, 10, 10), 1, 0.4},
      {BoxCWH::from_top_left(5, 5, 10, 10), 2, 0.9},  // touches the object
      {BoxCWH::from_top_left(70, 70, 10, 10), 1, 0.5},
  };
  EXPECT_EQ(count_background_fps(dets, gt, 0.5), 2);
  EXPECT_EQ(count_background_fps(dets, gt, 0.5, 2), 1);
  EXPECT_EQ(count_background_fps(dets, gt, 0.3), 3);
  const Detections all{dets, {}};
  const std::vector<GroundTruth> gts{gt, gt};
  EXPECT_EQ(images_with_background_fp(all, gts, 0.5, 1), 1);
  EXPECT_EQ(images_with_background_fp(all, gts, 0.95, 1), 0);
}

TEST(Harness, RelativeDropAndPsnrStats) {
  EXPECT_DOUBLE_EQ(relative_drop(0.8, 0.4), 0.5);
  EXPECT_DOUBLE_EQ(relative_drop(0.0, 0.0), 0.0);
  const std::vector<double> v{30.0, std::numeric_limits<double>::infinity(), 40.0};
  const auto s = psnr_stats(v);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->count, 2u);
  EXPECT_DOUBLE_EQ(s->mean, 35.0);
  EXPECT_DOUBLE_EQ(s->min, 30.0);
  EXPECT_FALSE(psnr_stats(std::vector<double>{}).has_value());
}

TEST(Harness, ParallelForCoversEveryIndexAndRethrows) {
  for (int threads : {1, 3}) {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) EXPECT_EQ(h, 1);
    EXPECT_THROW(parallel_for(10, threads,
                              [](std::size_t i) {
                                if (i == 7) throw std::runtime_error("boom");
                              }),
                 std::runtime_error);
  }
}

TEST(Harness, EvalConfigValidation) {
  EvalConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.iou_thresholds = {1.0};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = EvalConfig{};
  cfg.scale_group_count = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Report, WritesTablesAndPlots) {
  TempDir dir;
  EvalReport rep;
  rep.metadata["ap_interpolation"] = "all-point";
  rep.clean.push_back(MapResult{0.5, {{1, 2, 3, 0.75}}, 0.75});
  rep.attacked.push_back(MapResult{0.5, {{1, 2, 3, 0.25}}, 0.25});
  rep.scale_groups.push_back({0, 4, 1.0, 2.0, 0.8, 0.2, 0.75});
  rep.distance_sweep.push_back({0.25, true, 10, 0.5});
  rep.distance_sweep.push_back({0.5, true, 10, 0.6});
  write_report(dir.path(), rep);
  for (const char* f : {"report.json", "map.csv", "scale_groups.csv", "scale_groups.svg", "distance_sweep.csv",
                        "distance_sweep.svg"}) {
    EXPECT_TRUE(fs::exists(dir.path() / f)) << f;
  }
  const json j = read_json(dir.path() / "report.json");
  EXPECT_EQ(j["metadata"]["ap_interpolation"], "all-point");
}

}  // namespace
}  // namespace bgpatch
