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
#include <string>
#include <vector>

#include "bgpatch/core/ground_truth.hpp"
#include "bgpatch/core/image.hpp"

namespace bgpatch {

struct DatasetItem {
  std::int64_t image_id = 0;
  std::string file_name;  // relative to the dataset's image root
  int width = 0;
  int height = 0;
  GroundTruth gt;
};

struct Category {
  std::int64_t id = 0;  // id used in the annotation file
  std::string name;
};

/// Labels are 1-based positions in `categories`, which is sorted by file id.
struct Dataset {
  std::vector<Category> categories;
  std::vector<DatasetItem> items;
  std::vector<std::string> errors;  // problems with individual records

  int num_classes() const { return static_cast<int>(categories.size()); }
};

/// Reads COCO-style JSON ("images", "annotations", "categories"). Boxes are
/// converted from top-left to centre form; crowd annotations are dropped;
/// images keep file order, including those without annotations. A bad
/// annotation or image record is reported in `errors` and skipped. With a
/// non-empty `image_root`, images whose file is missing are reported and
/// skipped. Throws std::runtime_error when the file cannot be read or parsed.
Dataset ingest_annotations(const std::filesystem::path& path, const std::filesystem::path& image_root = {});

/// Writes a dataset in the format `ingest_annotations` reads.
void write_annotations(const std::filesystem::path& path, const Dataset& dataset);

/// `count` items chosen uniformly at random with a seeded generator, in
/// their original order. Returns everything when count >= size.
Dataset subsample(const Dataset& dataset, std::size_t count, std::uint64_t seed);

/// A loaded image with its annotations.
struct LabeledImage {
  std::string name;
  ImageBuffer image;
  GroundTruth gt;
};

/// Loads every image of the dataset from `image_root`. Unreadable images are
/// appended to `errors` and skipped.
std::vector<LabeledImage> load_images(const Dataset& dataset, const std::filesystem::path& image_root,
                                      std::vector<std::string>& errors);

}  // namespace bgpatch
