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

#include "bgpatch/eval/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bgpatch/eval/image_io.hpp"

namespace bgpatch {

using nlohmann::json;

namespace {

std::string describe(const char* kind, std::size_t index, const std::string& what) {
  return std::string(kind) + " #" + std::to_string(index) + ": " + what;
}

}  // namespace

Dataset ingest_annotations(const std::filesystem::path& path, const std::filesystem::path& image_root) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("images") || !doc["images"].is_array()) {
    throw std::runtime_error(path.string() + ": missing 'images' array");
  }

  Dataset ds;
  if (doc.contains("categories") && doc["categories"].is_array()) {
    for (std::size_t i = 0; i < doc["categories"].size(); ++i) {
      const json& c = doc["categories"][i];
      try {
        ds.categories.push_back({c.at("id").get<std::int64_t>(), c.value("name", std::string{})});
      } catch (const json::exception& e) {
        ds.errors.push_back(describe("category", i, e.what()));
      }
    }
  }
  std::stable_sort(ds.categories.begin(), ds.categories.end(),
                   [](const Category& a, const Category& b) { return a.id < b.id; });
  std::map<std::int64_t, int> label_of;
  for (std::size_t i = 0; i < ds.categories.size(); ++i) label_of[ds.categories[i].id] = static_cast<int>(i) + 1;

  std::map<std::int64_t, std::size_t> item_of;
  for (std::size_t i = 0; i < doc["images"].size(); ++i) {
    const json& im = doc["images"][i];
    try {
      DatasetItem item;
      item.image_id = im.at("id").get<std::int64_t>();
      item.file_name = im.at("file_name").get<std::string>();
      item.width = im.value("width", 0);
      item.height = im.value("height", 0);
      if (item_of.contains(item.image_id)) {
        ds.errors.push_back(describe("image", i, "duplicate id " + std::to_string(item.image_id)));
        continue;
      }
      if (!image_root.empty() && !std::filesystem::exists(image_root / item.file_name)) {
        ds.errors.push_back(describe("image", i, "missing file " + item.file_name));
        continue;
      }
      item_of[item.image_id] = ds.items.size();
      ds.items.push_back(std::move(item));
    } catch (const json::exception& e) {
      ds.errors.push_back(describe("image", i, e.what()));
    }
  }

  const json empty = json::array();
  const json& anns = doc.contains("annotations") && doc["annotations"].is_array() ? doc["annotations"] : empty;
  for (std::size_t i = 0; i < anns.size(); ++i) {
    const json& a = anns[i];
    try {
      if (a.value("iscrowd", 0) != 0) continue;
      const auto image = item_of.find(a.at("image_id").get<std::int64_t>());
      if (image == item_of.end()) continue;  // image skipped or absent
      const auto label = label_of.find(a.at("category_id").get<std::int64_t>());
      if (label == label_of.end()) {
        ds.errors.push_back(describe("annotation", i, "unknown category"));
        continue;
      }
      const auto bbox = a.at("bbox").get<std::vector<double>>();
      if (bbox.size() != 4) {
        ds.errors.push_back(describe("annotation", i, "bbox needs 4 numbers"));
        continue;
      }
      ds.items[image->second].gt.add(BoxCWH::from_top_left(bbox[0], bbox[1], bbox[2], bbox[3]), label->second);
    } catch (const std::exception& e) {
      ds.errors.push_back(describe("annotation", i, e.what()));
    }
  }
  return ds;
}

void write_annotations(const std::filesystem::path& path, const Dataset& dataset) {
  json doc;
  doc["categories"] = json::array();
  for (const Category& c : dataset.categories) doc["categories"].push_back({{"id", c.id}, {"name", c.name}});
  doc["images"] = json::array();
  doc["annotations"] = json::array();
  std::int64_t ann_id = 1;
  for (const DatasetItem& item : dataset.items) {
    doc["images"].push_back(
        {{"id", item.image_id}, {"file_name", item.file_name}, {"width", item.width}, {"height", item.height}});
    for (std::size_t k = 0; k < item.gt.size(); ++k) {
      const BoxCWH& b = item.gt.boxes[k];
      const auto label = static_cast<std::size_t>(item.gt.labels[k]);
      if (label < 1 || label > dataset.categories.size()) {
        throw std::invalid_argument("write_annotations: label without category");
      }
      doc["annotations"].push_back({{"id", ann_id++},
                                    {"image_id", item.image_id},
                                    {"category_id", dataset.categories[label - 1].id},
                                    {"bbox", {b.x0(), b.y0(), b.w(), b.h()}},
                                    {"area", b.area()},
                                    {"iscrowd", 0}});
    }
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << doc.dump(1) << '\n';
}

Dataset subsample(const Dataset& dataset, std::size_t count, std::uint64_t seed) {
  if (count >= dataset.items.size()) return dataset;
  std::vector<std::size_t> idx(dataset.items.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // Must not depend on the standard library's distributions.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  Dataset out;
  out.categories = dataset.categories;
  out.errors = dataset.errors;
  for (std::size_t i : idx) out.items.push_back(dataset.items[i]);
  return out;
}

std::vector<LabeledImage> load_images(const Dataset& dataset, const std::filesystem::path& image_root,
                                      std::vector<std::string>& errors) {
  std::vector<LabeledImage> out;
  out.reserve(dataset.items.size());
  for (const DatasetItem& item : dataset.items) {
    try {
      out.push_back({item.file_name, read_image(image_root / item.file_name), item.gt});
    } catch (const std::exception& e) {
      errors.emplace_back(e.what());
    }
  }
  return out;
}

}  // namespace bgpatch
