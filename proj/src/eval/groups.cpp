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

#include "bgpatch/eval/groups.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bgpatch {

namespace {

// Rank r of n lands in group floor(r * count / n).
void split_ranked(const std::vector<std::size_t>& order, int count, std::vector<int>& out) {
  const std::size_t n = order.size();
  for (std::size_t r = 0; r < n; ++r) {
    out[order[r]] = static_cast<int>(r * static_cast<std::size_t>(count) / n);
  }
}

}  // namespace

std::vector<int> scale_groups(std::span<const double> areas, int count) {
  if (count < 1) throw std::invalid_argument("scale_groups: count must be at least 1");
  std::vector<std::size_t> order(areas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return areas[a] < areas[b]; });
  std::vector<int> out(areas.size(), 0);
  split_ranked(order, count, out);
  return out;
}

std::optional<double> mean_object_distance(const GroundTruth& gt, ImageDims dims) {
  const std::size_t n = gt.size();
  if (n < 2) return std::nullopt;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      sum += box_min_distance(gt.boxes[i], gt.boxes[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs) / dims.shorter_side();
}

std::vector<int> distance_groups(std::span<const std::optional<double>> distances, int count) {
  if (count < 1) throw std::invalid_argument("distance_groups: count must be at least 1");
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (distances[i]) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return *distances[a] > *distances[b]; });
  std::vector<int> out(distances.size(), 0);
  split_ranked(order, count, out);
  return out;
}

std::vector<std::optional<double>> group_means(std::span<const int> groups, std::span<const double> values,
                                               int count) {
  if (groups.size() != values.size()) throw std::invalid_argument("group_means: size mismatch");
  std::vector<double> sum(static_cast<std::size_t>(count), 0.0);
  std::vector<int> n(static_cast<std::size_t>(count), 0);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto g = static_cast<std::size_t>(groups[i]);
    sum.at(g) += values[i];
    ++n.at(g);
  }
  std::vector<std::optional<double>> out(static_cast<std::size_t>(count));
  for (std::size_t g = 0; g < out.size(); ++g) {
    if (n[g] > 0) out[g] = sum[g] / n[g];
  }
  return out;
}

}  // namespace bgpatch
