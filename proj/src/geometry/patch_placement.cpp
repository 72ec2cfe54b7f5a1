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

#include "bgpatch/geometry/patch_placement.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <cmath>
#include <stdexcept>

namespace bgpatch {

namespace {

struct Candidate {
  BoxCWH box;
  double score;
};

bool touches_any_object(const BoxCWH& box, const GroundTruth& gt) {
  for (const BoxCWH& g : gt.boxes) {
    if (overlaps(box, g)) return true;
  }
  return false;
}

double distance_to_group(const BoxCWH& box, const ObjectGroup& group, const GroundTruth& gt) {
  double d = std::numeric_limits<double>::infinity();
  for (int m : group.members) d = std::min(d, box_min_distance(box, gt.boxes[static_cast<std::size_t>(m)]));
  return d;
}

bool distance_ok(const BoxCWH& box, const ObjectGroup& group, const GroundTruth& gt, const GeometryConfig& cfg,
                 double stride, bool initializing) {
  const double d = distance_to_group(box, group, gt);
  const double min_d = group_min_distance(group, cfg);
  if (d < min_d) return false;
  if (initializing && cfg.ring_distance_factor) return d <= min_d + stride;
  return true;
}

/// Every window of the given sizes, row-major over top-left positions on the
/// stride lattice, then in size order.
std::vector<Candidate> enumerate_windows(const std::vector<PatchSize>& sizes, const IntensityTable& table,
                                         ImageDims dims, double stride) {
  std::vector<Candidate> out;
  const double W = dims.width;
  const double H = dims.height;
  for (int iy = 0;; ++iy) {
    const double y0 = iy * stride;
    if (y0 >= H) break;
    for (int ix = 0;; ++ix) {
      const double x0 = ix * stride;
      if (x0 >= W) break;
      for (const PatchSize& s : sizes) {
        if (x0 + s.w > W || y0 + s.h > H) continue;
        const BoxCWH box = BoxCWH::from_corners(x0, y0, x0 + s.w, y0 + s.h);
        out.push_back({box, table.box_sum(box)});
      }
    }
  }
  return out;
}

int greedy_pick(std::vector<Candidate>& cands, int wanted, PatchSet& patches, int group_id,
                const std::function<bool(const BoxCWH&)>& feasible) {
  std::vector<std::size_t> order(cands.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cands[a].score > cands[b].score; });
  int placed = 0;
  for (std::size_t idx : order) {
    if (placed == wanted) break;
    const BoxCWH& box = cands[idx].box;
    if (patches.overlaps_any(box) || !feasible(box)) continue;
    patches.add(Patch{box, group_id});
    ++placed;
  }
  return placed;
}

}  // namespace

IntensityTable::IntensityTable(const PlanarArray& gradient) : dims_(gradient.dims()) {
  const std::vector<double> inten = channel_l1(gradient);
  const int W = dims_.width;
  table_.assign(static_cast<std::size_t>(dims_.height + 1) * (W + 1), 0.0);
  for (int y = 0; y < dims_.height; ++y) {
    double row = 0.0;
    for (int x = 0; x < W; ++x) {
      row += inten[static_cast<std::size_t>(y) * W + x];
      table_[static_cast<std::size_t>(y + 1) * (W + 1) + x + 1] = table_[static_cast<std::size_t>(y) * (W + 1) + x + 1] + row;
    }
  }
}

double IntensityTable::rect_sum(const PixelRect& r) const {
  if (r.cols.length() == 0 || r.rows.length() == 0) return 0.0;
  const std::size_t stride = static_cast<std::size_t>(dims_.width) + 1;
  auto t = [&](int y, int x) { return table_[static_cast<std::size_t>(y) * stride + x]; };
  return t(r.rows.end, r.cols.end) - t(r.rows.begin, r.cols.end) - t(r.rows.end, r.cols.begin) +
         t(r.rows.begin, r.cols.begin);
}

double IntensityTable::box_sum(const BoxCWH& box) const { return rect_sum(snap_box(box, dims_)); }

PatchSize candidate_patch_size(const BoxCWH& object, double init_scale, double aspect) {
  const double area = init_scale * init_scale * object.area();
  return {std::sqrt(area * aspect), std::sqrt(area / aspect)};
}

double group_min_distance(const ObjectGroup& group, const GeometryConfig& cfg) {
  return cfg.ring_distance_factor.value_or(cfg.min_dist_factor) * group.largest_side;
}

PatchInit init_patches(const std::vector<ObjectGroup>& groups, const GroundTruth& gt, const PlanarArray& gradient,
                       ImageDims dims, const GeometryConfig& cfg) {
  cfg.validate();
  if (!(gradient.dims() == dims)) throw std::invalid_argument("init_patches: gradient shape mismatch");
  const IntensityTable table(gradient);
  const double stride = cfg.stride(dims);
  PatchInit result;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const ObjectGroup& group = groups[g];
    std::vector<PatchSize> sizes;
    for (int m : group.members) {
      for (double r : cfg.aspect_ratios) {
        sizes.push_back(candidate_patch_size(gt.boxes[static_cast<std::size_t>(m)], cfg.init_scale, r));
      }
    }
    std::vector<Candidate> cands = enumerate_windows(sizes, table, dims, stride);
    const int placed = greedy_pick(cands, cfg.patches_per_group, result.patches, static_cast<int>(g),
                                   [&](const BoxCWH& box) {
                                     return !touches_any_object(box, gt) &&
                                            distance_ok(box, group, gt, cfg, stride, true);
                                   });
    result.shortfall += cfg.patches_per_group - placed;
  }
  return result;
}

PatchInit init_free_patches(const GroundTruth& gt, const PlanarArray& gradient, ImageDims dims,
                            const GeometryConfig& cfg) {
  cfg.validate();
  if (!(gradient.dims() == dims)) throw std::invalid_argument("init_free_patches: gradient shape mismatch");
  const IntensityTable table(gradient);
  const double side = cfg.free_object_factor * dims.shorter_side();
  const BoxCWH virtual_object(0.5 * side, 0.5 * side, side, side);
  std::vector<PatchSize> sizes;
  for (double r : cfg.aspect_ratios) sizes.push_back(candidate_patch_size(virtual_object, cfg.init_scale, r));
  std::vector<Candidate> cands = enumerate_windows(sizes, table, dims, cfg.stride(dims));
  PatchInit result;
  const int placed = greedy_pick(cands, cfg.patches_per_group, result.patches, 0,
                                 [&](const BoxCWH& box) { return !touches_any_object(box, gt); });
  result.shortfall = cfg.patches_per_group - placed;
  return result;
}

const char* to_string(Direction d) {
  switch (d) {
    case Direction::kNone: return "none";
    case Direction::kLeft: return "left";
    case Direction::kRight: return "right";
    case Direction::kTop: return "top";
    case Direction::kDown: return "down";
  }
  return "none";
}

PatchExpansion expand_patches(const PatchSet& patches, const PlanarArray& gradient, const GroundTruth& gt,
                              const std::vector<ObjectGroup>& groups, ImageDims dims, const GeometryConfig& cfg) {
  cfg.validate();
  if (!(gradient.dims() == dims)) throw std::invalid_argument("expand_patches: gradient shape mismatch");
  const IntensityTable table(gradient);
  const double s = cfg.stride(dims);
  PatchExpansion out{patches, {}};
  for (std::size_t i = 0; i < out.patches.size(); ++i) {
    const Patch& p = out.patches[i];
    const BoxCorners c = p.box.corners();
    const ObjectGroup* group = nullptr;
    if (p.group_id >= 0 && static_cast<std::size_t>(p.group_id) < groups.size()) {
      group = &groups[static_cast<std::size_t>(p.group_id)];
    }
    const double base = table.box_sum(p.box);
    const BoxCorners moves[4] = {{c.x0 - s, c.y0, c.x1, c.y1},
                                 {c.x0, c.y0, c.x1 + s, c.y1},
                                 {c.x0, c.y0 - s, c.x1, c.y1},
                                 {c.x0, c.y0, c.x1, c.y1 + s}};
    const Direction dirs[4] = {Direction::kLeft, Direction::kRight, Direction::kTop, Direction::kDown};
    ExpansionDecision decision{static_cast<int>(i), Direction::kNone, 0.0};
    std::optional<BoxCWH> chosen;
    for (int k = 0; k < 4; ++k) {
      const BoxCWH grown = BoxCWH::from_corners(moves[k]);
      if (!inside_image(grown, dims.height, dims.width)) continue;
      if (touches_any_object(grown, gt)) continue;
      if (out.patches.overlaps_any(grown, i)) continue;
      if (group != nullptr && !distance_ok(grown, *group, gt, cfg, s, false)) continue;
      const double gain = table.box_sum(grown) - base;
      if (!chosen || gain > decision.gain) {
        chosen = grown;
        decision.direction = dirs[k];
        decision.gain = gain;
      }
    }
    if (chosen) out.patches.replace(i, *chosen);
    out.decisions.push_back(decision);
  }
  return out;
}

}  // namespace bgpatch
