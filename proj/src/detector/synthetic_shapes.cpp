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

#include "bgpatch/detector/synthetic_shapes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

namespace bgpatch {

namespace {

using Rgb = std::array<double, 3>;

Rgb hsv_to_rgb(double h, double s, double v) {
  h = std::fmod(h, 360.0);
  if (h < 0) h += 360.0;
  const double c = v * s;
  const double x = c * (1.0 - std::abs(std::fmod(h / 60.0, 2.0) - 1.0));
  const double m = v - c;
  Rgb rgb{};
  switch (static_cast<int>(h / 60.0)) {
    case 0: rgb = {c, x, 0}; break;
    case 1: rgb = {x, c, 0}; break;
    case 2: rgb = {0, c, x}; break;
    case 3: rgb = {0, x, c}; break;
    case 4: rgb = {x, 0, c}; break;
    default: rgb = {c, 0, x}; break;
  }
  for (double& ch : rgb) ch = (ch + m) * 255.0;
  return rgb;
}

struct Shape {
  double cx, cy, w, h;
  bool ellipse;
  Rgb color;
};

Rgb object_color(int label, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> sat(0.35, 0.85);
  std::uniform_real_distribution<double> val(0.45, 0.95);
  double hue = 0.0;
  if (label == 1) {
    hue = std::uniform_real_distribution<double>(-20.0, 50.0)(rng);  // red .. orange .. yellow
  } else {
    hue = std::uniform_real_distribution<double>(170.0, 250.0)(rng);  // cyan .. blue
  }
  return hsv_to_rgb(hue, sat(rng), val(rng));
}

// Decoys mimic one cue of a class (warm hue, or a filled rectangle) without
// being one.
enum class ClutterKind { kBar, kRing, kTriangle, kWarmEllipse, kGreenRect };
constexpr int kNumClutterKinds = 5;

struct Clutter {
  BoxCWH box;
  ClutterKind kind;
  Rgb color;
};

bool inside_clutter(const Clutter& c, double px, double py) {
  const double u = (px - c.box.x0()) / c.box.w();
  const double v = (py - c.box.y0()) / c.box.h();
  if (u < 0 || u > 1 || v < 0 || v > 1) return false;
  switch (c.kind) {
    case ClutterKind::kBar:
      return true;
    case ClutterKind::kRing: {
      const double r2 = (u - 0.5) * (u - 0.5) + (v - 0.5) * (v - 0.5);
      return r2 <= 0.25 && r2 >= 0.09;
    }
    case ClutterKind::kTriangle:
      return std::abs(u - 0.5) <= 0.5 * v;
    case ClutterKind::kWarmEllipse:
      return (u - 0.5) * (u - 0.5) + (v - 0.5) * (v - 0.5) <= 0.25;
    case ClutterKind::kGreenRect:
      return true;
  }
  return false;
}

bool inside_shape(const Shape& s, double px, double py) {
  const double dx = (px - s.cx) / (0.5 * s.w);
  const double dy = (py - s.cy) / (0.5 * s.h);
  if (s.ellipse) return dx * dx + dy * dy <= 1.0;
  return std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
}

}  // namespace

SyntheticSample generate_synthetic(const SyntheticConfig& cfg, std::uint64_t seed) {
  if (cfg.num_object_classes < 1 || cfg.min_objects < 0 || cfg.max_objects < cfg.min_objects ||
      cfg.max_distractors < 0) {
    throw std::invalid_argument("SyntheticConfig: invalid object counts");
  }
  if (!(cfg.min_opacity > 0.0 && cfg.min_opacity <= cfg.max_opacity && cfg.max_opacity <= 1.0)) {
    throw std::invalid_argument("SyntheticConfig: opacity range must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int H = cfg.dims.height;
  const int W = cfg.dims.width;

  // Muted background: base color, linear gradient, a few soft blobs, noise.
  const Rgb base = hsv_to_rgb(360.0 * unit(rng), 0.05 + 0.25 * unit(rng), 0.25 + 0.5 * unit(rng));
  const double gx = (unit(rng) - 0.5) * 60.0;
  const double gy = (unit(rng) - 0.5) * 60.0;
  struct Blob {
    double cx, cy, r;
    Rgb tint;
  };
  std::vector<Blob> blobs;
  const int n_blobs = 2 + static_cast<int>(unit(rng) * 4);
  for (int i = 0; i < n_blobs; ++i) {
    Rgb tint = hsv_to_rgb(360.0 * unit(rng), 0.1 + 0.2 * unit(rng), 0.2 + 0.6 * unit(rng));
    blobs.push_back({unit(rng) * W, unit(rng) * H, 8.0 + unit(rng) * 30.0, tint});
  }
  std::normal_distribution<double> noise(0.0, cfg.noise_stddev);

  std::vector<double> pix(cfg.dims.size());
  auto at = [&](int c, int y, int x) -> double& {
    return pix[(static_cast<std::size_t>(c) * H + y) * W + x];
  };
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const double ramp = gx * (x / static_cast<double>(W) - 0.5) + gy * (y / static_cast<double>(H) - 0.5);
      Rgb v{base[0] + ramp, base[1] + ramp, base[2] + ramp};
      for (const Blob& b : blobs) {
        const double d2 = ((x - b.cx) * (x - b.cx) + (y - b.cy) * (y - b.cy)) / (b.r * b.r);
        const double wgt = 0.6 * std::exp(-d2);
        for (int c = 0; c < 3; ++c) v[c] = (1.0 - wgt) * v[c] + wgt * b.tint[c];
      }
      for (int c = 0; c < 3; ++c) at(c, y, x) = v[c];
    }
  }

  // Non-overlapping objects.
  SyntheticSample sample{ImageBuffer(cfg.dims), GroundTruth{}};
  std::vector<Shape> shapes;
  const int n_objects = cfg.min_objects +
                        static_cast<int>(unit(rng) * (cfg.max_objects - cfg.min_objects + 1));
  for (int i = 0; i < n_objects; ++i) {
    for (int attempt = 0; attempt < 60; ++attempt) {
      const double side = cfg.min_side + unit(rng) * (cfg.max_side - cfg.min_side);
      const double aspect = std::exp((unit(rng) * 2.0 - 1.0) * std::log(cfg.max_aspect));
      const double w = std::clamp(side * std::sqrt(aspect), cfg.min_side * 0.8, cfg.max_side);
      const double h = std::clamp(side / std::sqrt(aspect), cfg.min_side * 0.8, cfg.max_side);
      const double x0 = std::round(1.0 + unit(rng) * (W - w - 2.0));
      const double y0 = std::round(1.0 + unit(rng) * (H - h - 2.0));
      const double ww = std::round(w);
      const double hh = std::round(h);
      const BoxCWH box = BoxCWH::from_top_left(x0, y0, ww, hh);
      bool clash = false;
      for (const BoxCWH& other : sample.gt.boxes) {
        if (box_min_distance(box, other) < cfg.min_gap) {
          clash = true;
          break;
        }
      }
      if (clash) continue;
      const int label = 1 + static_cast<int>(unit(rng) * cfg.num_object_classes) % cfg.num_object_classes;
      const bool ellipse = label == 2;
      shapes.push_back({box.cx(), box.cy(), ww, hh, ellipse, object_color(label, rng)});
      sample.gt.add(box, label);
      break;
    }
  }

  // Clutter stays clear of objects so it never changes a ground-truth box.
  std::vector<Clutter> clutter;
  const int n_clutter = static_cast<int>(unit(rng) * (cfg.max_distractors + 1));
  for (int i = 0; i < n_clutter; ++i) {
    for (int attempt = 0; attempt < 30; ++attempt) {
      const auto kind = static_cast<ClutterKind>(static_cast<int>(unit(rng) * kNumClutterKinds) % kNumClutterKinds);
      double w = cfg.min_side + unit(rng) * (cfg.max_side - cfg.min_side);
      double h = kind == ClutterKind::kBar ? 3.0 + unit(rng) * 4.0 : w * (0.8 + 0.4 * unit(rng));
      if (kind == ClutterKind::kBar && unit(rng) < 0.5) std::swap(w, h);
      h = std::min(h, H - 4.0);
      const BoxCWH box = BoxCWH::from_top_left(std::round(1.0 + unit(rng) * (W - w - 2.0)),
                                               std::round(1.0 + unit(rng) * (H - h - 2.0)), std::round(w),
                                               std::round(h));
      bool clash = false;
      for (const BoxCWH& other : sample.gt.boxes) clash = clash || box_min_distance(box, other) < cfg.min_gap;
      if (clash) continue;
      double hue = 360.0 * unit(rng);
      if (kind == ClutterKind::kWarmEllipse) hue = -20.0 + 70.0 * unit(rng);
      if (kind == ClutterKind::kGreenRect) hue = 80.0 + 70.0 * unit(rng);
      clutter.push_back({box, kind, hsv_to_rgb(hue, 0.35 + 0.5 * unit(rng), 0.45 + 0.5 * unit(rng))});
      break;
    }
  }
  for (const Clutter& c : clutter) {
    const double alpha = cfg.min_opacity + unit(rng) * (cfg.max_opacity - cfg.min_opacity);
    for (int y = std::max(0, static_cast<int>(c.box.y0())); y < std::min(H, static_cast<int>(std::ceil(c.box.y1()))); ++y) {
      for (int x = std::max(0, static_cast<int>(c.box.x0())); x < std::min(W, static_cast<int>(std::ceil(c.box.x1()))); ++x) {
        if (!inside_clutter(c, x + 0.5, y + 0.5)) continue;
        for (int ch = 0; ch < 3; ++ch) at(ch, y, x) = (1.0 - alpha) * at(ch, y, x) + alpha * c.color[ch];
      }
    }
  }

  for (const Shape& s : shapes) {
    const double alpha = cfg.min_opacity + unit(rng) * (cfg.max_opacity - cfg.min_opacity);
    const int x_begin = std::max(0, static_cast<int>(std::floor(s.cx - s.w / 2)));
    const int x_end = std::min(W, static_cast<int>(std::ceil(s.cx + s.w / 2)));
    const int y_begin = std::max(0, static_cast<int>(std::floor(s.cy - s.h / 2)));
    const int y_end = std::min(H, static_cast<int>(std::ceil(s.cy + s.h / 2)));
    const double shade_x = (unit(rng) - 0.5) * 0.4;
    for (int y = y_begin; y < y_end; ++y) {
      for (int x = x_begin; x < x_end; ++x) {
        if (!inside_shape(s, x + 0.5, y + 0.5)) continue;
        const double shade = 1.0 + shade_x * ((x + 0.5 - s.cx) / s.w);
        for (int c = 0; c < 3; ++c) at(c, y, x) = (1.0 - alpha) * at(c, y, x) + alpha * s.color[c] * shade;
      }
    }
  }

  for (double& v : pix) v = std::clamp(v + noise(rng), 0.0, 255.0);
  sample.image = ImageBuffer(cfg.dims, std::move(pix));
  return sample;
}

std::vector<SyntheticSample> generate_synthetic_set(const SyntheticConfig& cfg, std::uint64_t base_seed,
                                                    int count) {
  std::vector<SyntheticSample> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(count));
  std::mt19937_64 rng(base_seed ^ 0x9e3779b97f4a7c15ULL);
  for (auto& s : seeds) s = rng();
  for (int i = 0; i < count; ++i) out.push_back(generate_synthetic(cfg, seeds[static_cast<std::size_t>(i)]));
  return out;
}

}  // namespace bgpatch
