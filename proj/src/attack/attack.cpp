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

#include "bgpatch/attack/attack.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "bgpatch/detector/postprocess.hpp"
#include "bgpatch/eval/psnr.hpp"
#include "bgpatch/losses/input_gradient.hpp"

namespace bgpatch {

AttackConfig AttackConfig::for_detector(const DetectorMetadata& meta) {
  AttackConfig cfg;
  cfg.psnr_floor = meta.stage_kind == StageKind::kTwoStageRpn ? kPsnrFloorTwoStage : kPsnrFloorSingleStage;
  return cfg;
}

void AttackConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("attack: lambda must be positive");
  if (max_iter < 1) throw std::invalid_argument("attack: max_iter must be at least 1");
  if (!(psnr_floor > 0.0)) throw std::invalid_argument("attack: psnr_floor must be positive");
  if (!(pseudo_gt_score_floor > 0.0 && pseudo_gt_score_floor <= 1.0)) {
    throw std::invalid_argument("attack: pseudo_gt_score_floor must lie in (0, 1]");
  }
  geometry.validate();
  loss_weights.validate();
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kMaxIter:
      return "max_iter";
    case Termination::kNoTruePositives:
      return "no_true_positives";
    case Termination::kPsnrFloor:
      return "psnr_floor";
  }
  return "unknown";
}

GroundTruth pseudo_ground_truth(const Detector& detector, const ImageBuffer& img, double score_floor) {
  PostprocessConfig pp;
  pp.score_threshold = score_floor;
  GroundTruth gt;
  for (const ScoredDetection& d : postprocess(detector.forward(img), pp)) gt.add(d.box, d.label);
  return gt;
}

namespace {

double mask_psnr(const ImageBuffer& clean, const ImageBuffer& current, const PixelMask& mask) {
  // An empty mask means nothing was perturbed.
  return psnr(clean, current, mask).value_or(std::numeric_limits<double>::infinity());
}

std::vector<double> patch_areas(const PatchSet& patches) {
  std::vector<double> areas;
  areas.reserve(patches.size());
  for (const Patch& p : patches.patches()) areas.push_back(p.box.area());
  return areas;
}

void record_targets(const InputGradientResult& g, IterationRecord& rec) {
  for (std::size_t j = 0; j < g.tp.selected.size(); ++j) {
    if (g.tp.selected[j]) rec.runner_up.emplace_back(static_cast<int>(j), g.tp.runner_up[j]);
  }
  for (std::size_t j = 0; j < g.fp.selected.size(); ++j) {
    if (g.fp.selected[j]) rec.fp_class.emplace_back(static_cast<int>(j), g.fp.fp_class[j]);
  }
}

}  // namespace

AttackResult run_attack(const ImageBuffer& img, const GroundTruth& gt, const Detector& detector,
                        const AttackConfig& cfg) {
  cfg.validate();
  const DetectorMetadata& meta = detector.metadata();
  const ImageDims dims = img.dims();
  if (!(dims == meta.input_dims)) throw std::invalid_argument("attack: image size differs from detector input");

  AttackResult result;
  result.ground_truth = cfg.pseudo_gt ? pseudo_ground_truth(detector, img, cfg.pseudo_gt_score_floor) : gt;
  const GroundTruth& objects = result.ground_truth;
  objects.validate(meta.num_object_classes);
  const LossWeights& weights = cfg.loss_weights;
  if (objects.empty() && weights.needs_true_positives()) {
    throw std::invalid_argument("attack: no ground-truth objects with a true-positive loss enabled");
  }

  const std::vector<ObjectGroup> groups = cluster_objects(objects, dims, cfg.geometry);
  ImageBuffer current = img;
  PatchSet patches;
  result.termination = Termination::kMaxIter;

  for (int t = 0; t < cfg.max_iter; ++t) {
    InputGradientResult g = input_gradient(detector, current, objects, patches, weights);
    if (t == 0 && !weights.needs_true_positives()) {
      // No patch exists yet, so FPC alone selects nothing; place against every background detection.
      const FpSelection seed = select_background(g.outputs, objects, weights.target_class, meta);
      g = input_gradient_fixed(detector, current, objects, g.tp, seed, weights);
    }
    if (weights.needs_true_positives() && g.tp.count() == 0) {
      result.termination = Termination::kNoTruePositives;
      break;
    }
    const PlanarArray gradient = g.gradient.value_or(PlanarArray(dims));

    IterationRecord rec;
    rec.iteration = t;
    rec.loss = g.loss;
    record_targets(g, rec);

    if (t == 0) {
      PatchInit init = groups.empty() ? init_free_patches(objects, gradient, dims, cfg.geometry)
                                      : init_patches(groups, objects, gradient, dims, cfg.geometry);
      patches = std::move(init.patches);
      result.placement_shortfall = init.shortfall;
    } else {
      PatchExpansion grown = expand_patches(patches, gradient, objects, groups, dims, cfg.geometry);
      patches = std::move(grown.patches);
      rec.expansions = std::move(grown.decisions);
    }
    rec.patches = patches;
    rec.patch_areas = patch_areas(patches);

    const PixelMask mask = rasterize(patches, dims);
    PlanarArray step = apply_mask(gradient, mask);
    const double norm = step.l2_norm();
    if (norm < kZeroGradientNorm) {
      rec.skipped = true;
      rec.psnr = mask_psnr(img, current, mask);
      result.trace.push_back(std::move(rec));
      continue;
    }
    step *= cfg.lambda / norm;
    rec.update_norm = step.l2_norm();
    ImageBuffer next = masked_update(current, step, mask);
    const double next_psnr = mask_psnr(img, next, mask);
    if (next_psnr < cfg.psnr_floor) {
      rec.rolled_back = true;
      rec.psnr = mask_psnr(img, current, mask);
      result.trace.push_back(std::move(rec));
      result.termination = Termination::kPsnrFloor;
      break;
    }
    current = std::move(next);
    rec.psnr = next_psnr;
    result.trace.push_back(std::move(rec));
  }

  result.iterations_run = static_cast<int>(result.trace.size());
  result.patches = patches;
  result.final_psnr = mask_psnr(img, current, rasterize(patches, dims));
  result.adversarial_image = std::move(current);
  return result;
}

}  // namespace bgpatch
