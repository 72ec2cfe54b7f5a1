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

#include "bgpatch/detector/toy_training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace bgpatch {

namespace {

constexpr double kSmoothL1Beta = 0.1;

double smooth_l1(double d, double& grad) {
  const double a = std::abs(d);
  if (a < kSmoothL1Beta) {
    grad = d / kSmoothL1Beta;
    return 0.5 * d * d / kSmoothL1Beta;
  }
  grad = d > 0 ? 1.0 : -1.0;
  return a - 0.5 * kSmoothL1Beta;
}

struct Adam {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int t = 0;
  ToySsm::Gradients m;
  ToySsm::Gradients v;
};

double global_norm(const ToySsm::Gradients& g) {
  double s = 0.0;
  for (const auto& w : g.weight) s += w.squaredNorm();
  for (const auto& b : g.bias) s += b.squaredNorm();
  return std::sqrt(s);
}

template <typename Param, typename Grad>
void adam_step(Param& p, const Grad& g, Grad& m, Grad& v, double lr, double c1, double c2, const Adam& opt) {
  m = opt.beta1 * m + (1.0 - opt.beta1) * g;
  v = opt.beta2 * v + (1.0 - opt.beta2) * g.cwiseProduct(g);
  p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + opt.eps);
}

}  // namespace

DetectionTrainingLoss detection_training_loss(const ToySsm& model, const nn::Matrix& head, const GroundTruth& gt,
                                              const ToyTrainConfig& cfg) {
  const auto& anchors = model.anchors();
  const int num_anchors = model.architecture().num_anchors();
  const int num_scores = model.metadata().num_scores();
  const bool rpn = model.metadata().stage_kind == StageKind::kTwoStageRpn;
  const std::size_t m = anchors.size();

  std::vector<int> match(m, -1);
  std::vector<double> best_iou(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < gt.size(); ++i) {
      const double v = iou(anchors[j], gt.boxes[i]);
      if (v > best_iou[j]) {
        best_iou[j] = v;
        match[j] = static_cast<int>(i);
      }
    }
  }
  std::vector<char> positive(m, 0);
  for (std::size_t j = 0; j < m; ++j) positive[j] = best_iou[j] >= cfg.positive_iou ? 1 : 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    std::size_t best = 0;
    double bv = -1.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = iou(anchors[j], gt.boxes[i]);
      if (v > bv) {
        bv = v;
        best = j;
      }
    }
    positive[best] = 1;
    match[best] = static_cast<int>(i);
  }

  DetectionTrainingLoss out;
  out.d_head = nn::Matrix::Zero(head.rows(), head.cols());
  std::vector<double> probs(static_cast<std::size_t>(num_scores));
  auto softmax_at = [&](std::size_t j) {
    const int cell = static_cast<int>(j) / num_anchors;
    const int a = static_cast<int>(j) % num_anchors;
    double mx = -1e300;
    for (int k = 0; k < num_scores; ++k) mx = std::max(mx, head(model.logit_row(a, k), cell));
    double sum = 0.0;
    for (int k = 0; k < num_scores; ++k) {
      probs[k] = std::exp(head(model.logit_row(a, k), cell) - mx);
      sum += probs[k];
    }
    for (double& p : probs) p /= sum;
  };

  int n_pos = 0;
  std::vector<std::pair<double, std::size_t>> negatives;
  for (std::size_t j = 0; j < m; ++j) {
    if (positive[j]) {
      ++n_pos;
      continue;
    }
    if (best_iou[j] < cfg.negative_iou) {
      softmax_at(j);
      negatives.emplace_back(-std::log(std::max(probs[0], 1e-12)), j);
    }
  }
  const std::size_t n_neg = std::min<std::size_t>(
      negatives.size(), static_cast<std::size_t>(std::max(cfg.negatives_per_positive * n_pos, cfg.min_negatives)));
  std::partial_sort(negatives.begin(), negatives.begin() + static_cast<std::ptrdiff_t>(n_neg), negatives.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });

  const double norm = 1.0 / std::max(1, n_pos);
  auto add_ce = [&](std::size_t j, int target) {
    softmax_at(j);
    const int cell = static_cast<int>(j) / num_anchors;
    const int a = static_cast<int>(j) % num_anchors;
    out.class_loss += -std::log(std::max(probs[target], 1e-12)) * norm;
    for (int k = 0; k < num_scores; ++k) {
      out.d_head(model.logit_row(a, k), cell) += (probs[k] - (k == target ? 1.0 : 0.0)) * norm;
    }
  };
  for (std::size_t n = 0; n < n_neg; ++n) add_ce(negatives[n].second, 0);
  for (std::size_t j = 0; j < m; ++j) {
    if (!positive[j]) continue;
    const auto gi = static_cast<std::size_t>(match[j]);
    add_ce(j, rpn ? 1 : gt.labels[gi]);
    const Offsets target = encode_offsets(anchors[j], gt.boxes[gi]);
    const double t[4] = {target.dx, target.dy, target.dw, target.dh};
    const int cell = static_cast<int>(j) / num_anchors;
    const int a = static_cast<int>(j) % num_anchors;
    for (int i = 0; i < 4; ++i) {
      double g = 0.0;
      out.box_loss += smooth_l1(head(model.offset_row(a, i), cell) - t[i], g) * norm;
      out.d_head(model.offset_row(a, i), cell) += g * norm;
    }
  }
  return out;
}

ToySsm train_toy_ssm(const ToyTrainConfig& cfg, const std::function<void(const TrainProgress&)>& on_progress) {
  ToySsmArchitecture arch = cfg.arch;
  arch.input = cfg.data.dims;
  arch.num_object_classes = cfg.data.num_object_classes;
  if (arch.stage_kind == StageKind::kTwoStageRpn) arch.num_object_classes = 1;
  ToySsm model(arch);
  model.init_weights(cfg.seed);

  Adam opt;
  opt.m = model.zero_gradients();
  opt.v = model.zero_gradients();
  std::mt19937_64 data_rng(cfg.seed * 0x2545F4914F6CDD1DULL + 17);

  for (int step = 0; step < cfg.steps; ++step) {
    ToySsm::Gradients grads = model.zero_gradients();
    TrainProgress progress{step, 0.0, 0.0, 0.0};
    for (int b = 0; b < cfg.batch_size; ++b) {
      SyntheticSample s = generate_synthetic(cfg.data, data_rng());
      if (arch.stage_kind == StageKind::kTwoStageRpn) std::fill(s.gt.labels.begin(), s.gt.labels.end(), 1);
      const ToySsm::Trace trace = model.run(s.image);
      DetectionTrainingLoss l = detection_training_loss(model, trace.head, s.gt, cfg);
      progress.class_loss += l.class_loss / cfg.batch_size;
      progress.box_loss += l.box_loss / cfg.batch_size;
      l.d_head /= static_cast<double>(cfg.batch_size);
      model.backward_params(trace, l.d_head, grads);
    }
    progress.loss = progress.class_loss + progress.box_loss;
    if (!std::isfinite(progress.loss)) {
      throw std::runtime_error("toy SSM training diverged at step " + std::to_string(step));
    }
    const double gn = global_norm(grads);
    if (!std::isfinite(gn)) throw std::runtime_error("toy SSM training produced a non-finite gradient");
    if (gn > cfg.grad_clip) {
      const double k = cfg.grad_clip / gn;
      for (auto& w : grads.weight) w *= k;
      for (auto& b : grads.bias) b *= k;
    }

    const double progress_frac = static_cast<double>(step) / std::max(1, cfg.steps - 1);
    double lr = cfg.learning_rate * (0.05 + 0.95 * 0.5 * (1.0 + std::cos(M_PI * progress_frac)));
    if (step < cfg.warmup_steps) lr *= static_cast<double>(step + 1) / cfg.warmup_steps;
    ++opt.t;
    const double c1 = 1.0 - std::pow(opt.beta1, opt.t);
    const double c2 = 1.0 - std::pow(opt.beta2, opt.t);
    auto& layers = model.layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
      adam_step(layers[i].weight, grads.weight[i], opt.m.weight[i], opt.v.weight[i], lr, c1, c2, opt);
      adam_step(layers[i].bias, grads.bias[i], opt.m.bias[i], opt.v.bias[i], lr, c1, c2, opt);
    }
    if (on_progress) on_progress(progress);
  }
  return model;
}

}  // namespace bgpatch
