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

#include "bgpatch/detector/toy_ssm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace bgpatch {

namespace {

constexpr std::array<char, 8> kMagic{'B', 'G', 'P', 'S', 'S', 'M', '0', '1'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void write_pod(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("toy SSM weight file truncated");
  return v;
}

}  // namespace

int ToySsmArchitecture::grid_stride() const {
  int s = 1;
  for (int v : strides) s *= v;
  return s;
}

void ToySsmArchitecture::validate() const {
  if (channels.empty() || channels.size() != strides.size() || channels.size() != dilations.size()) {
    throw std::invalid_argument("ToySsmArchitecture: layer lists must be non-empty and equally long");
  }
  if (anchor_sizes.empty()) throw std::invalid_argument("ToySsmArchitecture: no anchors");
  const int g = grid_stride();
  if (input.height % g != 0 || input.width % g != 0) {
    throw std::invalid_argument("ToySsmArchitecture: input size must be a multiple of the grid stride");
  }
  DetectorMetadata{num_object_classes, stage_kind, input}.validate();
}

ToySsm::ToySsm(ToySsmArchitecture arch) : arch_(std::move(arch)) {
  arch_.validate();
  metadata_ = DetectorMetadata{arch_.num_object_classes, arch_.stage_kind, arch_.input};

  int in_ch = ImageDims::channels;
  for (std::size_t i = 0; i < arch_.channels.size(); ++i) {
    layers_.emplace_back(nn::ConvShape{in_ch, arch_.channels[i], 3, arch_.strides[i], arch_.dilations[i]});
    in_ch = arch_.channels[i];
  }
  layers_.emplace_back(nn::ConvShape{in_ch, arch_.num_anchors() * arch_.values_per_anchor(), 1, 1, 1});

  const int g = arch_.grid_stride();
  grid_h_ = arch_.input.height / g;
  grid_w_ = arch_.input.width / g;
  for (int gy = 0; gy < grid_h_; ++gy) {
    for (int gx = 0; gx < grid_w_; ++gx) {
      for (double size : arch_.anchor_sizes) {
        anchors_.emplace_back((gx + 0.5) * g, (gy + 0.5) * g, size, size);
      }
    }
  }
}

void ToySsm::init_weights(std::uint64_t seed) {
  seed_ = seed;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    nn::Conv2d& layer = layers_[i];
    const bool head = i + 1 == layers_.size();
    const double fan_in = layer.shape().patch_size();
    const double stddev = head ? 0.01 : std::sqrt(2.0 / fan_in);
    std::normal_distribution<double> dist(0.0, stddev);
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = dist(rng);
    }
    layer.bias.setZero();
  }
  // Start the head biased towards background so early training is stable.
  nn::Conv2d& head = layers_.back();
  for (int a = 0; a < arch_.num_anchors(); ++a) head.bias(logit_row(a, 0)) = 2.0;
}

std::size_t ToySsm::num_parameters() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

nn::Matrix ToySsm::input_matrix(const ImageBuffer& img) const {
  if (!(img.dims() == arch_.input)) {
    throw std::invalid_argument("toy SSM: image is " + std::to_string(img.height()) + "x" +
                                std::to_string(img.width()) + ", detector expects " +
                                std::to_string(arch_.input.height) + "x" + std::to_string(arch_.input.width));
  }
  const auto v = img.values();
  nn::Matrix x(ImageDims::channels, static_cast<Eigen::Index>(img.dims().plane()));
  std::transform(v.begin(), v.end(), x.data(), [](double p) { return p * kInputScale - 1.0; });
  return x;
}

ToySsm::Trace ToySsm::run(const ImageBuffer& img) const {
  Trace t;
  nn::FeatureMap fm{input_matrix(img), img.height(), img.width()};
  t.cols.resize(layers_.size());
  t.pre.resize(layers_.size() - 1);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    int oh = 0;
    int ow = 0;
    t.in_heights.push_back(fm.height);
    t.in_widths.push_back(fm.width);
    layers_[i].im2col(fm, t.cols[i], oh, ow);
    nn::Matrix z = layers_[i].apply(t.cols[i]);
    if (i + 1 == layers_.size()) {
      t.head = std::move(z);
      break;
    }
    t.pre[i] = z;
    nn::silu_inplace(z);
    fm = nn::FeatureMap{std::move(z), oh, ow};
  }
  return t;
}

SsmOutputs ToySsm::decode(const nn::Matrix& head) const {
  const int num_scores = arch_.num_object_classes + 1;
  const int num_anchors = arch_.num_anchors();
  SsmOutputs out;
  out.detections.reserve(anchors_.size());
  std::vector<double> logits(static_cast<std::size_t>(num_scores));
  for (int cell = 0; cell < grid_h_ * grid_w_; ++cell) {
    for (int a = 0; a < num_anchors; ++a) {
      double mx = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < num_scores; ++k) {
        logits[k] = head(logit_row(a, k), cell);
        mx = std::max(mx, logits[k]);
      }
      std::vector<double> scores(static_cast<std::size_t>(num_scores));
      double sum = 0.0;
      for (int k = 0; k < num_scores; ++k) {
        scores[k] = std::exp(logits[k] - mx);
        sum += scores[k];
      }
      for (double& s : scores) s /= sum;
      const Offsets off{head(offset_row(a, 0), cell), head(offset_row(a, 1), cell),
                        head(offset_row(a, 2), cell), head(offset_row(a, 3), cell)};
      const BoxCWH& anchor = anchors_[static_cast<std::size_t>(cell) * num_anchors + a];
      out.detections.push_back(DetectionRecord{std::move(scores), decode_offsets(anchor, off), anchor, off});
    }
  }
  return out;
}

SsmOutputs ToySsm::forward(const ImageBuffer& img) const { return decode(run(img).head); }

nn::Matrix ToySsm::backward_to_input(const Trace& trace, const nn::Matrix& d_head, Gradients* grads) const {
  nn::Matrix dz = d_head;
  nn::Matrix din;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    if (li + 1 != layers_.size()) nn::silu_backward(trace.pre[li], dz);
    const nn::Conv2d& layer = layers_[li];
    if (grads != nullptr) {
      grads->weight[li].noalias() += dz * trace.cols[li].transpose();
      grads->bias[li] += dz.rowwise().sum();
      if (li == 0) break;
    }
    nn::Matrix dcols(layer.weight.cols(), dz.cols());
    dcols.noalias() = layer.weight.transpose() * dz;
    layer.col2im(dcols, trace.in_heights[li], trace.in_widths[li], din);
    dz = std::move(din);
  }
  return dz;
}

PlanarArray ToySsm::backward_input(const Trace& trace, const nn::Matrix& d_head) const {
  nn::Matrix dx = backward_to_input(trace, d_head, nullptr);
  std::vector<double> values(dx.data(), dx.data() + dx.size());
  for (double& v : values) v *= kInputScale;
  return PlanarArray(arch_.input, std::move(values));
}

void ToySsm::backward_params(const Trace& trace, const nn::Matrix& d_head, Gradients& grads) const {
  backward_to_input(trace, d_head, &grads);
}

ToySsm::Gradients ToySsm::zero_gradients() const {
  Gradients g;
  for (const auto& l : layers_) {
    g.weight.push_back(nn::Matrix::Zero(l.weight.rows(), l.weight.cols()));
    g.bias.push_back(nn::Vector::Zero(l.bias.size()));
  }
  return g;
}

GradientQuery ToySsm::gradient(const ImageBuffer& img, const LossCallback& loss) const {
  Trace trace = run(img);
  GradientQuery q{decode(trace.head), std::nullopt};
  std::optional<OutputGradient> og = loss(q.outputs);
  if (!og) return q;
  const int num_scores = arch_.num_object_classes + 1;
  const int num_anchors = arch_.num_anchors();
  if (og->d_scores.size() != anchors_.size() || og->d_offsets.size() != anchors_.size()) {
    throw std::invalid_argument("toy SSM: output gradient has the wrong number of detections");
  }
  nn::Matrix d_head = nn::Matrix::Zero(trace.head.rows(), trace.head.cols());
  for (std::size_t j = 0; j < anchors_.size(); ++j) {
    const int cell = static_cast<int>(j) / num_anchors;
    const int a = static_cast<int>(j) % num_anchors;
    const auto& s = q.outputs.detections[j].scores;
    const auto& g = og->d_scores[j];
    double dot = 0.0;
    for (int k = 0; k < num_scores; ++k) dot += g[k] * s[k];
    for (int k = 0; k < num_scores; ++k) d_head(logit_row(a, k), cell) = s[k] * (g[k] - dot);
    const Offsets& d = og->d_offsets[j];
    d_head(offset_row(a, 0), cell) = d.dx;
    d_head(offset_row(a, 1), cell) = d.dy;
    d_head(offset_row(a, 2), cell) = d.dw;
    d_head(offset_row(a, 3), cell) = d.dh;
  }
  q.input_gradient = backward_input(trace, d_head);
  return q;
}

void ToySsm::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os.write(kMagic.data(), kMagic.size());
  write_pod<std::uint32_t>(os, kFormatVersion);
  write_pod<std::int32_t>(os, arch_.input.height);
  write_pod<std::int32_t>(os, arch_.input.width);
  write_pod<std::int32_t>(os, arch_.num_object_classes);
  write_pod<std::int32_t>(os, arch_.stage_kind == StageKind::kTwoStageRpn ? 1 : 0);
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(arch_.channels.size()));
  for (std::size_t i = 0; i < arch_.channels.size(); ++i) {
    write_pod<std::int32_t>(os, arch_.channels[i]);
    write_pod<std::int32_t>(os, arch_.strides[i]);
    write_pod<std::int32_t>(os, arch_.dilations[i]);
  }
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(arch_.anchor_sizes.size()));
  for (double a : arch_.anchor_sizes) write_pod<double>(os, a);
  write_pod<std::uint64_t>(os, seed_);
  for (const auto& l : layers_) {
    os.write(reinterpret_cast<const char*>(l.weight.data()), static_cast<std::streamsize>(l.weight.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(l.bias.data()), static_cast<std::streamsize>(l.bias.size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

ToySsm ToySsm::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw std::runtime_error(path.string() + " is not a toy SSM weight file");
  const auto version = read_pod<std::uint32_t>(is);
  if (version != kFormatVersion) {
    throw std::runtime_error("unsupported toy SSM weight file version " + std::to_string(version));
  }
  ToySsmArchitecture arch;
  arch.input.height = read_pod<std::int32_t>(is);
  arch.input.width = read_pod<std::int32_t>(is);
  arch.num_object_classes = read_pod<std::int32_t>(is);
  arch.stage_kind = read_pod<std::int32_t>(is) == 1 ? StageKind::kTwoStageRpn : StageKind::kSingleStage;
  const auto n_layers = read_pod<std::uint32_t>(is);
  if (n_layers == 0 || n_layers > 64) throw std::runtime_error("corrupt toy SSM header");
  arch.channels.clear();
  arch.strides.clear();
  arch.dilations.clear();
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    arch.channels.push_back(read_pod<std::int32_t>(is));
    arch.strides.push_back(read_pod<std::int32_t>(is));
    arch.dilations.push_back(read_pod<std::int32_t>(is));
  }
  const auto n_anchors = read_pod<std::uint32_t>(is);
  if (n_anchors == 0 || n_anchors > 64) throw std::runtime_error("corrupt toy SSM header");
  arch.anchor_sizes.clear();
  for (std::uint32_t i = 0; i < n_anchors; ++i) arch.anchor_sizes.push_back(read_pod<double>(is));
  ToySsm model(std::move(arch));
  model.seed_ = read_pod<std::uint64_t>(is);
  for (auto& l : model.layers_) {
    is.read(reinterpret_cast<char*>(l.weight.data()), static_cast<std::streamsize>(l.weight.size() * sizeof(double)));
    is.read(reinterpret_cast<char*>(l.bias.data()), static_cast<std::streamsize>(l.bias.size() * sizeof(double)));
  }
  if (!is) throw std::runtime_error("toy SSM weight file truncated");
  return model;
}

}  // namespace bgpatch
