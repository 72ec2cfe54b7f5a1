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
#include <optional>
#include <string>
#include <vector>

namespace bgpatch::cli {

namespace fs = std::filesystem;

/// Where images and their annotations come from.
struct DataOptions {
  fs::path annotations;
  fs::path image_root;  // defaults to the directory holding the annotations
  std::size_t limit = 0;  // 0 keeps every image
  std::uint64_t subsample_seed = 0;
};

struct AttackOptions {
  DataOptions data;
  fs::path model;
  fs::path out;
  std::string losses = "tpc+tps+fpc";
  std::optional<int> target_class;
  bool pseudo_gt = false;
  double lambda = 30.0;
  int max_iter = 250;
  std::optional<double> psnr_floor;  // default follows the detector stage
  std::string image_format = "png";
  bool write_trace = true;
  int threads = 1;
};

struct BaselineOptions {
  DataOptions data;
  fs::path attack_dir;  // output of `attack`
  fs::path out;
  std::optional<fs::path> model;  // evaluate the noisy images when given
  std::uint64_t seed = 0;
  std::string image_format = "png";
  int threads = 1;
};

struct EvalOptions {
  DataOptions data;
  fs::path model;
  std::optional<fs::path> adversarial_dir;  // evaluate these instead of the clean images
  fs::path out;
  int threads = 1;
};

struct TransferOptions {
  DataOptions data;
  fs::path attack_dir;
  fs::path model;  // detector the replayed patches are evaluated on
  fs::path out;
  int threads = 1;
};

struct AblateOptions {
  DataOptions data;
  fs::path model;
  fs::path out;
  std::string study = "all";  // distance-sweep, scale-groups, distance-groups or all
  std::vector<double> distances{0.0, 0.25, 0.5, 0.75, 1.0};
  std::string losses = "tpc+tps+fpc";
  int threads = 1;
};

struct ToyTrainOptions {
  fs::path out;
  std::uint64_t seed = 1;
  int steps = 1500;
  bool rpn = false;
  std::optional<fs::path> data_out;  // also write a synthetic evaluation set
  int data_count = 100;
  std::uint64_t data_seed = 1000;
  bool quiet = false;
};

int run_attack_command(const AttackOptions& o);
int run_baseline_command(const BaselineOptions& o);
int run_eval_command(const EvalOptions& o);
int run_transfer_command(const TransferOptions& o);
int run_ablate_command(const AblateOptions& o);
int run_toy_train_command(const ToyTrainOptions& o);

}  // namespace bgpatch::cli
