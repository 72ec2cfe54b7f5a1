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

#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using namespace bgpatch::cli;

void add_data_options(CLI::App* app, DataOptions& d) {
  app->add_option("--annotations", d.annotations, "COCO-style annotation JSON")->required();
  app->add_option("--images", d.image_root, "image directory (default: next to the annotations)");
  app->add_option("--limit", d.limit, "random subset of this many images (0 = all)");
  app->add_option("--subsample-seed", d.subsample_seed, "seed of the random subset");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Background patch attacks on single-shot object detectors"};
  app.set_config("--config", "", "flat key=value file; subcommand keys go under [attack] etc.");
  app.require_subcommand(1);

  AttackOptions attack;
  auto* a = app.add_subcommand("attack", "optimize background patches and report mAP before/after");
  add_data_options(a, attack.data);
  a->add_option("--model", attack.model, "detector weights")->required();
  a->add_option("--out", attack.out, "output directory")->required();
  a->add_option("--losses", attack.losses, "loss terms joined by '+': tpc, tps, fpc");
  a->add_option("--target-class", attack.target_class, "class forced onto false positives");
  a->add_flag("--pseudo-gt", attack.pseudo_gt, "attack the clean detections instead of the annotations");
  a->add_option("--lambda", attack.lambda, "L2 norm of each update");
  a->add_option("--max-iter", attack.max_iter, "iteration cap");
  a->add_option("--psnr-floor", attack.psnr_floor, "PSNR bound in dB over the patches");
  a->add_option("--image-format", attack.image_format, "png, ppm or pfm")->check(CLI::IsMember({"png", "ppm", "pfm"}));
  a->add_flag("!--no-trace", attack.write_trace, "skip per-iteration trace files");
  a->add_option("--threads", attack.threads, "parallel images")->check(CLI::PositiveNumber);

  BaselineOptions baseline;
  auto* b = app.add_subcommand("baseline", "PSNR-matched random noise in the patches of an attack run");
  add_data_options(b, baseline.data);
  b->add_option("--attack-dir", baseline.attack_dir, "output directory of `attack`")->required();
  b->add_option("--out", baseline.out, "output directory")->required();
  b->add_option("--model", baseline.model, "evaluate the noisy images with this detector");
  b->add_option("--seed", baseline.seed, "noise seed");
  b->add_option("--image-format", baseline.image_format, "png, ppm or pfm")
      ->check(CLI::IsMember({"png", "ppm", "pfm"}));
  b->add_option("--threads", baseline.threads, "parallel images")->check(CLI::PositiveNumber);

  EvalOptions eval;
  auto* e = app.add_subcommand("eval", "mAP and false-positive report");
  add_data_options(e, eval.data);
  e->add_option("--model", eval.model, "detector weights")->required();
  e->add_option("--adversarial-dir", eval.adversarial_dir, "evaluate the images of an attack or baseline run");
  e->add_option("--out", eval.out, "output directory")->required();
  e->add_option("--threads", eval.threads, "parallel images")->check(CLI::PositiveNumber);

  TransferOptions transfer;
  auto* t = app.add_subcommand("transfer", "replay an attack's patches against another detector");
  add_data_options(t, transfer.data);
  t->add_option("--attack-dir", transfer.attack_dir, "output directory of `attack`")->required();
  t->add_option("--model", transfer.model, "detector to evaluate")->required();
  t->add_option("--out", transfer.out, "output directory")->required();
  t->add_option("--threads", transfer.threads, "parallel images")->check(CLI::PositiveNumber);

  AblateOptions ablate;
  auto* ab = app.add_subcommand("ablate", "distance sweep, scale groups and distance groups");
  add_data_options(ab, ablate.data);
  ab->add_option("--model", ablate.model, "detector weights")->required();
  ab->add_option("--out", ablate.out, "output directory")->required();
  ab->add_option("--study", ablate.study, "distance-sweep, scale-groups, distance-groups or all")
      ->check(CLI::IsMember({"distance-sweep", "scale-groups", "distance-groups", "all"}));
  ab->add_option("--distances", ablate.distances, "normalized patch distances in [0, 1]")->delimiter(',');
  ab->add_option("--losses", ablate.losses, "loss terms for the group studies");
  ab->add_option("--threads", ablate.threads, "parallel images")->check(CLI::PositiveNumber);

  ToyTrainOptions train;
  auto* tt = app.add_subcommand("toy-train", "train the toy detector on synthetic scenes");
  tt->add_option("--out", train.out, "weight file to write")->required();
  tt->add_option("--seed", train.seed, "initialization and data seed");
  tt->add_option("--steps", train.steps, "optimizer steps")->check(CLI::PositiveNumber);
  tt->add_flag("--rpn", train.rpn, "class-agnostic proposal variant");
  tt->add_option("--data-out", train.data_out, "also write a synthetic evaluation set here");
  tt->add_option("--data-count", train.data_count, "images in the evaluation set");
  tt->add_option("--data-seed", train.data_seed, "seed of the evaluation set");
  tt->add_flag("--quiet", train.quiet, "no progress output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (a->parsed()) return run_attack_command(attack);
    if (b->parsed()) return run_baseline_command(baseline);
    if (e->parsed()) return run_eval_command(eval);
    if (t->parsed()) return run_transfer_command(transfer);
    if (ab->parsed()) return run_ablate_command(ablate);
    if (tt->parsed()) return run_toy_train_command(train);
  } catch (const std::exception& ex) {
    std::cerr << "bgpatch: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
