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

#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bgpatch/attack/attack.hpp"
#include "bgpatch/detector/toy_ssm.hpp"
#include "bgpatch/detector/toy_training.hpp"
#include "bgpatch/eval/dataset.hpp"
#include "bgpatch/eval/harness.hpp"
#include "bgpatch/eval/image_io.hpp"
#include "bgpatch/eval/report.hpp"
#include "bgpatch/eval/serialization.hpp"

namespace bgpatch::cli {

using nlohmann::json;

namespace {

constexpr const char* kRunsFile = "runs.json";

struct LoadedData {
  Dataset dataset;
  std::vector<LabeledImage> images;
};

LoadedData load_data(const DataOptions& o, const DetectorMetadata& meta) {
  const fs::path root = o.image_root.empty() ? o.annotations.parent_path() : o.image_root;
  LoadedData d;
  d.dataset = ingest_annotations(o.annotations, root);
  if (o.limit > 0) d.dataset = subsample(d.dataset, o.limit, o.subsample_seed);
  std::vector<std::string> errors = d.dataset.errors;
  d.images = load_images(d.dataset, root, errors);
  for (const std::string& e : errors) std::cerr << "warning: " << e << '\n';
  const bool rpn = meta.stage_kind == StageKind::kTwoStageRpn;
  if (!rpn && d.dataset.num_classes() != meta.num_object_classes) {
    throw std::runtime_error("dataset has " + std::to_string(d.dataset.num_classes()) + " categories, detector " +
                             std::to_string(meta.num_object_classes));
  }
  for (LabeledImage& im : d.images) {
    if (rpn) std::fill(im.gt.labels.begin(), im.gt.labels.end(), 1);
    if (!(im.image.dims() == meta.input_dims)) {
      throw std::runtime_error(im.name + ": image size differs from the detector input");
    }
  }
  return d;
}

std::string stem_of(const std::string& file_name) { return fs::path(file_name).stem().string(); }

EvalConfig eval_config(int threads) {
  EvalConfig cfg;
  cfg.num_threads = threads;
  cfg.validate();
  return cfg;
}

void print_summary(const EvalReport& rep) {
  for (std::size_t k = 0; k < rep.clean.size(); ++k) {
    std::cout << "mAP@" << rep.clean[k].iou_threshold << "  clean " << rep.clean[k].map;
    if (k < rep.attacked.size()) {
      std::cout << "  attacked " << rep.attacked[k].map << "  drop "
                << 100.0 * relative_drop(rep.clean[k].map, rep.attacked[k].map) << "%";
    }
    std::cout << '\n';
  }
  if (rep.psnr) std::cout << "PSNR mean " << rep.psnr->mean << " dB, min " << rep.psnr->min << " dB\n";
}

struct RunEntry {
  std::string file_name;
  fs::path image;
  PatchSet patches;
  double final_psnr = 0.0;
};

std::vector<RunEntry> read_runs(const fs::path& dir) {
  const json runs = read_json(dir / kRunsFile);
  std::vector<RunEntry> out;
  for (const json& r : runs) {
    RunEntry e;
    e.file_name = r.at("file_name").get<std::string>();
    e.image = dir / r.at("image").get<std::string>();
    e.patches = patches_from_json(r.at("patches"));
    e.final_psnr = r.at("final_psnr").is_null() ? std::numeric_limits<double>::infinity()
                                                : r.at("final_psnr").get<double>();
    out.push_back(std::move(e));
  }
  return out;
}

std::map<std::string, RunEntry> runs_by_file(const fs::path& dir) {
  std::map<std::string, RunEntry> out;
  for (RunEntry& e : read_runs(dir)) out.emplace(e.file_name, std::move(e));
  return out;
}

const RunEntry& run_for(const std::map<std::string, RunEntry>& runs, const std::string& file_name) {
  const auto it = runs.find(file_name);
  if (it == runs.end()) throw std::runtime_error(file_name + ": not part of the run directory");
  return it->second;
}

}  // namespace

int run_attack_command(const AttackOptions& o) {
  const ToySsm model = ToySsm::load(o.model);
  const LoadedData data = load_data(o.data, model.metadata());
  AttackConfig cfg = AttackConfig::for_detector(model.metadata());
  cfg.loss_weights = parse_loss_combo(o.losses);
  cfg.loss_weights.target_class = o.target_class;
  cfg.pseudo_gt = o.pseudo_gt;
  cfg.lambda = o.lambda;
  cfg.max_iter = o.max_iter;
  if (o.psnr_floor) cfg.psnr_floor = *o.psnr_floor;
  cfg.validate();

  const std::vector<AttackResult> results = attack_all(model, data.images, cfg, o.threads);
  fs::create_directories(o.out / "images");
  fs::create_directories(o.out / "patches");
  if (o.write_trace) fs::create_directories(o.out / "traces");
  json runs = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const std::string stem = stem_of(data.images[i].name);
    const fs::path image = fs::path("images") / (stem + "." + o.image_format);
    write_image(o.out / image, results[i].adversarial_image);
    write_json(o.out / "patches" / (stem + ".json"), patches_to_json(results[i].patches));
    if (o.write_trace) {
      std::ofstream trace(o.out / "traces" / (stem + ".jsonl"));
      write_trace(trace, results[i]);
    }
    json entry = summary_json(results[i]);
    entry["file_name"] = data.images[i].name;
    entry["image"] = image.string();
    runs.push_back(entry);
  }
  write_json(o.out / kRunsFile, runs);

  const EvalConfig ecfg = eval_config(o.threads);
  const Detections clean = detect_all(model, clean_images(data.images), ecfg.postprocess, o.threads);
  const Detections attacked = detect_all(model, adversarial_images(results), ecfg.postprocess, o.threads);
  EvalReport rep = attack_report(data.images, clean, attacked, results, model.metadata().num_object_classes, ecfg);
  rep.metadata["losses"] = loss_combo_name(cfg.loss_weights);
  rep.metadata["lambda"] = std::to_string(cfg.lambda);
  rep.metadata["psnr_floor"] = std::to_string(cfg.psnr_floor);
  rep.metadata["pseudo_gt"] = cfg.pseudo_gt ? "true" : "false";
  write_report(o.out / "report", rep);
  print_summary(rep);
  return 0;
}

int run_baseline_command(const BaselineOptions& o) {
  const std::map<std::string, RunEntry> runs = runs_by_file(o.attack_dir);
  DetectorMetadata meta;
  std::optional<ToySsm> model;
  if (o.model) {
    model = ToySsm::load(*o.model);
    meta = model->metadata();
  }
  const fs::path root = o.data.image_root.empty() ? o.data.annotations.parent_path() : o.data.image_root;
  Dataset ds = ingest_annotations(o.data.annotations, root);
  if (o.data.limit > 0) ds = subsample(ds, o.data.limit, o.data.subsample_seed);
  std::vector<std::string> errors = ds.errors;
  std::vector<LabeledImage> images = load_images(ds, root, errors);
  for (const std::string& e : errors) std::cerr << "warning: " << e << '\n';

  fs::create_directories(o.out / "images");
  json out_runs = json::array();
  std::vector<ImageBuffer> noisy;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const RunEntry& run = run_for(runs, images[i].name);
    BaselineResult r{images[i].image, run.final_psnr, 0.0, true};
    if (!run.patches.empty() && std::isfinite(run.final_psnr)) {
      r = random_baseline(images[i].image, run.patches, run.final_psnr, o.seed + i);
    }
    const fs::path image = fs::path("images") / (stem_of(images[i].name) + "." + o.image_format);
    write_image(o.out / image, r.image);
    out_runs.push_back({{"file_name", images[i].name},
                        {"image", image.string()},
                        {"patches", patches_to_json(run.patches)},
                        {"target_psnr", std::isfinite(run.final_psnr) ? json(run.final_psnr) : json(nullptr)},
                        {"final_psnr", std::isfinite(r.achieved_psnr) ? json(r.achieved_psnr) : json(nullptr)},
                        {"sigma", r.sigma},
                        {"reached_target", r.reached_target}});
    noisy.push_back(std::move(r.image));
  }
  write_json(o.out / kRunsFile, out_runs);

  if (model) {
    const EvalConfig ecfg = eval_config(o.threads);
    const std::vector<GroundTruth> gts = ground_truths(images);
    EvalReport rep;
    rep.metadata["ap_interpolation"] = "all-point";
    rep.metadata["experiment"] = "random baseline";
    rep.clean = evaluate_maps(detect_all(*model, clean_images(images), ecfg.postprocess, o.threads), gts,
                              meta.num_object_classes, ecfg);
    rep.attacked = evaluate_maps(detect_all(*model, noisy, ecfg.postprocess, o.threads), gts,
                                 meta.num_object_classes, ecfg);
    write_report(o.out / "report", rep);
    print_summary(rep);
  }
  return 0;
}

int run_eval_command(const EvalOptions& o) {
  const ToySsm model = ToySsm::load(o.model);
  const LoadedData data = load_data(o.data, model.metadata());
  const EvalConfig ecfg = eval_config(o.threads);
  std::vector<ImageBuffer> images = clean_images(data.images);
  if (o.adversarial_dir) {
    const std::map<std::string, RunEntry> runs = runs_by_file(*o.adversarial_dir);
    for (std::size_t i = 0; i < images.size(); ++i) images[i] = read_image(run_for(runs, data.images[i].name).image);
  }
  const std::vector<GroundTruth> gts = ground_truths(data.images);
  const Detections dets = detect_all(model, images, ecfg.postprocess, o.threads);
  EvalReport rep;
  rep.metadata["ap_interpolation"] = "all-point";
  rep.metadata["images"] = std::to_string(images.size());
  rep.metadata["source"] = o.adversarial_dir ? o.adversarial_dir->string() : "clean";
  rep.clean = evaluate_maps(dets, gts, model.metadata().num_object_classes, ecfg);
  rep.clean_fps = background_fp_sweep(dets, gts, ecfg);
  write_report(o.out, rep);
  print_summary(rep);
  return 0;
}

int run_transfer_command(const TransferOptions& o) {
  const ToySsm model = ToySsm::load(o.model);
  const LoadedData data = load_data(o.data, model.metadata());
  const std::map<std::string, RunEntry> runs = runs_by_file(o.attack_dir);
  std::vector<ImageBuffer> replayed;
  for (const LabeledImage& im : data.images) {
    const RunEntry& run = run_for(runs, im.name);
    AttackResult source;
    source.adversarial_image = read_image(run.image);
    source.patches = run.patches;
    replayed.push_back(replay_patches(im.image, run.patches, source));
  }
  const EvalConfig ecfg = eval_config(o.threads);
  const std::vector<GroundTruth> gts = ground_truths(data.images);
  EvalReport rep;
  rep.metadata["ap_interpolation"] = "all-point";
  rep.metadata["experiment"] = "transfer";
  rep.metadata["source_run"] = o.attack_dir.string();
  rep.metadata["target_model"] = o.model.string();
  const int classes = model.metadata().num_object_classes;
  const Detections clean = detect_all(model, clean_images(data.images), ecfg.postprocess, o.threads);
  const Detections attacked = detect_all(model, replayed, ecfg.postprocess, o.threads);
  rep.clean = evaluate_maps(clean, gts, classes, ecfg);
  rep.attacked = evaluate_maps(attacked, gts, classes, ecfg);
  rep.clean_fps = background_fp_sweep(clean, gts, ecfg);
  rep.attacked_fps = background_fp_sweep(attacked, gts, ecfg);
  write_report(o.out, rep);
  print_summary(rep);
  return 0;
}

int run_ablate_command(const AblateOptions& o) {
  const ToySsm model = ToySsm::load(o.model);
  const LoadedData data = load_data(o.data, model.metadata());
  const EvalConfig ecfg = eval_config(o.threads);
  AttackConfig cfg = AttackConfig::for_detector(model.metadata());
  cfg.loss_weights = parse_loss_combo(o.losses);
  EvalReport rep;
  rep.metadata["ap_interpolation"] = "all-point";
  rep.metadata["study"] = o.study;
  const bool all = o.study == "all";
  if (all || o.study == "distance-sweep") {
    rep.distance_sweep = distance_sweep(model, data.images, cfg, o.distances, ecfg);
    rep.metadata["distance_sweep_losses"] = "tpc+tps";
  }
  if (all || o.study == "scale-groups" || o.study == "distance-groups") {
    const std::vector<AttackResult> results = attack_all(model, data.images, cfg, o.threads);
    const Detections clean = detect_all(model, clean_images(data.images), ecfg.postprocess, o.threads);
    const Detections attacked = detect_all(model, adversarial_images(results), ecfg.postprocess, o.threads);
    rep.metadata["losses"] = loss_combo_name(cfg.loss_weights);
    if (all || o.study == "scale-groups") {
      rep.scale_groups = scale_group_breakdown(ground_truths(data.images), clean, attacked,
                                               ecfg.iou_thresholds.front(), model.metadata().num_object_classes,
                                               ecfg.scale_group_count);
    }
    if (all || o.study == "distance-groups") {
      rep.distance_groups = distance_group_breakdown(data.images, results, ecfg.distance_group_count);
      rep.notes.push_back(
          "patches_per_object counts every placed patch; no per-object success criterion is applied");
    }
  }
  write_report(o.out, rep);
  for (const SweepPoint& p : rep.distance_sweep) {
    std::cout << "distance " << p.distance << ": "
              << (p.feasible ? "mAP " + std::to_string(p.map) : std::string("infeasible")) << '\n';
  }
  for (const ScaleGroupStat& s : rep.scale_groups) {
    std::cout << "SG_" << s.group + 1 << ": drop " << 100.0 * s.relative_drop << "%\n";
  }
  for (const DistanceGroupStat& d : rep.distance_groups) {
    std::cout << "DG_" << d.group + 1 << ": patches/object " << d.patches_per_object.value_or(0.0) << '\n';
  }
  return 0;
}

int run_toy_train_command(const ToyTrainOptions& o) {
  ToyTrainConfig cfg;
  cfg.seed = o.seed;
  cfg.steps = o.steps;
  if (o.rpn) cfg.arch.stage_kind = StageKind::kTwoStageRpn;
  const ToySsm model = train_toy_ssm(cfg, [&](const TrainProgress& p) {
    if (!o.quiet && (p.step % 100 == 0 || p.step + 1 == cfg.steps)) {
      std::cout << "step " << p.step << "  loss " << p.loss << "  class " << p.class_loss << "  box " << p.box_loss
                << '\n';
    }
  });
  if (o.out.has_parent_path()) fs::create_directories(o.out.parent_path());
  model.save(o.out);

  if (o.data_out) {
    fs::create_directories(*o.data_out / "images");
    Dataset ds;
    ds.categories = {{1, "warm_rectangle"}, {2, "cool_ellipse"}, {3, "cool_rectangle"}};
    const std::vector<SyntheticSample> set = generate_synthetic_set(cfg.data, o.data_seed, o.data_count);
    for (std::size_t i = 0; i < set.size(); ++i) {
      const std::string name = "images/" + std::to_string(i) + ".pfm";
      write_image(*o.data_out / name, set[i].image);
      ds.items.push_back({static_cast<std::int64_t>(i), name, cfg.data.dims.width, cfg.data.dims.height, set[i].gt});
    }
    write_annotations(*o.data_out / "annotations.json", ds);
  }
  return 0;
}

}  // namespace bgpatch::cli
