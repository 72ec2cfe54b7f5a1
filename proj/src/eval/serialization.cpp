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

#include "bgpatch/eval/serialization.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace bgpatch {

using nlohmann::json;

namespace {

// JSON has no infinity; an unperturbed mask reports null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json patches_to_json(const PatchSet& patches) {
  json out = json::array();
  for (const Patch& p : patches.patches()) {
    out.push_back({{"group_id", p.group_id}, {"cx", p.box.cx()}, {"cy", p.box.cy()}, {"w", p.box.w()}, {"h", p.box.h()}});
  }
  return out;
}

PatchSet patches_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("patches: expected an array");
  PatchSet set;
  try {
    for (const json& p : j) {
      set.add({BoxCWH(p.at("cx").get<double>(), p.at("cy").get<double>(), p.at("w").get<double>(),
                      p.at("h").get<double>()),
               p.value("group_id", 0)});
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("patches: ") + e.what());
  }
  return set;
}

json to_json(const LossBreakdown& loss) {
  return {{"tpc", loss.tpc},
          {"tps", loss.tps},
          {"fpc", loss.fpc},
          {"total", loss.total},
          {"true_positives", loss.active_tp_count},
          {"false_positives", loss.active_fp_count}};
}

json to_json(const IterationRecord& rec) {
  json expansions = json::array();
  for (const ExpansionDecision& d : rec.expansions) {
    expansions.push_back({{"patch", d.patch_index}, {"direction", to_string(d.direction)}, {"gain", d.gain}});
  }
  json runner_up = json::array();
  for (const auto& [det, cls] : rec.runner_up) runner_up.push_back({det, cls});
  json fp_class = json::array();
  for (const auto& [det, cls] : rec.fp_class) fp_class.push_back({det, cls});
  return {{"iteration", rec.iteration},
          {"loss", to_json(rec.loss)},
          {"psnr", finite_or_null(rec.psnr)},
          {"patch_areas", rec.patch_areas},
          {"patches", patches_to_json(rec.patches)},
          {"expansions", expansions},
          {"runner_up", runner_up},
          {"fp_class", fp_class},
          {"update_norm", rec.update_norm},
          {"skipped", rec.skipped},
          {"rolled_back", rec.rolled_back}};
}

json summary_json(const AttackResult& result) {
  return {{"iterations_run", result.iterations_run},
          {"termination", to_string(result.termination)},
          {"final_psnr", finite_or_null(result.final_psnr)},
          {"placement_shortfall", result.placement_shortfall},
          {"patches", patches_to_json(result.patches)}};
}

void write_trace(std::ostream& out, const AttackResult& result) {
  for (const IterationRecord& rec : result.trace) out << to_json(rec).dump() << '\n';
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace bgpatch
