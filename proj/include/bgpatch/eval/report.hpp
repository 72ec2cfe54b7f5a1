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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bgpatch/eval/harness.hpp"

namespace bgpatch {

nlohmann::json to_json(const MapResult& m);
nlohmann::json to_json(const EvalReport& report);

/// Writes report.json plus one CSV per populated section into `dir`, and SVG
/// plots for the distance sweep and scale groups when present. Returns the
/// paths written.
std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir, const EvalReport& report);

struct SvgSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

/// Minimal static line chart.
std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<SvgSeries>& series);

/// Grouped bar chart; values[g][s] is the bar of series s in group g.
std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& groups,
                          const std::vector<std::string>& series, const std::vector<std::vector<double>>& values);

}  // namespace bgpatch
