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

#include "bgpatch/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "bgpatch/eval/serialization.hpp"

namespace bgpatch {

using nlohmann::json;

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
}

std::string csv_optional(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream s;
  s << std::setprecision(10) << *v;
  return s.str();
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
constexpr double kWidth = 560;
constexpr double kHeight = 360;
constexpr double kLeft = 60;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 50;

void svg_frame(std::ostringstream& s, const std::string& title, const std::string& x_label,
               const std::string& y_label, double y_lo, double y_hi) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
    << "</text>\n";
  const double plot_h = kHeight - kTop - kBottom;
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kWidth - kRight << "\" y2=\""
    << kTop + plot_h << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
    << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = y_lo + (y_hi - y_lo) * k / 4.0;
    const double y = kTop + plot_h * (1.0 - k / 4.0);
    s << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << std::setprecision(3) << v
      << "</text>\n";
  }
  s << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
    << xml_escape(x_label) << "</text>\n";
  s << "<text transform=\"translate(16," << kTop + plot_h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << xml_escape(y_label) << "</text>\n";
}

}  // namespace

json to_json(const MapResult& m) {
  json classes = json::array();
  for (const ClassAp& c : m.per_class) {
    classes.push_back({{"label", c.label}, {"num_gt", c.num_gt}, {"num_detections", c.num_detections}, {"ap", c.ap}});
  }
  return {{"iou_threshold", m.iou_threshold}, {"map", m.map}, {"per_class", classes}};
}

json to_json(const EvalReport& r) {
  json j;
  j["metadata"] = r.metadata;
  auto maps = [](const std::vector<MapResult>& v) {
    json a = json::array();
    for (const MapResult& m : v) a.push_back(to_json(m));
    return a;
  };
  auto fps = [](const std::vector<FpCount>& v) {
    json a = json::array();
    for (const FpCount& f : v) a.push_back({{"score_threshold", f.score_threshold}, {"count", f.count}});
    return a;
  };
  j["clean"] = maps(r.clean);
  j["attacked"] = maps(r.attacked);
  j["clean_background_fps"] = fps(r.clean_fps);
  j["attacked_background_fps"] = fps(r.attacked_fps);
  if (r.psnr) {
    j["psnr"] = {{"count", r.psnr->count}, {"mean", r.psnr->mean}, {"min", r.psnr->min}, {"max", r.psnr->max}};
  }
  j["scale_groups"] = json::array();
  for (const ScaleGroupStat& s : r.scale_groups) {
    j["scale_groups"].push_back({{"group", "SG_" + std::to_string(s.group + 1)},
                                 {"objects", s.objects},
                                 {"min_area", s.min_area},
                                 {"max_area", s.max_area},
                                 {"clean_map", s.clean_map},
                                 {"attacked_map", s.attacked_map},
                                 {"relative_drop", s.relative_drop}});
  }
  j["distance_groups"] = json::array();
  for (const DistanceGroupStat& d : r.distance_groups) {
    j["distance_groups"].push_back({{"group", "DG_" + std::to_string(d.group + 1)},
                                    {"images", d.images},
                                    {"mean_distance", optional_json(d.mean_distance)},
                                    {"patches_per_object", optional_json(d.patches_per_object)}});
  }
  j["distance_sweep"] = json::array();
  for (const SweepPoint& p : r.distance_sweep) {
    j["distance_sweep"].push_back({{"distance", p.distance},
                                   {"feasible", p.feasible},
                                   {"attacked_images", p.attacked_images},
                                   {"map", p.feasible ? json(p.map) : json(nullptr)}});
  }
  j["notes"] = r.notes;
  return j;
}

std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir, const EvalReport& r) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    written.push_back(dir / name);
  };
  write_json(dir / "report.json", to_json(r));
  written.push_back(dir / "report.json");

  {
    std::ostringstream s;
    s << std::setprecision(10) << "set,iou_threshold,label,num_gt,num_detections,ap\n";
    auto rows = [&](const char* set, const std::vector<MapResult>& maps) {
      for (const MapResult& m : maps) {
        for (const ClassAp& c : m.per_class) {
          s << set << ',' << m.iou_threshold << ',' << c.label << ',' << c.num_gt << ',' << c.num_detections << ','
            << c.ap << '\n';
        }
        s << set << ',' << m.iou_threshold << ",mAP,,," << m.map << '\n';
      }
    };
    rows("clean", r.clean);
    rows("attacked", r.attacked);
    emit("map.csv", s.str());
  }
  if (!r.clean_fps.empty() || !r.attacked_fps.empty()) {
    std::ostringstream s;
    s << std::setprecision(10) << "set,score_threshold,background_fps\n";
    for (const FpCount& f : r.clean_fps) s << "clean," << f.score_threshold << ',' << f.count << '\n';
    for (const FpCount& f : r.attacked_fps) s << "attacked," << f.score_threshold << ',' << f.count << '\n';
    emit("false_positives.csv", s.str());
  }
  if (!r.scale_groups.empty()) {
    std::ostringstream s;
    s << std::setprecision(10) << "group,objects,min_area,max_area,clean_map,attacked_map,relative_drop\n";
    std::vector<std::string> names;
    std::vector<std::vector<double>> bars;
    for (const ScaleGroupStat& g : r.scale_groups) {
      s << "SG_" << g.group + 1 << ',' << g.objects << ',' << g.min_area << ',' << g.max_area << ',' << g.clean_map
        << ',' << g.attacked_map << ',' << g.relative_drop << '\n';
      names.push_back("SG_" + std::to_string(g.group + 1));
      bars.push_back({g.clean_map, g.attacked_map});
    }
    emit("scale_groups.csv", s.str());
    emit("scale_groups.svg", svg_bar_chart("mAP by object scale", names, {"clean", "attacked"}, bars));
  }
  if (!r.distance_groups.empty()) {
    std::ostringstream s;
    s << "group,images,mean_distance,patches_per_object\n";
    for (const DistanceGroupStat& d : r.distance_groups) {
      s << "DG_" << d.group + 1 << ',' << d.images << ',' << csv_optional(d.mean_distance) << ','
        << csv_optional(d.patches_per_object) << '\n';
    }
    emit("distance_groups.csv", s.str());
  }
  if (!r.distance_sweep.empty()) {
    std::ostringstream s;
    s << std::setprecision(10) << "distance,feasible,attacked_images,map\n";
    SvgSeries curve{"attacked", {}};
    for (const SweepPoint& p : r.distance_sweep) {
      s << p.distance << ',' << (p.feasible ? 1 : 0) << ',' << p.attacked_images << ',';
      if (p.feasible) {
        s << p.map;
        curve.points.emplace_back(p.distance, p.map);
      }
      s << '\n';
    }
    emit("distance_sweep.csv", s.str());
    emit("distance_sweep.svg", svg_line_chart("mAP vs patch distance", "distance / largest object side", "mAP",
                                              {curve}));
  }
  return written;
}

std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<SvgSeries>& series) {
  double x_lo = 0.0;
  double x_hi = 1.0;
  double y_hi = 1.0;
  bool first = true;
  for (const SvgSeries& s : series) {
    for (const auto& [x, y] : s.points) {
      if (first) x_lo = x_hi = x;
      first = false;
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_hi = std::max(y_hi, y);
    }
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  std::ostringstream s;
  svg_frame(s, title, x_label, y_label, 0.0, y_hi);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + plot_w * (x - x_lo) / (x_hi - x_lo); };
  auto py = [&](double y) { return kTop + plot_h * (1.0 - y / y_hi); };
  for (int k = 0; k <= 4; ++k) {
    const double v = x_lo + (x_hi - x_lo) * k / 4.0;
    s << "<text x=\"" << px(v) << "\" y=\"" << kTop + plot_h + 16 << "\" text-anchor=\"middle\">"
      << std::setprecision(3) << v << "</text>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : series[i].points) s << px(x) << ',' << py(y) << ' ';
    s << "\"/>\n";
    for (const auto& [x, y] : series[i].points) {
      s << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    s << "<text x=\"" << kWidth - kRight - 4 << "\" y=\"" << kTop + 14 * (i + 1) << "\" text-anchor=\"end\" fill=\""
      << color << "\">" << xml_escape(series[i].name) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& groups,
                          const std::vector<std::string>& series, const std::vector<std::vector<double>>& values) {
  double y_hi = 1.0;
  for (const auto& row : values) {
    for (double v : row) y_hi = std::max(y_hi, v);
  }
  std::ostringstream s;
  svg_frame(s, title, "", "mAP", 0.0, y_hi);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double slot = plot_w / std::max<std::size_t>(groups.size(), 1);
  const double bar = 0.8 * slot / std::max<std::size_t>(series.size(), 1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double x0 = kLeft + slot * g + 0.1 * slot;
    for (std::size_t k = 0; k < series.size() && k < values[g].size(); ++k) {
      const double h = plot_h * values[g][k] / y_hi;
      s << "<rect x=\"" << x0 + bar * k << "\" y=\"" << kTop + plot_h - h << "\" width=\"" << bar * 0.95
        << "\" height=\"" << h << "\" fill=\"" << kPalette[k % std::size(kPalette)] << "\"/>\n";
    }
    s << "<text x=\"" << kLeft + slot * (g + 0.5) << "\" y=\"" << kTop + plot_h + 16 << "\" text-anchor=\"middle\">"
      << xml_escape(groups[g]) << "</text>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    s << "<text x=\"" << kWidth - kRight - 4 << "\" y=\"" << kTop + 14 * (k + 1) << "\" text-anchor=\"end\" fill=\""
      << kPalette[k % std::size(kPalette)] << "\">" << xml_escape(series[k]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace bgpatch
