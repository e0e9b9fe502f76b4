// Copyright 2026 The bidsim Authors.
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

#include "bidsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

namespace bidsim {

std::string runs_csv(std::span<const RunResult> runs) {
  std::string out(kRunsCsvHeader);
  out += '\n';
  std::vector<std::string> failed;
  for (const auto& r : runs) {
    out += fmt::format("{},{},{},{},{},{:.3f},{:.6f},{:.6f},{:.6f},{},{}\n", r.k, r.seed, to_string(r.mode), r.n,
                       r.m, r.delta_t, r.taus.cfp, r.taus.mes, r.taus.s,
                       r.taus.c ? fmt::format("{:.6f}", *r.taus.c) : std::string{}, r.total_frames);
    if (!r.balanced) failed.push_back(fmt::format("k={}/seed={}", r.k, r.seed));
  }
  if (!failed.empty()) out += fmt::format("# FAILED {} run(s) did not balance: {}\n", failed.size(), fmt::join(failed, " "));
  return out;
}

std::string aggregate_csv(std::span<const AggregateResult> rows) {
  std::string out(kAggregateCsvHeader);
  out += '\n';
  for (const auto& a : rows) {
    std::string c_mean, c_sd;
    if (a.tau_c) {
      c_mean = fmt::format("{:.6f}", a.tau_c->mean);
      c_sd = fmt::format("{:.6f}", a.tau_c->sd);
    }
    out += fmt::format("{},{:.6f},{:.3f},{:.3f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{}\n", a.k,
                       a.psi_vs_baseline, a.delta_t.mean, a.delta_t.sd, a.tau_cfp.mean, a.tau_cfp.sd, a.tau_mes.mean,
                       a.tau_mes.sd, a.tau_s.mean, a.tau_s.sd, c_mean, c_sd);
  }
  return out;
}

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 50;

struct Series {
  std::string name;
  std::string color;
  std::vector<std::pair<int, double>> points;  // (k, value)
};

class Plot {
 public:
  Plot(std::string title, std::string y_label, std::span<const AggregateResult> rows, bool log_y)
      : title_(std::move(title)), y_label_(std::move(y_label)), log_y_(log_y) {
    for (const auto& a : rows) ks_.push_back(a.k);
  }

  void add(Series s) { series_.push_back(std::move(s)); }

  std::string render() {
    double x_lo = 0, x_hi = 1;
    if (!ks_.empty()) {
      x_lo = std::log2(*std::min_element(ks_.begin(), ks_.end()));
      x_hi = std::log2(*std::max_element(ks_.begin(), ks_.end()));
    }
    if (x_hi <= x_lo) x_hi = x_lo + 1;

    std::vector<double> ys;
    for (const auto& s : series_) {
      for (const auto& [k, v] : s.points) {
        if (!log_y_ || v > 0) ys.push_back(log_y_ ? std::log10(v) : v);
      }
    }
    double y_lo = 0, y_hi = 1;
    if (!ys.empty()) {
      y_lo = *std::min_element(ys.begin(), ys.end());
      y_hi = *std::max_element(ys.begin(), ys.end());
    }
    if (log_y_) {
      y_lo = std::floor(y_lo);
      y_hi = std::ceil(y_hi);
    } else {
      y_lo = std::min(0.0, y_lo);
      y_hi = std::max(y_hi * 1.05, y_lo + 1e-9);
    }
    if (y_hi <= y_lo) y_hi = y_lo + 1;

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto py = [&](double y) { return kTop + ph - (y - y_lo) / (y_hi - y_lo) * ph; };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{2}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{3}</text>\n",
        kWidth, kHeight, kLeft + pw / 2, title_);
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
                       kTop, pw, ph);

    for (int k : ks_) {
      const double x = px(std::log2(k));
      svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#ddd\"/>\n", x, kTop,
                         kTop + ph);
      svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", x, kTop + ph + 16, k);
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">k (log2 scale)</text>\n", kLeft + pw / 2,
                       kHeight - 10);

    const int ticks = log_y_ ? static_cast<int>(y_hi - y_lo) : 5;
    for (int i = 0; i <= ticks; ++i) {
      const double y = y_lo + (y_hi - y_lo) * i / ticks;
      const std::string label = log_y_ ? fmt::format("{:g}", std::pow(10.0, y)) : fmt::format("{:.2f}", y);
      svg += fmt::format("<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#eee\"/>\n", kLeft, py(y),
                         kLeft + pw);
      svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", kLeft - 6, py(y) + 4, label);
    }
    svg += fmt::format("<text x=\"16\" y=\"{0}\" transform=\"rotate(-90 16 {0})\" text-anchor=\"middle\">{1}</text>\n",
                       kTop + ph / 2, y_label_);

    for (std::size_t si = 0; si < series_.size(); ++si) {
      const auto& s = series_[si];
      std::string pts;
      for (const auto& [k, v] : s.points) {
        if (log_y_ && v <= 0) continue;
        const double x = px(std::log2(k));
        const double y = py(log_y_ ? std::log10(v) : v);
        pts += fmt::format("{:.2f},{:.2f} ", x, y);
        svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", x, y, s.color);
      }
      svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", pts, s.color);
      const double ly = kTop + 10 + 18 * static_cast<double>(si);
      svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                         kLeft + pw + 12, ly, kLeft + pw + 32, s.color);
      svg += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", kLeft + pw + 38, ly + 4, s.name);
    }
    svg += "</svg>\n";
    return svg;
  }

 private:
  std::string title_;
  std::string y_label_;
  bool log_y_;
  std::vector<int> ks_;
  std::vector<Series> series_;
};

}  // namespace

std::string psi_svg(std::span<const AggregateResult> rows) {
  Plot plot("Scalability metric over k", "psi", rows, false);
  Series psi{"psi", "#1f77b4", {}};
  for (const auto& a : rows) psi.points.emplace_back(a.k, a.psi_vs_baseline);
  plot.add(std::move(psi));
  return plot.render();
}

std::string tau_svg(std::span<const AggregateResult> rows) {
  Plot plot("Negotiation metrics over k", "mean value (log10 scale)", rows, true);
  Series cfp{"tau_cfp", "#1f77b4", {}};
  Series mes{"tau_mes", "#d62728", {}};
  Series s{"tau_s", "#2ca02c", {}};
  Series c{"tau_c", "#9467bd", {}};
  for (const auto& a : rows) {
    cfp.points.emplace_back(a.k, a.tau_cfp.mean);
    mes.points.emplace_back(a.k, a.tau_mes.mean);
    s.points.emplace_back(a.k, a.tau_s.mean);
    if (a.tau_c) c.points.emplace_back(a.k, a.tau_c->mean);
  }
  plot.add(std::move(cfp));
  plot.add(std::move(mes));
  plot.add(std::move(s));
  plot.add(std::move(c));
  return plot.render();
}

std::string run_metadata_json(const ExperimentManifest& manifest, std::size_t runs, std::size_t failed) {
  nlohmann::ordered_json meta;
  meta["runs"] = runs;
  meta["failed_runs"] = failed;
  meta["rng"] = fmt::format("splitmix64+mt19937_64 v{}", RandomStream::kVersion);
  meta["time_unit"] = "virtual milliseconds";
  meta["tau_c_normalization"] = std::string(to_string(manifest.cost_normalization));
  meta["tau_c_definitions"] = {
      {"per_success", "sum of realised costs over successful requests / number of successful requests"},
      {"printed", "sum of realised costs over successful requests / success rate"},
  };
  meta["psi"] = "mean delta_t at baseline k over mean delta_t at k, scaled by (n2*m1)/(n1*m2)";
  meta["manifest"] = nlohmann::ordered_json::parse(manifest_to_json(manifest));
  return meta.dump(2) + "\n";
}

}  // namespace bidsim
