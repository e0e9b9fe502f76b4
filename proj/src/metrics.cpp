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

#include "bidsim/metrics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace bidsim {

std::string_view to_string(CostNormalization normalization) {
  return normalization == CostNormalization::PerSuccess ? "per_success" : "printed";
}

std::optional<CostNormalization> parse_cost_normalization(std::string_view text) {
  if (text == "per_success") return CostNormalization::PerSuccess;
  if (text == "printed") return CostNormalization::Printed;
  return std::nullopt;
}

Taus compute_taus(std::span<const RequesterRecord> requesters, std::span<const ProviderRecord> providers,
                  CostNormalization normalization) {
  Taus t;
  const auto n = static_cast<double>(requesters.size());
  const auto m = static_cast<double>(providers.size());

  double cfp = 0.0;
  double sr_mes = 0.0;
  double cost_sum = 0.0;
  int successes = 0;
  for (const auto& r : requesters) {
    cfp += r.cfp_count;
    sr_mes += static_cast<double>(r.messages_sent);
    if (r.success) {
      ++successes;
      cost_sum += r.cost.value_or(0.0);
    }
  }
  double sp_mes = 0.0;
  for (const auto& p : providers) sp_mes += static_cast<double>(p.messages_sent);

  if (n > 0) {
    t.cfp = cfp / n;
    t.s = successes / n;
  }
  t.mes = (m > 0 ? sp_mes / m : 0.0) + (n > 0 ? sr_mes / n : 0.0);
  if (successes > 0) {
    t.c = normalization == CostNormalization::PerSuccess ? cost_sum / successes : cost_sum / t.s;
  }
  return t;
}

double compute_psi(double lambda1, double cost1, double qos1, double lambda2, double cost2, double qos2) {
  if (!(lambda1 > 0 && cost1 > 0 && qos1 > 0 && lambda2 > 0 && cost2 > 0 && qos2 > 0)) {
    throw std::invalid_argument("compute_psi: all arguments must be positive");
  }
  return (lambda2 * cost1 * qos1) / (lambda1 * cost2 * qos2);
}

MeanSd mean_sd(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean_sd: empty sample");
  double sum = 0.0;
  for (double v : values) sum += v;
  MeanSd r;
  r.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return r;
}

std::vector<AggregateResult> aggregate(std::span<const RunResult> runs, int baseline_k) {
  if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
  std::map<int, std::vector<const RunResult*>> by_k;
  for (const auto& r : runs) by_k[r.k].push_back(&r);
  if (!by_k.contains(baseline_k)) throw std::invalid_argument("aggregate: baseline k has no runs");

  std::vector<AggregateResult> out;
  for (const auto& [k, group] : by_k) {
    std::vector<double> dt, cfp, mes, s, c;
    for (const auto* r : group) {
      dt.push_back(r->delta_t);
      cfp.push_back(r->taus.cfp);
      mes.push_back(r->taus.mes);
      s.push_back(r->taus.s);
      if (r->taus.c) c.push_back(*r->taus.c);
    }
    AggregateResult a;
    a.k = k;
    a.runs = static_cast<int>(group.size());
    a.delta_t = mean_sd(dt);
    a.tau_cfp = mean_sd(cfp);
    a.tau_mes = mean_sd(mes);
    a.tau_s = mean_sd(s);
    if (!c.empty()) a.tau_c = mean_sd(c);
    out.push_back(a);
  }

  const auto& base_group = by_k.at(baseline_k);
  const double base_n = base_group.front()->n;
  const double base_m = base_group.front()->m;
  double base_dt = 0.0;
  for (const auto& a : out) {
    if (a.k == baseline_k) base_dt = a.delta_t.mean;
  }
  for (auto& a : out) {
    const auto* first = by_k.at(a.k).front();
    if (a.k == baseline_k) {
      a.psi_vs_baseline = 1.0;
    } else if (base_dt > 0 && a.delta_t.mean > 0 && first->n > 0 && first->m > 0 && base_n > 0 && base_m > 0) {
      a.psi_vs_baseline = compute_psi(base_n, base_m, base_dt, first->n, first->m, a.delta_t.mean);
    } else {
      a.psi_vs_baseline = 0.0;
    }
  }
  return out;
}

}  // namespace bidsim
