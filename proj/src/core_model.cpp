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

#include "bidsim/core_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace bidsim {

ServiceTag ServiceTag::from_index(int index) {
  if (index < 0) throw std::invalid_argument("service index must be non-negative");
  if (index < 26) return ServiceTag(std::string(1, static_cast<char>('A' + index)));
  return ServiceTag("S" + std::to_string(index));
}

std::vector<ServiceTag> service_alphabet(int size) {
  std::vector<ServiceTag> tags;
  tags.reserve(static_cast<std::size_t>(std::max(size, 0)));
  for (int i = 0; i < size; ++i) tags.push_back(ServiceTag::from_index(i));
  return tags;
}

bool in_alphabet(const ServiceTag& tag, int alphabet_size) {
  for (int i = 0; i < alphabet_size; ++i) {
    if (ServiceTag::from_index(i) == tag) return true;
  }
  return false;
}

bool ProviderProfile::offers(const ServiceTag& service) const {
  return std::find(capabilities.begin(), capabilities.end(), service) != capabilities.end();
}

void validate(const ProviderProfile& sp, int alphabet_size) {
  if (sp.aas_id.empty()) throw std::invalid_argument("provider aas_id is empty");
  if (sp.capabilities.empty() || static_cast<int>(sp.capabilities.size()) > alphabet_size) {
    throw std::invalid_argument("provider " + sp.aas_id + ": capability count out of range");
  }
  for (const auto& tag : sp.capabilities) {
    if (!in_alphabet(tag, alphabet_size)) {
      throw std::invalid_argument("provider " + sp.aas_id + ": unknown service " + tag.id());
    }
  }
  if (!(sp.cost > 0.0)) throw std::invalid_argument("provider " + sp.aas_id + ": cost must be > 0");
  if (sp.duration.millis() <= 0) {
    throw std::invalid_argument("provider " + sp.aas_id + ": duration must be > 0");
  }
  if (sp.t_exp.millis() <= 0) throw std::invalid_argument("provider " + sp.aas_id + ": t_exp must be > 0");
}

void validate(const RequesterProfile& sr, int alphabet_size) {
  if (sr.aas_id.empty()) throw std::invalid_argument("requester aas_id is empty");
  if (!in_alphabet(sr.requested, alphabet_size)) {
    throw std::invalid_argument("requester " + sr.aas_id + ": unknown service " + sr.requested.id());
  }
  if (!(sr.budget > 0.0)) throw std::invalid_argument("requester " + sr.aas_id + ": budget must be > 0");
  if (sr.t_exp.millis() <= 0) throw std::invalid_argument("requester " + sr.aas_id + ": t_exp must be > 0");
}

bool is_capable(const ProviderProfile& sp, const RequesterProfile& sr) {
  return sp.offers(sr.requested) && sr.quality_req <= sp.quality_out;
}

bool is_feasible(const ProviderProfile& sp, const RequesterProfile& sr) {
  return is_capable(sp, sr) && sp.cost <= sr.budget;
}

bool is_actionable(const ProviderProfile& sp, const ProviderTiming& timing, SimTime now) {
  const bool offer_expired = !timing.last_offer || (now - *timing.last_offer) > sp.t_exp;
  const bool work_done = !timing.agreement ||
                         (now - *timing.agreement) > timing.agreed_duration.value_or(SimDuration{});
  return offer_expired && work_done;
}

}  // namespace bidsim
