//
// Copyright 2026 The privmarg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "privmarg/report.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

namespace privmarg {

namespace {

using nlohmann::json;

json attrset_to_json(const AttrSet& attrs, const Domain& domain) {
  json names = json::array();
  for (int a : attrs) names.push_back(domain.name(a));
  return names;
}

json round_to_json(const RoundRecord& r, const Domain& domain) {
  json allocations = json::array();
  for (const auto& [tau, sigma2] : r.allocations) {
    allocations.push_back(
        {{"attrs", attrset_to_json(tau, domain)}, {"sigma2", sigma2}});
  }
  json dropped = json::array();
  for (const AttrSet& tau : r.dropped) {
    dropped.push_back(attrset_to_json(tau, domain));
  }
  json doc{{"t", r.t},
           {"selected", attrset_to_json(r.selected, domain)},
           {"epsilon", r.epsilon},
           {"sigma2", r.sigma2},
           {"candidate_count", r.candidate_count},
           {"rho_used_before", r.rho_used_before},
           {"round_cost", r.round_cost},
           {"allocations", allocations},
           {"dropped", dropped},
           {"anneal_doubled", r.anneal_doubled},
           {"anneal_final_round", r.anneal_final_round}};
  // Infinite next variance marks exact budget exhaustion: no further round.
  if (std::isfinite(r.next_sigma2)) {
    doc["next_epsilon"] = r.next_epsilon;
    doc["next_sigma2"] = r.next_sigma2;
  } else {
    doc["budget_exhausted"] = true;
  }
  return doc;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

json run_result_to_json(const RunResult& result, const Domain& domain) {
  const RunReport& rep = result.report;
  json ledger = json::array();
  for (const LedgerEntry& e : rep.ledger) {
    ledger.push_back({{"label", e.label}, {"cost", e.cost}});
  }
  json rounds = json::array();
  for (const RoundRecord& r : rep.rounds) {
    rounds.push_back(round_to_json(r, domain));
  }
  json estimates = json::array();
  for (const auto& [gamma, est] : result.estimates) {
    json values = json::array();
    for (Index i = 0; i < est.size(); ++i) values.push_back(est[i]);
    estimates.push_back({{"attrs", attrset_to_json(gamma, domain)},
                         {"shape", est.dims()},
                         {"values", values}});
  }
  json doc{{"mechanism", rep.mechanism},
           {"seed", rep.seed},
           {"rho", rep.rho},
           {"rho_used", rep.rho_used},
           {"sigma0_sq", rep.sigma0_sq},
           {"rho_init", rep.rho_init},
           {"closure_size", rep.closure_size},
           {"ledger", ledger},
           {"rounds", rounds},
           {"metrics",
            {{"meanL1", rep.metrics.mean_l1},
             {"meanL1_normalized", rep.metrics.mean_l1_normalized},
             {"meanL2", rep.metrics.mean_l2},
             {"maxL1", rep.metrics.max_l1}}},
           {"timings", {{"wall_seconds", rep.wall_seconds}}},
           {"estimates", estimates}};
  if (rep.audit_enabled) {
    doc["max_audit_divergence"] = rep.max_audit_divergence;
  }
  if (!rep.reconstruct_mode.empty()) {
    doc["reconstruct_mode"] = rep.reconstruct_mode;
    doc["phase_init_cost"] = rep.phase_init_cost;
    doc["phase_sequence_cost"] = rep.phase_sequence_cost;
  }
  return doc;
}

void append_metrics_csv(std::ostream& out, const RunReport& report,
                        const std::string& epsilon_or_rho) {
  const std::vector<std::pair<const char*, double>> metrics = {
      {"meanL1", report.metrics.mean_l1},
      {"meanL1_normalized", report.metrics.mean_l1_normalized},
      {"meanL2", report.metrics.mean_l2},
      {"maxL1", report.metrics.max_l1}};
  for (const auto& [name, value] : metrics) {
    out << report.mechanism << ',' << report.seed << ',' << epsilon_or_rho
        << ',' << name << ',' << format_double(value) << ','
        << format_double(report.wall_seconds) << '\n';
  }
}

}  // namespace privmarg
