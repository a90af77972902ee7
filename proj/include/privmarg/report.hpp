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

#ifndef PRIVMARG_REPORT_HPP
#define PRIVMARG_REPORT_HPP

#include <ostream>
#include <string>

#include <json.hpp>

#include "privmarg/domain.hpp"
#include "privmarg/mechanisms.hpp"

namespace privmarg {

/// Full run record: ledger, per-round selections and allocations, metrics,
/// timings, and the estimates as flat row-major arrays with explicit shape
/// and attribute names.
nlohmann::json run_result_to_json(const RunResult& result,
                                  const Domain& domain);

/// Appends one row per metric: mechanism, seed, epsilon_or_rho, metric,
/// value, wall_seconds.
void append_metrics_csv(std::ostream& out, const RunReport& report,
                        const std::string& epsilon_or_rho);

inline constexpr const char* kMetricsCsvHeader =
    "mechanism,seed,epsilon_or_rho,metric,value,wall_seconds";

}  // namespace privmarg

#endif  // PRIVMARG_REPORT_HPP
