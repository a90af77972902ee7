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

#include "privmarg/crp.hpp"

#include <cmath>
#include <stdexcept>

#include "privmarg/privacy.hpp"

namespace privmarg {

void CrpProblem::validate() const {
  const Eigen::Index m = v.size();
  if (m == 0 || p.size() != m || a.size() != m) {
    throw std::invalid_argument("CrpProblem: coefficient length mismatch");
  }
  if (!(budget_c > 0.0)) {
    throw std::invalid_argument("CrpProblem: budget must be positive");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(v(i) > 0.0) || !(p(i) > 0.0) || !(a(i) >= 0.0) ||
        !std::isfinite(a(i))) {
      throw std::invalid_argument("CrpProblem: coefficients out of range");
    }
  }
}

double CrpProblem::objective(const Eigen::VectorXd& x) const {
  return (v.array() / (x.array() + a.array())).sum();
}

Eigen::VectorXd relaxed_closed_form(const CrpProblem& problem) {
  problem.validate();
  const double s = (problem.p.array() * problem.v.array()).sqrt().sum();
  const double q = problem.p.dot(problem.a);
  const double scale = (1.0 + q) / s;
  return (scale * (problem.v.array() / problem.p.array()).sqrt() -
          problem.a.array())
      .matrix();
}

CrpSolution solve_crp(const CrpProblem& problem, double tolerance) {
  problem.validate();
  const Eigen::Index m = problem.size();

  CrpSolution sol;
  sol.x = relaxed_closed_form(problem);
  if ((sol.x.array() >= 0.0).all()) {
    return sol;
  }

  // Active set: clamp every currently-negative coordinate, re-solve the
  // closed form restricted to the free coordinates, and re-admit clamped
  // coordinates whose KKT multiplier goes negative. Each coordinate changes
  // state at most once per pass, so m passes bound the loop; exceeding the
  // cap means the solver itself is broken.
  std::vector<bool> clamped(static_cast<std::size_t>(m), false);
  for (int iter = 1; iter <= m; ++iter) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (sol.x(i) < 0.0) clamped[static_cast<std::size_t>(i)] = true;
    }
    double s = 0.0;
    double q = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (clamped[static_cast<std::size_t>(i)]) continue;
      s += std::sqrt(problem.p(i) * problem.v(i));
      q += problem.p(i) * problem.a(i);
    }
    if (s == 0.0) {
      throw std::runtime_error("solve_crp: every coordinate clamped");
    }
    const double scale = (1.0 + q) / s;
    for (Eigen::Index i = 0; i < m; ++i) {
      sol.x(i) = clamped[static_cast<std::size_t>(i)]
                     ? 0.0
                     : scale * std::sqrt(problem.v(i) / problem.p(i)) -
                           problem.a(i);
    }
    sol.active_set_iterations = iter;
    if ((sol.x.array() < 0.0).any()) continue;

    // Multiplier from the free-set stationarity: sqrt(lambda) = S / (1 + Q).
    const double lambda = (s / (1.0 + q)) * (s / (1.0 + q));
    bool reentry = false;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!clamped[static_cast<std::size_t>(i)]) continue;
      const double grad = problem.v(i) / (problem.a(i) * problem.a(i));
      if (grad > lambda * problem.p(i) + tolerance) {
        clamped[static_cast<std::size_t>(i)] = false;
        reentry = true;
      }
    }
    if (!reentry) return sol;
  }
  throw std::runtime_error("solve_crp: active-set iteration cap exceeded");
}

CrpAllocation postprocess(const CrpSolution& solution,
                          const CrpProblem& problem, double eta) {
  if (!(eta > 0.0) || !(eta < 1.0)) {
    throw std::invalid_argument("postprocess: eta must lie in (0, 1)");
  }
  CrpAllocation out;
  std::vector<double> sigma2;
  for (Eigen::Index i = 0; i < problem.size(); ++i) {
    const double share = problem.p(i) * solution.x(i);
    if (share < eta) continue;  // strictly below the threshold is dropped
    out.retained.push_back(i);
    sigma2.push_back(1.0 / (problem.budget_c * solution.x(i)));
  }
  out.sigma2 = Eigen::Map<Eigen::VectorXd>(sigma2.data(),
                                           static_cast<Eigen::Index>(sigma2.size()));
  return out;
}

std::map<AttrSet, double> aggregate_workload_weights(const Workload& workload,
                                                     const Domain& domain) {
  std::map<AttrSet, double> out;
  for (const AttrSet& gamma : workload.sets()) {
    for (const AttrSet& tau : gamma.subsets()) {
      out[tau] += v_tau(domain, gamma, tau);
    }
  }
  return out;
}

}  // namespace privmarg
