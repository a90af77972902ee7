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
// Conditional residual budget allocation: distributes one round's privacy
// budget across the residuals of a target marginal, discounting residuals
// that prior rounds already estimated well.
//
// The problem is posed in transformed precisions x_tau = 1 / (C sigma_tau^2)
// with prior precisions a_tau = 1 / (C sigma_tilde_tau^2):
//
//   minimize   sum_tau v_tau / (x_tau + a_tau)
//   subject to sum_tau p_tau x_tau <= 1,  x_tau >= 0.
//
// Without the sign constraints the optimum has a closed form (water-filling);
// with them, clamping the negative coordinates and re-solving on the free set
// converges in at most one pass per coordinate and is certified by the KKT
// conditions.

#ifndef PRIVMARG_CRP_HPP
#define PRIVMARG_CRP_HPP

#include <map>
#include <vector>

#include <Eigen/Core>

#include "privmarg/attrset.hpp"
#include "privmarg/domain.hpp"
#include "privmarg/grem.hpp"

namespace privmarg {

struct CrpProblem {
  Eigen::VectorXd v;  // error coefficients, > 0
  Eigen::VectorXd p;  // privacy-cost coefficients, > 0
  Eigen::VectorXd a;  // prior transformed precisions, >= 0
  double budget_c;    // C = 2 * rho_round, > 0

  void validate() const;
  Eigen::Index size() const { return v.size(); }

  /// Objective of the transformed problem at x (the 1/C factor dropped).
  double objective(const Eigen::VectorXd& x) const;
};

/// Equality-constrained solution ignoring x >= 0; coordinates may come out
/// negative when priors are strong. Always satisfies p.dot(x) == 1 exactly.
Eigen::VectorXd relaxed_closed_form(const CrpProblem& problem);

struct CrpSolution {
  Eigen::VectorXd x;
  int active_set_iterations = 0;  // 0 means the relaxed solution was feasible
};

/// Optimal nonnegative solution via active-set iteration on the closed form.
/// `tolerance` bounds the KKT re-entry slack for clamped coordinates.
CrpSolution solve_crp(const CrpProblem& problem, double tolerance = 1e-8);

/// Measurement plan after dropping negligible allocations: indices with
/// p_tau x_tau < eta are omitted, the rest get sigma_tau^2 = 1 / (C x_tau).
/// The boundary p_tau x_tau == eta is retained.
struct CrpAllocation {
  std::vector<Eigen::Index> retained;
  Eigen::VectorXd sigma2;  // aligned with retained
};

CrpAllocation postprocess(const CrpSolution& solution,
                          const CrpProblem& problem, double eta);

/// Batch error coefficients: v'_tau summed over every workload marginal that
/// contains tau. Throws if tau lies outside the downward closure.
std::map<AttrSet, double> aggregate_workload_weights(const Workload& workload,
                                                     const Domain& domain);

inline constexpr double kDefaultEta = 1e-3;

}  // namespace privmarg

#endif  // PRIVMARG_CRP_HPP
