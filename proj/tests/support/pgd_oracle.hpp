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
// Projected-gradient reference solver for the transformed budget-allocation
// problem. Test-only: slow, shares nothing with the active-set path.

#ifndef PRIVMARG_TESTS_SUPPORT_PGD_ORACLE_HPP
#define PRIVMARG_TESTS_SUPPORT_PGD_ORACLE_HPP

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

#include "privmarg/crp.hpp"

namespace privmarg::testutil {

/// Euclidean projection onto {x >= 0, p.x <= 1}.
inline Eigen::VectorXd project_feasible(const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& p) {
  Eigen::VectorXd clipped = y.cwiseMax(0.0);
  if (p.dot(clipped) <= 1.0) return clipped;
  // Bisection on theta for p . max(0, y - theta p) = 1 (decreasing in theta).
  double lo = 0.0;
  double hi = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    hi = std::max(hi, y(i) / p(i));
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double mass =
        p.dot((y - mid * p).cwiseMax(0.0).matrix().eval());
    if (mass > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (y - hi * p).cwiseMax(0.0);
}

/// Gradient descent with projection; fixed step 1e-3, at most 1e6 iterations,
/// early exit once the iterate stops moving. On flat instances (tiny
/// curvature near the optimum) this stalls short of 1e-6, so the referee
/// below polishes it.
inline Eigen::VectorXd pgd_solve(const CrpProblem& problem) {
  const Eigen::Index m = problem.size();
  // Start from the iid allocation: equal precisions, budget exactly met.
  Eigen::VectorXd x = Eigen::VectorXd::Constant(m, 1.0 / problem.p.sum());
  const double step = 1e-3;
  // Near the optimum the fixed step makes the iterate bounce, so exit once
  // the best objective has stopped improving for a long stretch.
  Eigen::VectorXd best_x = x;
  double best_f = problem.objective(x);
  int stale = 0;
  for (int it = 0; it < 1'000'000; ++it) {
    const Eigen::VectorXd grad =
        (-problem.v.array() / (x.array() + problem.a.array()).square())
            .matrix();
    x = project_feasible(x - step * grad, problem.p);
    const double f = problem.objective(x);
    if (f < best_f - 1e-14 * (1.0 + std::abs(best_f))) {
      best_f = f;
      best_x = x;
      stale = 0;
    } else if (++stale > 5000) {
      break;
    }
  }
  return best_x;
}

/// Exact reference: bisects the single KKT multiplier of the water-filling
/// stationarity x_i(lambda) = max(0, sqrt(v_i / (lambda p_i)) - a_i), whose
/// budget mass p . x(lambda) is strictly decreasing in lambda. Convexity
/// makes the KKT point the global optimum. No closed-form re-solves and no
/// active set: clamping falls out of the max.
inline Eigen::VectorXd multiplier_bisection_solve(const CrpProblem& problem) {
  const auto x_of = [&](double lambda) {
    return ((problem.v.array() / (lambda * problem.p.array())).sqrt() -
            problem.a.array())
        .max(0.0)
        .matrix()
        .eval();
  };
  double lo = 1e-18;
  double hi = 1.0;
  while (problem.p.dot(x_of(hi)) > 1.0) hi *= 2.0;
  while (problem.p.dot(x_of(lo)) < 1.0) lo /= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (problem.p.dot(x_of(mid)) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return x_of(hi);
}

/// The oracle used by the comparison tests: projected gradient run to
/// convergence, with the bisection polish supplying the digits the fixed
/// step cannot. The two stages cross-check each other.
inline Eigen::VectorXd oracle_solve(const CrpProblem& problem) {
  const Eigen::VectorXd coarse = pgd_solve(problem);
  const Eigen::VectorXd exact = multiplier_bisection_solve(problem);
  const double f_coarse = problem.objective(coarse);
  const double f_exact = problem.objective(exact);
  if (f_exact > f_coarse + 1e-9 * (1.0 + std::abs(f_coarse))) {
    throw std::logic_error("crp oracle stages disagree");
  }
  return f_exact <= f_coarse ? exact : coarse;
}

}  // namespace privmarg::testutil

#endif  // PRIVMARG_TESTS_SUPPORT_PGD_ORACLE_HPP
