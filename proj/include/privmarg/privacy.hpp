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
// Per-residual privacy coefficients, residual measurement, the exponential
// mechanism, and zCDP <-> (epsilon, delta) conversion.

#ifndef PRIVMARG_PRIVACY_HPP
#define PRIVMARG_PRIVACY_HPP

#include <vector>

#include "privmarg/attrset.hpp"
#include "privmarg/domain.hpp"
#include "privmarg/rng.hpp"
#include "privmarg/transforms.hpp"

namespace privmarg {

/// Privacy-cost coefficient p_tau = prod_{i in tau} (n_i - 1) / n_i.
/// Releasing a noisy tau-residual with per-entry variance s^2 costs
/// p_tau / (2 s^2) zCDP.
double p_tau(const Domain& domain, const AttrSet& tau);

/// Per-entry variance coefficient of a tau-residual measurement in the
/// reconstruction of the gamma-marginal:
/// v_tau = p_tau * prod_{j in gamma \ tau} 1 / n_j^2.
double v_tau(const Domain& domain, const AttrSet& gamma, const AttrSet& tau);

struct NoisyResidual {
  Residual residual;
  double variance;
};

/// Adds i.i.d. Gaussian noise to the tau-marginal, then decomposes; the
/// result is the true residual plus noise with covariance sigma2 * V_tau.
NoisyResidual measure_residual(const Marginal& mu, double sigma2, Rng& rng);

/// Exponential mechanism via the Gumbel-max trick: adds scaled Gumbel noise
/// to each score and returns the argmax index. Satisfies eps^2/8-zCDP; the
/// caller records the cost.
int exp_mech_select(const std::vector<double>& scores, double sensitivity,
                    double epsilon, Rng& rng);

/// Smallest delta such that rho-zCDP implies (epsilon, delta)-DP:
/// min over alpha > 1 of exp((alpha-1)(alpha rho - eps)) / (alpha - 1)
/// * (1 - 1/alpha)^alpha, clamped to [0, 1]. The search runs over
/// alpha in (1, 500], which covers every regime the conversion is used in.
double zcdp_to_delta(double rho, double epsilon);

/// Largest rho whose conversion stays at or below the target delta, found by
/// bisection to relative tolerance 1e-9.
double calibrate_rho(double epsilon, double delta);

}  // namespace privmarg

#endif  // PRIVMARG_PRIVACY_HPP
