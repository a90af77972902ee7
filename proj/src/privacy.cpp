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

#include "privmarg/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace privmarg {

double p_tau(const Domain& domain, const AttrSet& tau) {
  domain.check_attrs(tau);
  double p = 1.0;
  for (int a : tau) {
    const double n = static_cast<double>(domain.size(a));
    p *= (n - 1.0) / n;
  }
  return p;
}

double v_tau(const Domain& domain, const AttrSet& gamma, const AttrSet& tau) {
  if (!tau.subset_of(gamma)) {
    throw std::invalid_argument("v_tau: tau must be a subset of gamma");
  }
  double v = p_tau(domain, tau);
  for (int a : gamma.difference(tau)) {
    const double n = static_cast<double>(domain.size(a));
    v /= n * n;
  }
  return v;
}

NoisyResidual measure_residual(const Marginal& mu, double sigma2, Rng& rng) {
  if (!(sigma2 > 0.0)) {
    throw std::invalid_argument("measure_residual: variance must be positive");
  }
  Marginal noisy{mu.attrs, mu.data};
  noisy.data.data() += rng.gaussian_array(mu.data.size(), std::sqrt(sigma2));
  return NoisyResidual{decomp(noisy, mu.attrs), sigma2};
}

int exp_mech_select(const std::vector<double>& scores, double sensitivity,
                    double epsilon, Rng& rng) {
  if (scores.empty()) {
    throw std::invalid_argument("exp_mech_select: no candidates");
  }
  if (!(epsilon > 0.0) || !(sensitivity > 0.0)) {
    throw std::invalid_argument("exp_mech_select: epsilon and sensitivity must be positive");
  }
  const double scale = epsilon / (2.0 * sensitivity);
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double val = scale * scores[i] + rng.gumbel();
    if (val > best_val) {
      best_val = val;
      best = static_cast<int>(i);
    }
  }
  return best;
}

namespace {

// log of the conversion objective at a given alpha.
double log_delta_at(double alpha, double rho, double epsilon) {
  return (alpha - 1.0) * (alpha * rho - epsilon) - std::log(alpha - 1.0) +
         alpha * std::log1p(-1.0 / alpha);
}

constexpr double kAlphaLo = 1.0 + 1e-12;
constexpr double kAlphaHi = 500.0;

}  // namespace

double zcdp_to_delta(double rho, double epsilon) {
  if (!(rho > 0.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("zcdp_to_delta: rho and epsilon must be positive");
  }
  // Golden-section search on log-delta over alpha in (1, 500]. The objective
  // is unimodal on this interval for every (rho, epsilon) we handle.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = kAlphaLo;
  double b = kAlphaHi;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = log_delta_at(c, rho, epsilon);
  double fd = log_delta_at(d, rho, epsilon);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = log_delta_at(c, rho, epsilon);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = log_delta_at(d, rho, epsilon);
    }
  }
  const double log_delta = std::min(fc, fd);
  return std::clamp(std::exp(log_delta), 0.0, 1.0);
}

double calibrate_rho(double epsilon, double delta) {
  if (!(epsilon > 0.0) || !(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("calibrate_rho: need epsilon > 0 and delta in (0, 1)");
  }
  // delta is nondecreasing in rho: bracket then bisect, returning the lower
  // end so the round-trip guarantee zcdp_to_delta(rho, eps) <= delta holds.
  double lo = 1e-15;
  if (zcdp_to_delta(lo, epsilon) > delta) return lo;
  double hi = lo;
  while (zcdp_to_delta(hi, epsilon) <= delta) {
    hi *= 2.0;
    if (hi > 1e15) return hi;  // conversion never exceeds delta in range
  }
  while ((hi - lo) / lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (zcdp_to_delta(mid, epsilon) <= delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace privmarg
