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

#include "privmarg/mechanisms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace privmarg {

namespace {

constexpr double kSqrt2OverPi = 0.7978845608028654;  // sqrt(2/pi)
constexpr int kRoundCap = 1'000'000;  // guards against a broken anneal loop

double l1_distance(const MArrayD& a, const MArrayD& b) {
  a.require_same_shape(b);
  return (a.data() - b.data()).abs().sum();
}

class WallTimer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

}  // namespace

double selection_score(const MArrayD& mu, const MArrayD& mu_hat,
                       double sigma_t, double weight) {
  return weight * (l1_distance(mu, mu_hat) -
                   kSqrt2OverPi * sigma_t * static_cast<double>(mu.size()));
}

AnnealDecision budget_anneal(double l1_dist, double n_gamma, double epsilon_t,
                             double sigma2_t, double rho_remaining) {
  // Exact exhaustion (or sub-ulp overshoot) means no further round; the
  // formulas below then yield epsilon 0 and infinite variance.
  rho_remaining = std::max(0.0, rho_remaining);
  AnnealDecision d;
  if (l1_dist <= kSqrt2OverPi * std::sqrt(sigma2_t) * n_gamma) {
    d.epsilon_next = 2.0 * epsilon_t;
    d.sigma2_next = sigma2_t / 4.0;
    d.doubled = true;
  } else {
    d.epsilon_next = epsilon_t;
    d.sigma2_next = sigma2_t;
  }
  const double next_cost =
      1.0 / (2.0 * d.sigma2_next) + d.epsilon_next * d.epsilon_next / 8.0;
  if (rho_remaining <= 2.0 * next_cost) {
    d.epsilon_next = std::sqrt(0.8 * rho_remaining);
    d.sigma2_next = 1.0 / (1.8 * rho_remaining);
    d.final_round = true;
  }
  return d;
}

void initialize_residuals(const DataTable& table, double sigma0_sq,
                          ResidualStore& store, Accountant& accountant,
                          Rng& rng) {
  const Domain& domain = table.domain();
  const Marginal total = compute_marginal(table, AttrSet{});
  for (int i = 0; i < domain.attr_count(); ++i) {
    const AttrSet attr{i};
    const double n_i = static_cast<double>(domain.size(i));
    const Marginal mu = compute_marginal(table, attr);

    NoisyResidual z = measure_residual(mu, sigma0_sq, rng);
    accountant.charge("init:residual:" + domain.name(i),
                      p_tau(domain, attr) / (2.0 * sigma0_sq));
    store.consolidate(attr, z.residual.data, sigma0_sq);

    NoisyResidual z0 = measure_residual(total, n_i * sigma0_sq, rng);
    accountant.charge("init:total:" + domain.name(i),
                      1.0 / (2.0 * n_i * sigma0_sq));
    store.consolidate(AttrSet{}, z0.residual.data, n_i * sigma0_sq);
  }
}

CrpProblem build_round_problem(const Domain& domain, const ResidualStore& store,
                               const AttrSet& gamma, double sigma2_t) {
  const std::vector<AttrSet> subsets = gamma.subsets();
  CrpProblem problem;
  const Eigen::Index m = static_cast<Eigen::Index>(subsets.size());
  problem.v.resize(m);
  problem.p.resize(m);
  problem.a.resize(m);
  problem.budget_c = 1.0 / sigma2_t;  // C = 2 * (1 / (2 sigma_t^2))
  for (Eigen::Index i = 0; i < m; ++i) {
    const AttrSet& tau = subsets[static_cast<std::size_t>(i)];
    problem.v(i) = v_tau(domain, gamma, tau);
    problem.p(i) = p_tau(domain, tau);
    problem.a(i) = store.precision(tau) / problem.budget_c;
  }
  return problem;
}

Metrics compute_metrics(const DataTable& table,
                        const std::vector<AttrSet>& workload_sets,
                        const std::map<AttrSet, MArrayD>& estimates) {
  Metrics m;
  if (workload_sets.empty()) return m;
  const double n_records =
      std::max(1.0, static_cast<double>(table.record_count()));
  for (const AttrSet& gamma : workload_sets) {
    const Marginal mu = compute_marginal(table, gamma);
    const auto& est = estimates.at(gamma);
    const double l1 = l1_distance(mu.data, est);
    const double l2 = std::sqrt((mu.data.data() - est.data()).square().sum());
    m.mean_l1 += l1;
    m.mean_l2 += l2;
    m.max_l1 = std::max(m.max_l1, l1);
  }
  const double count = static_cast<double>(workload_sets.size());
  m.mean_l1 /= count;
  m.mean_l2 /= count;
  m.mean_l1_normalized = m.mean_l1 / n_records;
  return m;
}

RunResult run_aim_grem(const DataTable& table, const Workload& workload,
                       double rho, std::uint64_t seed,
                       const MechanismConfig& config) {
  if (!(rho > 0.0)) throw std::invalid_argument("run_aim_grem: rho must be positive");
  const WallTimer timer;
  const Domain& domain = table.domain();
  const std::vector<AttrSet>& closure = workload.downward_closure();
  const int d = domain.attr_count();
  // The initialization spends d * rho_init; the privacy argument needs
  // d < |closure| so this stays under 0.45 * rho.
  if (static_cast<std::size_t>(d) >= closure.size()) {
    throw std::invalid_argument(
        "run_aim_grem: closure must be larger than the attribute count");
  }

  Accountant accountant(rho);
  Rng rng(seed);
  ResidualStore store(domain);

  const double sigma0_sq = static_cast<double>(closure.size()) / (0.9 * rho);
  const double rho_init = 1.0 / (2.0 * sigma0_sq);
  initialize_residuals(table, sigma0_sq, store, accountant, rng);

  MarginalEstimates estimates(domain, closure);
  estimates.rebuild(store);

  // The true closure marginals feed the scores every round and never change.
  std::map<AttrSet, Marginal> truth;
  std::vector<double> weights(closure.size());
  double max_weight = 0.0;
  for (std::size_t i = 0; i < closure.size(); ++i) {
    truth.emplace(closure[i], compute_marginal(table, closure[i]));
    weights[i] = workload.weight(closure[i]);
    max_weight = std::max(max_weight, weights[i]);
  }
  const double sensitivity = config.exp_mech_sensitivity > 0.0
                                 ? config.exp_mech_sensitivity
                                 : max_weight;

  RunReport report;
  report.mechanism = "aim-grem";
  report.seed = seed;
  report.rho = rho;
  report.sigma0_sq = sigma0_sq;
  report.rho_init = rho_init;
  report.closure_size = closure.size();
  report.audit_enabled = config.audit_full_rebuild;

  int t = d;
  double epsilon_t = std::sqrt(0.4 * rho / static_cast<double>(closure.size()));
  double sigma2_t = sigma0_sq;

  while (accountant.used() < rho) {
    ++t;
    if (t - d > kRoundCap) {
      throw std::runtime_error("run_aim_grem: round cap exceeded");
    }
    RoundRecord round;
    round.t = t;
    round.epsilon = epsilon_t;
    round.sigma2 = sigma2_t;
    round.candidate_count = closure.size();
    round.rho_used_before = accountant.used();

    // Select over the full closure; nothing is ever filtered out.
    const double sigma_t = std::sqrt(sigma2_t);
    std::vector<double> scores(closure.size());
    for (std::size_t i = 0; i < closure.size(); ++i) {
      scores[i] = selection_score(truth.at(closure[i]).data,
                                  estimates.estimate(closure[i]), sigma_t,
                                  weights[i]);
    }
    const int pick = exp_mech_select(scores, sensitivity, epsilon_t, rng);
    const AttrSet gamma = closure[static_cast<std::size_t>(pick)];
    round.selected = gamma;

    // Allocate this round's measurement budget across gamma's residuals,
    // discounting by the precisions accumulated so far: a_tau = lambda / C.
    const std::vector<AttrSet> subsets = gamma.subsets();
    const CrpProblem problem = build_round_problem(domain, store, gamma, sigma2_t);
    const CrpSolution solution = solve_crp(problem, config.crp_tolerance);
    const CrpAllocation alloc = postprocess(solution, problem, config.eta);

    std::vector<bool> kept(subsets.size(), false);
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(alloc.retained.size()); ++r) {
      const Eigen::Index i = alloc.retained[static_cast<std::size_t>(r)];
      const AttrSet& tau = subsets[static_cast<std::size_t>(i)];
      kept[static_cast<std::size_t>(i)] = true;
      const double sigma2_tau = alloc.sigma2(r);
      round.allocations.emplace_back(tau, sigma2_tau);

      const Marginal mu_tau = compute_marginal(table, tau);
      const NoisyResidual z = measure_residual(mu_tau, sigma2_tau, rng);
      const MArrayD z_old = store.ensure(tau).estimate;
      store.consolidate(tau, z.residual.data, sigma2_tau);
      lazy_update(estimates, tau, z_old, store.estimate(tau), domain);
    }
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      if (!kept[i]) round.dropped.push_back(subsets[i]);
    }

    const std::string tag = "round " + std::to_string(t);
    accountant.charge(tag + ":selection", epsilon_t * epsilon_t / 8.0);
    accountant.charge(tag + ":measurement", 1.0 / (2.0 * sigma2_t));
    round.round_cost = accountant.used() - round.rho_used_before;

    if (config.audit_full_rebuild) {
      report.max_audit_divergence = std::max(
          report.max_audit_divergence, estimates.divergence_from_rebuild(store));
    }

    const AnnealDecision anneal = budget_anneal(
        l1_distance(truth.at(gamma).data, estimates.estimate(gamma)),
        static_cast<double>(domain.marginal_size(gamma)), epsilon_t, sigma2_t,
        accountant.remaining());
    round.anneal_doubled = anneal.doubled;
    round.anneal_final_round = anneal.final_round;
    round.next_epsilon = anneal.epsilon_next;
    round.next_sigma2 = anneal.sigma2_next;
    epsilon_t = anneal.epsilon_next;
    sigma2_t = anneal.sigma2_next;
    report.rounds.push_back(std::move(round));
  }

  RunResult out;
  for (const AttrSet& gamma : workload.sets()) {
    out.estimates.emplace(gamma, estimates.estimate(gamma));
  }
  report.rho_used = accountant.used();
  report.ledger = accountant.ledger();
  report.metrics = compute_metrics(table, workload.sets(), out.estimates);
  report.wall_seconds = timer.seconds();
  out.report = std::move(report);
  return out;
}

RunResult run_batch_planner(const DataTable& table, const Workload& workload,
                            double rho, std::uint64_t seed,
                            const MechanismConfig& config) {
  if (!(rho > 0.0)) throw std::invalid_argument("run_batch_planner: rho must be positive");
  const WallTimer timer;
  const Domain& domain = table.domain();
  const std::vector<AttrSet>& closure = workload.downward_closure();

  Accountant accountant(rho);
  Rng rng(seed);
  ResidualStore store(domain);

  const std::map<AttrSet, double> agg =
      aggregate_workload_weights(workload, domain);
  CrpProblem problem;
  const Eigen::Index m = static_cast<Eigen::Index>(closure.size());
  problem.v.resize(m);
  problem.p.resize(m);
  problem.a = Eigen::VectorXd::Zero(m);
  problem.budget_c = 2.0 * rho;
  for (Eigen::Index i = 0; i < m; ++i) {
    const AttrSet& tau = closure[static_cast<std::size_t>(i)];
    problem.v(i) = agg.at(tau);
    problem.p(i) = p_tau(domain, tau);
  }
  // With no priors the closed form is strictly positive, so the active set
  // never iterates here.
  const CrpSolution solution = solve_crp(problem, config.crp_tolerance);
  const CrpAllocation alloc = postprocess(solution, problem, config.eta);

  RunReport report;
  report.mechanism = "batch-planner";
  report.seed = seed;
  report.rho = rho;
  report.closure_size = closure.size();

  RoundRecord round;
  round.t = 1;
  round.candidate_count = closure.size();
  std::vector<bool> kept(closure.size(), false);
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(alloc.retained.size()); ++r) {
    const Eigen::Index i = alloc.retained[static_cast<std::size_t>(r)];
    const AttrSet& tau = closure[static_cast<std::size_t>(i)];
    kept[static_cast<std::size_t>(i)] = true;
    const double sigma2_tau = alloc.sigma2(r);
    round.allocations.emplace_back(tau, sigma2_tau);

    const Marginal mu_tau = compute_marginal(table, tau);
    const NoisyResidual z = measure_residual(mu_tau, sigma2_tau, rng);
    accountant.charge("measure:" + tau.to_string(),
                      problem.p(i) / (2.0 * sigma2_tau));
    store.consolidate(tau, z.residual.data, sigma2_tau);
  }
  for (std::size_t i = 0; i < closure.size(); ++i) {
    if (!kept[i]) round.dropped.push_back(closure[i]);
  }
  report.rounds.push_back(std::move(round));

  const MarginalEstimates estimates =
      reconstruct_workload(store, workload.sets(), domain);

  RunResult out;
  for (const AttrSet& gamma : workload.sets()) {
    out.estimates.emplace(gamma, estimates.estimate(gamma));
  }
  report.rho_used = accountant.used();
  report.ledger = accountant.ledger();
  report.metrics = compute_metrics(table, workload.sets(), out.estimates);
  report.wall_seconds = timer.seconds();
  out.report = std::move(report);
  return out;
}

RunResult run_iid_fixed(const DataTable& table,
                        const std::vector<AttrSet>& sequence, double rho,
                        std::uint64_t seed, ReconstructMode mode,
                        const MechanismConfig& config) {
  if (!(rho > 0.0)) throw std::invalid_argument("run_iid_fixed: rho must be positive");
  if (sequence.empty()) {
    throw std::invalid_argument("run_iid_fixed: empty measurement sequence");
  }
  const WallTimer timer;
  const Domain& domain = table.domain();
  const Workload workload{std::vector<AttrSet>(sequence.begin(), sequence.end())};

  Accountant accountant(rho);
  Rng rng(seed);
  ResidualStore store(domain);

  // 50/50 split: the 1-way initialization spends rho/2, the fixed sequence
  // spends rho/2 in equal parts.
  const double d = static_cast<double>(domain.attr_count());
  const double sigma0_sq = d / rho;  // d * 1 / (2 sigma0^2) = rho / 2
  initialize_residuals(table, sigma0_sq, store, accountant, rng);
  const double phase_init_cost = accountant.used();

  const double len = static_cast<double>(sequence.size());
  const double sigma2 = len / rho;  // len / (2 sigma^2) = rho / 2

  MarginalEstimates estimates(domain, workload.sets());
  estimates.rebuild(store);

  RunReport report;
  report.mechanism = "iid-fixed";
  report.seed = seed;
  report.rho = rho;
  report.sigma0_sq = sigma0_sq;
  report.rho_init = 1.0 / (2.0 * sigma0_sq);
  report.closure_size = workload.downward_closure().size();
  report.reconstruct_mode = mode == ReconstructMode::kLazy ? "lazy" : "full";

  int t = domain.attr_count();
  for (const AttrSet& gamma : sequence) {
    ++t;
    RoundRecord round;
    round.t = t;
    round.selected = gamma;
    round.sigma2 = sigma2;
    round.rho_used_before = accountant.used();

    // Isotropic marginal measurement, then every residual of gamma derived
    // from the one noisy array at the same nominal variance.
    Marginal noisy = compute_marginal(table, gamma);
    noisy.data.data() +=
        rng.gaussian_array(noisy.data.size(), std::sqrt(sigma2));
    accountant.charge("measure:" + gamma.to_string(), 1.0 / (2.0 * sigma2));

    for (const AttrSet& tau : gamma.subsets()) {
      const MArrayD z_new = decomp(noisy, tau).data;
      round.allocations.emplace_back(tau, sigma2);
      if (mode == ReconstructMode::kLazy) {
        const MArrayD z_old = store.ensure(tau).estimate;
        store.consolidate(tau, z_new, sigma2);
        lazy_update(estimates, tau, z_old, store.estimate(tau), domain);
      } else {
        store.consolidate(tau, z_new, sigma2);
      }
    }
    if (mode == ReconstructMode::kFull) {
      estimates.rebuild(store);
    }
    round.round_cost = accountant.used() - round.rho_used_before;
    report.rounds.push_back(std::move(round));
  }

  RunResult out;
  for (const AttrSet& gamma : workload.sets()) {
    out.estimates.emplace(gamma, estimates.estimate(gamma));
  }
  report.rho_used = accountant.used();
  report.phase_init_cost = phase_init_cost;
  report.phase_sequence_cost = accountant.used() - phase_init_cost;
  report.ledger = accountant.ledger();
  report.metrics = compute_metrics(table, workload.sets(), out.estimates);
  report.wall_seconds = timer.seconds();
  report.audit_enabled = config.audit_full_rebuild;
  out.report = std::move(report);
  return out;
}

}  // namespace privmarg
