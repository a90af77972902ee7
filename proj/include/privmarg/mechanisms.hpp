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
// End-to-end private mechanisms. All of them answer a workload of marginal
// queries under a zCDP budget by measuring noisy residuals and reconstructing
// with inverse-variance consolidation; they differ in how measurements are
// chosen and how the per-round noise is allocated.

#ifndef PRIVMARG_MECHANISMS_HPP
#define PRIVMARG_MECHANISMS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "privmarg/accountant.hpp"
#include "privmarg/attrset.hpp"
#include "privmarg/crp.hpp"
#include "privmarg/domain.hpp"
#include "privmarg/grem.hpp"
#include "privmarg/privacy.hpp"
#include "privmarg/rng.hpp"

namespace privmarg {

struct MechanismConfig {
  double eta = kDefaultEta;
  /// Exponential-mechanism score sensitivity; nonpositive means "use the
  /// largest candidate weight", the conventional bound for the weighted
  /// expected-improvement score.
  double exp_mech_sensitivity = 0.0;
  /// Allocation solver tolerance (KKT re-entry slack).
  double crp_tolerance = 1e-8;
  /// Cross-check every lazy update against a full rebuild (slow; debugging
  /// and the full-reconstruction ablation baseline).
  bool audit_full_rebuild = false;
};

/// Workload error of a set of marginal estimates against the true marginals.
struct Metrics {
  double mean_l1 = 0.0;
  double mean_l1_normalized = 0.0;  // mean_l1 / N
  double mean_l2 = 0.0;
  double max_l1 = 0.0;
};

struct RoundRecord {
  int t = 0;
  AttrSet selected;
  double epsilon = 0.0;
  double sigma2 = 0.0;
  std::size_t candidate_count = 0;
  double rho_used_before = 0.0;
  double round_cost = 0.0;
  std::vector<std::pair<AttrSet, double>> allocations;  // retained tau -> sigma^2
  std::vector<AttrSet> dropped;                         // omitted by eta
  bool anneal_doubled = false;
  bool anneal_final_round = false;
  double next_epsilon = 0.0;
  double next_sigma2 = 0.0;
};

struct RunReport {
  std::string mechanism;
  std::uint64_t seed = 0;
  double rho = 0.0;
  double rho_used = 0.0;
  double sigma0_sq = 0.0;
  double rho_init = 0.0;
  std::size_t closure_size = 0;
  std::vector<LedgerEntry> ledger;
  std::vector<RoundRecord> rounds;
  Metrics metrics;
  double wall_seconds = 0.0;
  bool audit_enabled = false;
  double max_audit_divergence = 0.0;
  // 50/50 phase totals of the fixed-sequence baseline.
  double phase_init_cost = 0.0;
  double phase_sequence_cost = 0.0;
  std::string reconstruct_mode;
};

struct RunResult {
  std::map<AttrSet, MArrayD> estimates;  // one entry per workload marginal
  RunReport report;
};

/// Weighted expected-improvement score for selecting the next marginal:
/// weight * (||mu - mu_hat||_1 - sqrt(2/pi) * sigma_t * n_gamma). The second
/// term is the expected L1 noise mass a fresh measurement at sigma_t adds.
double selection_score(const MArrayD& mu, const MArrayD& mu_hat,
                       double sigma_t, double weight);

struct AnnealDecision {
  double epsilon_next = 0.0;
  double sigma2_next = 0.0;
  bool doubled = false;
  bool final_round = false;
};

/// Budget annealing: doubles the per-round budget when the last measurement
/// moved the estimate by less than its expected noise, then spends the exact
/// remainder once fewer than two such rounds fit.
AnnealDecision budget_anneal(double l1_distance, double n_gamma,
                             double epsilon_t, double sigma2_t,
                             double rho_remaining);

/// Measures every 1-way residual with variance sigma0_sq and the total with
/// variance n_i * sigma0_sq per attribute; together the two cost exactly
/// 1 / (2 sigma0_sq) per attribute.
void initialize_residuals(const DataTable& table, double sigma0_sq,
                          ResidualStore& store, Accountant& accountant,
                          Rng& rng);

/// One round's allocation problem over gamma's residuals: budget
/// C = 1 / sigma_t^2 (twice the round's zCDP share), error and cost
/// coefficients from the domain, priors a_tau = lambda_tau / C from the
/// store's accumulated precisions. The subset order matches gamma.subsets().
CrpProblem build_round_problem(const Domain& domain, const ResidualStore& store,
                               const AttrSet& gamma, double sigma2_t);

/// Adaptive select-measure-reconstruct over the workload's downward closure
/// with per-round conditional residual budget allocation.
RunResult run_aim_grem(const DataTable& table, const Workload& workload,
                       double rho, std::uint64_t seed,
                       const MechanismConfig& config = {});

/// Single batch allocation over the whole closure (no prior measurements),
/// each retained residual measured once.
RunResult run_batch_planner(const DataTable& table, const Workload& workload,
                            double rho, std::uint64_t seed,
                            const MechanismConfig& config = {});

enum class ReconstructMode { kLazy, kFull };

/// Fixed-sequence baseline: a 50/50 budget split between the 1-way
/// initialization and the given marginal sequence, each marginal measured
/// with isotropic noise and decomposed into residuals.
RunResult run_iid_fixed(const DataTable& table,
                        const std::vector<AttrSet>& sequence, double rho,
                        std::uint64_t seed, ReconstructMode mode,
                        const MechanismConfig& config = {});

/// Workload error metrics of estimates against the table's true marginals.
Metrics compute_metrics(const DataTable& table,
                        const std::vector<AttrSet>& workload_sets,
                        const std::map<AttrSet, MArrayD>& estimates);

}  // namespace privmarg

#endif  // PRIVMARG_MECHANISMS_HPP
