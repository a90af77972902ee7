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
// Gaussian residuals-to-marginals (GReM) reconstruction state: consolidated
// residual estimates with streaming inverse-variance weighting, plus lazily
// maintained marginal estimates for a target collection of attribute sets.

#ifndef PRIVMARG_GREM_HPP
#define PRIVMARG_GREM_HPP

#include <map>
#include <vector>

#include "privmarg/attrset.hpp"
#include "privmarg/domain.hpp"
#include "privmarg/transforms.hpp"

namespace privmarg {

/// A workload of marginal queries: the attribute sets whose marginals the
/// caller wants, with the downward closure and the standard per-candidate
/// weights w_gamma = sum_{pi in W} |gamma ^ pi|.
class Workload {
 public:
  explicit Workload(std::vector<AttrSet> sets);

  const std::vector<AttrSet>& sets() const { return sets_; }

  /// Every subset of every workload set, sorted; this is both the candidate
  /// space for selection and the measurement space.
  const std::vector<AttrSet>& downward_closure() const { return closure_; }

  double weight(const AttrSet& gamma) const;

  bool contains(const AttrSet& gamma) const;

 private:
  std::vector<AttrSet> sets_;
  std::vector<AttrSet> closure_;
};

/// Consolidated residual estimates z_tau with precisions lambda_tau.
/// Unmeasured residuals hold a zero array at zero precision, so the first
/// consolidation needs no special path.
class ResidualStore {
 public:
  struct Entry {
    MArrayD estimate;   // z_tau
    double precision;   // lambda_tau = sum of 1/sigma^2 over measurements
  };

  explicit ResidualStore(const Domain& domain) : domain_(&domain) {}

  /// Zero-initializes tau's entry if absent.
  Entry& ensure(const AttrSet& tau);

  bool has(const AttrSet& tau) const { return entries_.count(tau) > 0; }
  bool measured(const AttrSet& tau) const;
  double precision(const AttrSet& tau) const;
  const MArrayD& estimate(const AttrSet& tau) const;

  /// Folds a new measurement into tau's estimate by inverse-variance
  /// weighting: z' = (lambda z + z_new / s2) / (lambda + 1 / s2).
  void consolidate(const AttrSet& tau, const MArrayD& z_new, double sigma2);

  const std::map<AttrSet, Entry>& entries() const { return entries_; }
  const Domain& domain() const { return *domain_; }

 private:
  const Domain* domain_;
  std::map<AttrSet, Entry> entries_;
};

/// Marginal estimates mu_hat for a fixed target collection, maintained
/// incrementally: a residual update touches exactly the targets containing
/// it, located through a precomputed superset index.
class MarginalEstimates {
 public:
  MarginalEstimates(const Domain& domain, std::vector<AttrSet> targets);

  const std::vector<AttrSet>& targets() const { return targets_; }
  const MArrayD& estimate(const AttrSet& gamma) const;
  const std::map<AttrSet, MArrayD>& all() const { return estimates_; }

  /// mu_hat_gamma += Recon(delta, tau, gamma) for every target gamma >= tau.
  void lazy_apply(const AttrSet& tau, const MArrayD& delta,
                  const Domain& domain);

  /// Full reconstruction from scratch.
  void rebuild(const ResidualStore& store);

  /// Largest entrywise gap between the maintained estimates and a fresh
  /// rebuild; the audit path behind the full-rebuild debug flag.
  double divergence_from_rebuild(const ResidualStore& store) const;

 private:
  std::vector<AttrSet> targets_;
  std::map<AttrSet, MArrayD> estimates_;
  std::map<AttrSet, std::vector<AttrSet>> supersets_;
  const Domain* domain_;
};

/// GReM-MLE reconstruction: mu_hat_gamma = sum_{tau <= gamma} Recon(z_tau),
/// with unmeasured residuals contributing zero.
MarginalEstimates reconstruct_workload(const ResidualStore& store,
                                       const std::vector<AttrSet>& targets,
                                       const Domain& domain);

/// Single-residual estimate change applied in place of a full rebuild.
void lazy_update(MarginalEstimates& estimates, const AttrSet& tau,
                 const MArrayD& z_old, const MArrayD& z_new,
                 const Domain& domain);

}  // namespace privmarg

#endif  // PRIVMARG_GREM_HPP
