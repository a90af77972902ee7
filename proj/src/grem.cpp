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

#include "privmarg/grem.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace privmarg {

Workload::Workload(std::vector<AttrSet> sets) : sets_(std::move(sets)) {
  if (sets_.empty()) {
    throw std::invalid_argument("Workload: empty workload");
  }
  std::sort(sets_.begin(), sets_.end());
  sets_.erase(std::unique(sets_.begin(), sets_.end()), sets_.end());
  std::set<AttrSet> closure;
  for (const AttrSet& gamma : sets_) {
    for (const AttrSet& tau : gamma.subsets()) closure.insert(tau);
  }
  closure_.assign(closure.begin(), closure.end());
}

double Workload::weight(const AttrSet& gamma) const {
  double w = 0.0;
  for (const AttrSet& pi : sets_) {
    w += static_cast<double>(gamma.intersect(pi).count());
  }
  return w;
}

bool Workload::contains(const AttrSet& gamma) const {
  return std::binary_search(sets_.begin(), sets_.end(), gamma);
}

ResidualStore::Entry& ResidualStore::ensure(const AttrSet& tau) {
  auto it = entries_.find(tau);
  if (it == entries_.end()) {
    it = entries_
             .emplace(tau, Entry{MArrayD(domain_->residual_shape(tau)), 0.0})
             .first;
  }
  return it->second;
}

bool ResidualStore::measured(const AttrSet& tau) const {
  auto it = entries_.find(tau);
  return it != entries_.end() && it->second.precision > 0.0;
}

double ResidualStore::precision(const AttrSet& tau) const {
  auto it = entries_.find(tau);
  return it == entries_.end() ? 0.0 : it->second.precision;
}

const MArrayD& ResidualStore::estimate(const AttrSet& tau) const {
  return entries_.at(tau).estimate;
}

void ResidualStore::consolidate(const AttrSet& tau, const MArrayD& z_new,
                                double sigma2) {
  if (!(sigma2 > 0.0)) {
    throw std::invalid_argument("consolidate: variance must be positive");
  }
  Entry& e = ensure(tau);
  e.estimate.require_same_shape(z_new);
  const double w = 1.0 / sigma2;
  const double total = e.precision + w;
  e.estimate.data() =
      (e.precision * e.estimate.data() + w * z_new.data()) / total;
  e.precision = total;
}

MarginalEstimates::MarginalEstimates(const Domain& domain,
                                     std::vector<AttrSet> targets)
    : targets_(std::move(targets)), domain_(&domain) {
  std::sort(targets_.begin(), targets_.end());
  targets_.erase(std::unique(targets_.begin(), targets_.end()),
                 targets_.end());
  for (const AttrSet& gamma : targets_) {
    estimates_.emplace(gamma, MArrayD(domain.marginal_shape(gamma)));
    for (const AttrSet& tau : gamma.subsets()) {
      supersets_[tau].push_back(gamma);
    }
  }
}

const MArrayD& MarginalEstimates::estimate(const AttrSet& gamma) const {
  auto it = estimates_.find(gamma);
  if (it == estimates_.end()) {
    throw std::invalid_argument("MarginalEstimates: " + gamma.to_string() +
                                " is not a target");
  }
  return it->second;
}

void MarginalEstimates::lazy_apply(const AttrSet& tau, const MArrayD& delta,
                                   const Domain& domain) {
  auto it = supersets_.find(tau);
  if (it == supersets_.end()) return;  // no target contains tau
  const Residual r{tau, delta};
  for (const AttrSet& gamma : it->second) {
    estimates_.at(gamma) += recon(r, gamma, domain).data;
  }
}

void MarginalEstimates::rebuild(const ResidualStore& store) {
  for (auto& [gamma, est] : estimates_) {
    est.data().setZero();
    for (const AttrSet& tau : gamma.subsets()) {
      if (!store.measured(tau)) continue;
      est += recon(Residual{tau, store.estimate(tau)}, gamma, *domain_).data;
    }
  }
}

double MarginalEstimates::divergence_from_rebuild(
    const ResidualStore& store) const {
  MarginalEstimates fresh(*domain_, targets_);
  fresh.rebuild(store);
  double worst = 0.0;
  for (const auto& [gamma, est] : estimates_) {
    worst = std::max(
        worst,
        (est.data() - fresh.estimates_.at(gamma).data()).abs().maxCoeff());
  }
  return worst;
}

MarginalEstimates reconstruct_workload(const ResidualStore& store,
                                       const std::vector<AttrSet>& targets,
                                       const Domain& domain) {
  MarginalEstimates out(domain, targets);
  out.rebuild(store);
  return out;
}

void lazy_update(MarginalEstimates& estimates, const AttrSet& tau,
                 const MArrayD& z_old, const MArrayD& z_new,
                 const Domain& domain) {
  MArrayD delta = z_new;
  delta -= z_old;
  estimates.lazy_apply(tau, delta, domain);
}

}  // namespace privmarg
