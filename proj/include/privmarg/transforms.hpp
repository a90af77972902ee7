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
// Conversions between marginals and residuals via in-axis operations.
//
// A marginal over gamma is the contingency table of the dataset projected
// onto gamma. Its residual over tau <= gamma isolates the information that
// no strictly-lower-order marginal carries. decomp() maps a marginal to one
// residual; recon() maps a residual back to its additive marginal component.
// Summing recon() over all tau <= gamma inverts decomposition exactly.

#ifndef PRIVMARG_TRANSFORMS_HPP
#define PRIVMARG_TRANSFORMS_HPP

#include <map>
#include <stdexcept>
#include <vector>

#include "privmarg/attrset.hpp"
#include "privmarg/domain.hpp"
#include "privmarg/marray.hpp"

namespace privmarg {

/// Count array over an attribute subset, one axis per attribute in ascending
/// attribute order, axis i of length n_i.
struct Marginal {
  AttrSet attrs;
  MArrayD data;
};

/// Residual array over an attribute subset, axis i of length n_i - 1.
/// The empty residual is the scalar total.
struct Residual {
  AttrSet attrs;
  MArrayD data;
};

inline void check_marginal_shape(const Domain& domain, const Marginal& m) {
  if (m.data.dims() != domain.marginal_shape(m.attrs)) {
    throw std::invalid_argument("marginal shape does not match domain");
  }
}

inline void check_residual_shape(const Domain& domain, const Residual& r) {
  if (r.data.dims() != domain.residual_shape(r.attrs)) {
    throw std::invalid_argument("residual shape does not match domain");
  }
}

/// Tabulates the marginal over `attrs` by a single pass over the records.
inline Marginal compute_marginal(const DataTable& table, const AttrSet& attrs) {
  const Domain& domain = table.domain();
  domain.check_attrs(attrs);
  MArrayD data(domain.marginal_shape(attrs));
  // Row-major strides over the marginal's axes.
  const std::size_t k = attrs.count();
  std::vector<Index> stride(k);
  Index acc = 1;
  for (std::size_t i = k; i-- > 0;) {
    stride[i] = acc;
    acc *= domain.size(attrs[i]);
  }
  const Index n_records = table.record_count();
  for (Index r = 0; r < n_records; ++r) {
    Index flat = 0;
    for (std::size_t i = 0; i < k; ++i) {
      flat += stride[i] * table.value(r, attrs[i]);
    }
    data[flat] += 1.0;
  }
  return Marginal{attrs, std::move(data)};
}

/// Decomposes a gamma-marginal into its tau-residual, tau <= gamma: sum out
/// every axis in gamma \ tau (shrinking the array first), then difference
/// every axis in tau. Axes are processed in ascending attribute order.
inline Residual decomp(const Marginal& m, const AttrSet& target) {
  if (!target.subset_of(m.attrs)) {
    throw std::invalid_argument("decomp: target is not a subset of the marginal attributes");
  }
  MArrayD arr = m.data;
  for (std::size_t pos = 0; pos < m.attrs.count(); ++pos) {
    if (!target.contains(m.attrs[pos])) {
      arr = axis_sum(arr, static_cast<Index>(pos));
    }
  }
  for (std::size_t pos = 0; pos < m.attrs.count(); ++pos) {
    if (target.contains(m.attrs[pos])) {
      arr = axis_sub(arr, static_cast<Index>(pos));
    }
  }
  // Drop exactly the summed-out axes; residual axes may legitimately have
  // length 1 when n_i = 2.
  std::vector<Index> dims;
  for (std::size_t pos = 0; pos < m.attrs.count(); ++pos) {
    if (target.contains(m.attrs[pos])) {
      dims.push_back(arr.dim(static_cast<Index>(pos)));
    }
  }
  return Residual{target, MArrayD(std::move(dims), std::move(arr.data()))};
}

/// Reconstructs the additive marginal component of a tau-residual for a
/// target gamma >= tau: center every tau axis, then smear a fresh axis of
/// length n_i for every i in gamma \ tau. Linear in the residual values.
inline Marginal recon(const Residual& r, const AttrSet& target,
                      const Domain& domain) {
  if (!r.attrs.subset_of(target)) {
    throw std::invalid_argument("recon: residual attributes must be a subset of the target");
  }
  check_residual_shape(domain, r);
  MArrayD arr = r.data;
  // Singleton axes for the smeared attributes first; insertion is free.
  for (std::size_t pos = 0; pos < target.count(); ++pos) {
    if (!r.attrs.contains(target[pos])) {
      arr = arr.with_axis_inserted(static_cast<Index>(pos));
    }
  }
  for (std::size_t pos = 0; pos < target.count(); ++pos) {
    if (r.attrs.contains(target[pos])) {
      arr = axis_center(arr, static_cast<Index>(pos));
    }
  }
  for (std::size_t pos = 0; pos < target.count(); ++pos) {
    if (!r.attrs.contains(target[pos])) {
      arr = axis_smear(arr, static_cast<Index>(pos), domain.size(target[pos]));
    }
  }
  return Marginal{target, std::move(arr)};
}

/// All 2^|gamma| residual components of a marginal.
inline std::map<AttrSet, Residual> decompose_full(const Marginal& m) {
  std::map<AttrSet, Residual> out;
  for (const AttrSet& tau : m.attrs.subsets()) {
    out.emplace(tau, decomp(m, tau));
  }
  return out;
}

/// Inverse of decompose_full: sums the reconstructed components over every
/// subset of gamma. Throws if any subset is missing from the map.
inline Marginal recon_sum(const std::map<AttrSet, Residual>& residuals,
                          const AttrSet& gamma, const Domain& domain) {
  Marginal out{gamma, MArrayD(domain.marginal_shape(gamma))};
  for (const AttrSet& tau : gamma.subsets()) {
    auto it = residuals.find(tau);
    if (it == residuals.end()) {
      throw std::invalid_argument("recon_sum: missing residual for subset " +
                                  tau.to_string());
    }
    out.data += recon(it->second, gamma, domain).data;
  }
  return out;
}

}  // namespace privmarg

#endif  // PRIVMARG_TRANSFORMS_HPP
