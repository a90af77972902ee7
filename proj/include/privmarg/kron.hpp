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
// Explicit Kronecker-product query matrices and brute-force solvers.
//
// This module is the slow, transparent counterpart of the in-axis transforms:
// every operation is an honest dense-matrix construction, so it anchors the
// fast path in tests and serves as the timing baseline for the benchmark CLI.
// Row-major array flattening matches Kronecker factor order, so factor k of a
// product acts on axis k of the corresponding array.

#ifndef PRIVMARG_KRON_HPP
#define PRIVMARG_KRON_HPP

#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "privmarg/attrset.hpp"
#include "privmarg/domain.hpp"
#include "privmarg/marray.hpp"
#include "privmarg/transforms.hpp"

namespace privmarg::kron {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Dense matrices above this edge length are refused; the oracle is meant for
/// small domains only.
inline constexpr Index kDenseCap = 10'000;

inline void check_dense(Index rows, Index cols) {
  if (rows > kDenseCap || cols > kDenseCap) {
    throw std::invalid_argument("kron: dense matrix exceeds oracle size cap");
  }
}

/// Subtraction matrix S_(l) = [-1 | I], mapping v to v[1:] - v[0].
inline MatrixXd sub_matrix(Index ell) {
  if (ell < 2) throw std::invalid_argument("sub_matrix: need length >= 2");
  MatrixXd s = MatrixXd::Zero(ell - 1, ell);
  s.col(0).setConstant(-1.0);
  s.block(0, 1, ell - 1, ell - 1).setIdentity();
  return s;
}

/// Pseudoinverse S_(l)^+ = [0; I] - (1/l) * ones, mapping v to the centered
/// zero-padded vector.
inline MatrixXd sub_pinv(Index ell) {
  if (ell < 2) throw std::invalid_argument("sub_pinv: need length >= 2");
  MatrixXd s = MatrixXd::Zero(ell, ell - 1);
  s.block(1, 0, ell - 1, ell - 1).setIdentity();
  s.array() -= 1.0 / static_cast<double>(ell);
  return s;
}

inline MatrixXd kron_product(const MatrixXd& a, const MatrixXd& b) {
  check_dense(a.rows() * b.rows(), a.cols() * b.cols());
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline MatrixXd kron_product(const std::vector<MatrixXd>& factors) {
  MatrixXd out = MatrixXd::Identity(1, 1);
  for (const MatrixXd& f : factors) out = kron_product(out, f);
  return out;
}

/// M_gamma: maps the flattened data array (size n) to the flattened
/// gamma-marginal. Identity factors on gamma axes, row-of-ones elsewhere.
inline MatrixXd build_marginal_query(const Domain& domain,
                                     const AttrSet& gamma) {
  domain.check_attrs(gamma);
  std::vector<MatrixXd> factors;
  for (int k = 0; k < domain.attr_count(); ++k) {
    const Index n = domain.size(k);
    factors.push_back(gamma.contains(k) ? MatrixXd(MatrixXd::Identity(n, n))
                                        : MatrixXd(MatrixXd::Ones(1, n)));
  }
  return kron_product(factors);
}

/// R_tau: maps the flattened data array to the flattened tau-residual.
inline MatrixXd build_residual_query(const Domain& domain,
                                     const AttrSet& tau) {
  domain.check_attrs(tau);
  std::vector<MatrixXd> factors;
  for (int k = 0; k < domain.attr_count(); ++k) {
    const Index n = domain.size(k);
    factors.push_back(tau.contains(k) ? sub_matrix(n)
                                      : MatrixXd(MatrixXd::Ones(1, n)));
  }
  return kron_product(factors);
}

/// T_{tau,gamma}: maps a flattened gamma-marginal to its tau-residual.
/// Scalar-1 factors for attributes outside gamma drop out of the product.
inline MatrixXd build_decomp_map(const Domain& domain, const AttrSet& tau,
                                 const AttrSet& gamma) {
  if (!tau.subset_of(gamma)) {
    throw std::invalid_argument("build_decomp_map: tau must be within gamma");
  }
  std::vector<MatrixXd> factors;
  for (int k : gamma) {
    const Index n = domain.size(k);
    factors.push_back(tau.contains(k) ? sub_matrix(n)
                                      : MatrixXd(MatrixXd::Ones(1, n)));
  }
  return kron_product(factors);
}

/// T^+_{tau,gamma}: maps a flattened tau-residual to its additive component
/// of the gamma-marginal.
inline MatrixXd build_recon_map(const Domain& domain, const AttrSet& tau,
                                const AttrSet& gamma) {
  if (!tau.subset_of(gamma)) {
    throw std::invalid_argument("build_recon_map: tau must be within gamma");
  }
  std::vector<MatrixXd> factors;
  for (int k : gamma) {
    const Index n = domain.size(k);
    factors.push_back(
        tau.contains(k)
            ? sub_pinv(n)
            : MatrixXd(MatrixXd::Constant(n, 1, 1.0 / static_cast<double>(n))));
  }
  return kron_product(factors);
}

/// V_tau = T_{tau,tau} T_{tau,tau}^T: the residual noise covariance induced
/// by decomposing an isotropically noised marginal.
inline MatrixXd residual_covariance(const Domain& domain, const AttrSet& tau) {
  const MatrixXd t = build_decomp_map(domain, tau, tau);
  return t * t.transpose();
}

/// One step of the shuffle algorithm: applies a dense factor to every fiber
/// along `axis`. In row-major layout the fibers for one outer block form a
/// contiguous (len x inner) matrix, so each step is a single GEMM per block.
template <typename Scalar>
MArray<Scalar> mode_product(const MArray<Scalar>& arr, Index axis,
                            const Eigen::Matrix<Scalar, Eigen::Dynamic,
                                                Eigen::Dynamic>& factor) {
  using RowMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic,
                               Eigen::RowMajor>;
  const auto span = detail::axis_span(arr, axis);
  if (factor.cols() != span.len) {
    throw std::invalid_argument("mode_product: factor width does not match axis");
  }
  std::vector<Index> dims = arr.dims();
  dims[static_cast<std::size_t>(axis)] = factor.rows();
  MArray<Scalar> out(std::move(dims));
  for (Index o = 0; o < span.outer; ++o) {
    Eigen::Map<const RowMat> in_block(
        arr.data().data() + o * span.len * span.inner, span.len, span.inner);
    Eigen::Map<RowMat> out_block(
        out.data().data() + o * factor.rows() * span.inner, factor.rows(),
        span.inner);
    out_block.noalias() = factor * in_block;
  }
  return out;
}

/// Decomposition via the shuffle algorithm with dense per-axis factors.
/// Matches decomp() exactly; used as the benchmark baseline.
inline Residual shuffle_decomp(const Marginal& m, const AttrSet& tau,
                               const Domain& domain) {
  if (!tau.subset_of(m.attrs)) {
    throw std::invalid_argument("shuffle_decomp: tau must be within gamma");
  }
  MArrayD arr = m.data;
  for (std::size_t pos = 0; pos < m.attrs.count(); ++pos) {
    const int attr = m.attrs[pos];
    const Index n = domain.size(attr);
    const MatrixXd factor =
        tau.contains(attr) ? sub_matrix(n) : MatrixXd(MatrixXd::Ones(1, n));
    arr = mode_product(arr, static_cast<Index>(pos), factor);
  }
  std::vector<Index> dims;
  for (std::size_t pos = 0; pos < m.attrs.count(); ++pos) {
    if (tau.contains(m.attrs[pos])) {
      dims.push_back(arr.dim(static_cast<Index>(pos)));
    }
  }
  return Residual{tau, MArrayD(std::move(dims), std::move(arr.data()))};
}

/// Reconstruction via the shuffle algorithm. Matches recon() exactly.
inline Marginal shuffle_recon(const Residual& r, const AttrSet& gamma,
                              const Domain& domain) {
  if (!r.attrs.subset_of(gamma)) {
    throw std::invalid_argument("shuffle_recon: residual attrs must be within gamma");
  }
  MArrayD arr = r.data;
  for (std::size_t pos = 0; pos < gamma.count(); ++pos) {
    if (!r.attrs.contains(gamma[pos])) {
      arr = arr.with_axis_inserted(static_cast<Index>(pos));
    }
  }
  for (std::size_t pos = 0; pos < gamma.count(); ++pos) {
    const int attr = gamma[pos];
    const Index n = domain.size(attr);
    const MatrixXd factor =
        r.attrs.contains(attr)
            ? sub_pinv(n)
            : MatrixXd::Constant(n, 1, 1.0 / static_cast<double>(n));
    arr = mode_product(arr, static_cast<Index>(pos), factor);
  }
  return Marginal{gamma, std::move(arr)};
}

/// One noisy residual observation in vector form.
struct ResidualObservation {
  AttrSet tau;
  VectorXd value;
  double sigma2;
};

/// Normal-equations reference for maximum-likelihood reconstruction: solves
/// each residual's inverse-covariance weighted average with explicit V_tau
/// matrices, then recombines with explicit T^+ maps. Deliberately shares no
/// code with the streaming engine.
inline std::map<AttrSet, VectorXd> brute_force_mle(
    const std::vector<ResidualObservation>& observations,
    const std::vector<AttrSet>& workload, const Domain& domain) {
  if (domain.total_size() > 200) {
    throw std::invalid_argument("brute_force_mle: domain exceeds oracle cap");
  }
  // Consolidated residual per tau from the normal equations
  //   (sum_i V^-1 / s_i) z = sum_i V^-1 z_i / s_i.
  std::map<AttrSet, VectorXd> consolidated;
  std::map<AttrSet, MatrixXd> lhs;
  std::map<AttrSet, VectorXd> rhs;
  for (const auto& obs : observations) {
    const MatrixXd vinv = residual_covariance(domain, obs.tau).inverse();
    auto [it, fresh] = lhs.try_emplace(obs.tau,
                                       MatrixXd::Zero(vinv.rows(), vinv.cols()));
    it->second += vinv / obs.sigma2;
    auto [rit, rfresh] = rhs.try_emplace(obs.tau, VectorXd::Zero(vinv.rows()));
    rit->second += vinv * obs.value / obs.sigma2;
  }
  for (const auto& [tau, a] : lhs) {
    consolidated.emplace(tau, a.ldlt().solve(rhs.at(tau)));
  }
  std::map<AttrSet, VectorXd> out;
  for (const AttrSet& gamma : workload) {
    VectorXd mu = VectorXd::Zero(domain.marginal_size(gamma));
    for (const AttrSet& tau : gamma.subsets()) {
      auto it = consolidated.find(tau);
      if (it == consolidated.end()) continue;  // unmeasured: zero estimate
      mu += build_recon_map(domain, tau, gamma) * it->second;
    }
    out.emplace(gamma, std::move(mu));
  }
  return out;
}

}  // namespace privmarg::kron

#endif  // PRIVMARG_KRON_HPP
