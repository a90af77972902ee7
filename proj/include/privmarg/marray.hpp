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

#ifndef PRIVMARG_MARRAY_HPP
#define PRIVMARG_MARRAY_HPP

#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace privmarg {

using Index = Eigen::Index;

/// Dense multi-dimensional array with runtime rank, stored flat in row-major
/// order (last axis fastest). Rank 0 is a scalar: empty dims, one entry.
///
/// This is the value type behind marginals and residuals. It is deliberately
/// minimal: all interesting behavior lives in the free axis operations below,
/// which apply a linear map to every 1-D fiber along one axis.
template <typename Scalar>
class MArray {
 public:
  using Storage = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  /// Rank-0 scalar holding zero.
  MArray() : data_(1) { data_(0) = Scalar(0); }

  explicit MArray(std::vector<Index> dims)
      : dims_(std::move(dims)), data_(checked_size(dims_)) {
    data_.setZero();
  }

  MArray(std::vector<Index> dims, Storage data)
      : dims_(std::move(dims)), data_(std::move(data)) {
    if (data_.size() != checked_size(dims_)) {
      throw std::invalid_argument("MArray: data size does not match dims");
    }
  }

  static MArray scalar(Scalar v) {
    MArray a;
    a.data_(0) = v;
    return a;
  }

  Index rank() const { return static_cast<Index>(dims_.size()); }
  Index size() const { return data_.size(); }
  const std::vector<Index>& dims() const { return dims_; }
  Index dim(Index axis) const { return dims_.at(static_cast<std::size_t>(axis)); }

  Storage& data() { return data_; }
  const Storage& data() const { return data_; }

  Scalar& operator[](Index flat) { return data_(flat); }
  Scalar operator[](Index flat) const { return data_(flat); }

  Scalar at(std::initializer_list<Index> idx) const {
    return data_(flat_index(idx));
  }
  Scalar& at(std::initializer_list<Index> idx) {
    return data_(flat_index(idx));
  }

  /// Row-major flat offset of a multi-index.
  Index flat_index(std::initializer_list<Index> idx) const {
    if (static_cast<Index>(idx.size()) != rank()) {
      throw std::invalid_argument("MArray: index arity mismatch");
    }
    Index flat = 0;
    Index axis = 0;
    for (Index i : idx) {
      if (i < 0 || i >= dims_[static_cast<std::size_t>(axis)]) {
        throw std::out_of_range("MArray: index out of range");
      }
      flat = flat * dims_[static_cast<std::size_t>(axis)] + i;
      ++axis;
    }
    return flat;
  }

  /// Drops every length-1 axis. Free in row-major layout: only metadata moves.
  MArray squeezed() const {
    std::vector<Index> dims;
    for (Index d : dims_) {
      if (d != 1) dims.push_back(d);
    }
    return MArray(std::move(dims), data_);
  }

  /// Inserts a length-1 axis before position `pos`. Also metadata-only.
  MArray with_axis_inserted(Index pos) const {
    if (pos < 0 || pos > rank()) {
      throw std::invalid_argument("MArray: insert position out of range");
    }
    std::vector<Index> dims = dims_;
    dims.insert(dims.begin() + pos, 1);
    return MArray(std::move(dims), data_);
  }

  MArray& operator+=(const MArray& other) {
    require_same_shape(other);
    data_ += other.data_;
    return *this;
  }
  MArray& operator-=(const MArray& other) {
    require_same_shape(other);
    data_ -= other.data_;
    return *this;
  }
  MArray& operator*=(Scalar c) {
    data_ *= c;
    return *this;
  }

  friend MArray operator+(MArray a, const MArray& b) { return a += b; }
  friend MArray operator-(MArray a, const MArray& b) { return a -= b; }

  void require_same_shape(const MArray& other) const {
    if (dims_ != other.dims_) {
      throw std::invalid_argument("MArray: shape mismatch");
    }
  }

 private:
  static Index checked_size(const std::vector<Index>& dims) {
    Index n = 1;
    for (Index d : dims) {
      if (d < 1) throw std::invalid_argument("MArray: axis length must be >= 1");
      n *= d;
    }
    return n;
  }

  std::vector<Index> dims_;
  Storage data_;
};

using MArrayD = MArray<double>;

namespace detail {

/// Loop geometry for fiber operations along one axis of a row-major array:
/// the array factors as (outer, len, inner) with the axis in the middle.
struct AxisSpan {
  Index outer;
  Index len;
  Index inner;
};

template <typename Scalar>
AxisSpan axis_span(const MArray<Scalar>& arr, Index axis) {
  if (axis < 0 || axis >= arr.rank()) {
    throw std::invalid_argument("axis " + std::to_string(axis) +
                                " out of range for rank " +
                                std::to_string(arr.rank()));
  }
  AxisSpan s{1, arr.dim(axis), 1};
  for (Index k = 0; k < axis; ++k) s.outer *= arr.dim(k);
  for (Index k = axis + 1; k < arr.rank(); ++k) s.inner *= arr.dim(k);
  return s;
}

template <typename Scalar>
std::vector<Index> with_axis_len(const MArray<Scalar>& arr, Index axis,
                                 Index len) {
  std::vector<Index> dims = arr.dims();
  dims[static_cast<std::size_t>(axis)] = len;
  return dims;
}

}  // namespace detail

/// Collapses the axis to length 1 by summing fibers.
template <typename Scalar>
MArray<Scalar> axis_sum(const MArray<Scalar>& arr, Index axis) {
  const auto s = detail::axis_span(arr, axis);
  MArray<Scalar> out(detail::with_axis_len(arr, axis, 1));
  const auto& in = arr.data();
  auto& od = out.data();
  if (s.inner == 1) {
    for (Index o = 0; o < s.outer; ++o) {
      od(o) = in.segment(o * s.len, s.len).sum();
    }
  } else {
    for (Index o = 0; o < s.outer; ++o) {
      auto acc = od.segment(o * s.inner, s.inner);
      acc = in.segment(o * s.len * s.inner, s.inner);
      for (Index j = 1; j < s.len; ++j) {
        acc += in.segment((o * s.len + j) * s.inner, s.inner);
      }
    }
  }
  return out;
}

/// Differencing against the first slice: fiber v of length l maps to
/// v[1:] - v[0], shrinking the axis to l - 1.
template <typename Scalar>
MArray<Scalar> axis_sub(const MArray<Scalar>& arr, Index axis) {
  const auto s = detail::axis_span(arr, axis);
  if (s.len < 2) {
    throw std::invalid_argument("axis_sub: axis length must be >= 2");
  }
  const Index m = s.len - 1;
  MArray<Scalar> out(detail::with_axis_len(arr, axis, m));
  const auto& in = arr.data();
  auto& od = out.data();
  if (s.inner == 1) {
    for (Index o = 0; o < s.outer; ++o) {
      od.segment(o * m, m) =
          in.segment(o * s.len + 1, m) - in(o * s.len);
    }
  } else {
    for (Index o = 0; o < s.outer; ++o) {
      const auto first = in.segment(o * s.len * s.inner, s.inner);
      for (Index j = 1; j < s.len; ++j) {
        od.segment((o * m + j - 1) * s.inner, s.inner) =
            in.segment((o * s.len + j) * s.inner, s.inner) - first;
      }
    }
  }
  return out;
}

/// Pseudoinverse of axis_sub: fiber v of length l - 1 maps to u - mean(u)
/// where u = [0, v], growing the axis back to l.
template <typename Scalar>
MArray<Scalar> axis_center(const MArray<Scalar>& arr, Index axis) {
  const auto s = detail::axis_span(arr, axis);
  const Index l = s.len + 1;
  MArray<Scalar> out(detail::with_axis_len(arr, axis, l));
  const auto& in = arr.data();
  auto& od = out.data();
  const Scalar inv_l = Scalar(1) / static_cast<Scalar>(l);
  if (s.inner == 1) {
    for (Index o = 0; o < s.outer; ++o) {
      const auto v = in.segment(o * s.len, s.len);
      const Scalar mean = v.sum() * inv_l;
      od(o * l) = -mean;
      od.segment(o * l + 1, s.len) = v - mean;
    }
  } else {
    typename MArray<Scalar>::Storage mean(s.inner);
    for (Index o = 0; o < s.outer; ++o) {
      mean = in.segment(o * s.len * s.inner, s.inner);
      for (Index j = 1; j < s.len; ++j) {
        mean += in.segment((o * s.len + j) * s.inner, s.inner);
      }
      mean *= inv_l;
      od.segment(o * l * s.inner, s.inner) = -mean;
      for (Index j = 0; j < s.len; ++j) {
        od.segment((o * l + j + 1) * s.inner, s.inner) =
            in.segment((o * s.len + j) * s.inner, s.inner) - mean;
      }
    }
  }
  return out;
}

/// Pseudoinverse of axis_sum: expands a singleton axis to length k, spreading
/// the value evenly so the sum across the axis is unchanged.
template <typename Scalar>
MArray<Scalar> axis_smear(const MArray<Scalar>& arr, Index axis, Index k) {
  const auto s = detail::axis_span(arr, axis);
  if (s.len != 1) {
    throw std::invalid_argument("axis_smear: axis length must be 1");
  }
  if (k < 1) throw std::invalid_argument("axis_smear: k must be >= 1");
  MArray<Scalar> out(detail::with_axis_len(arr, axis, k));
  const auto& in = arr.data();
  auto& od = out.data();
  const Scalar inv_k = Scalar(1) / static_cast<Scalar>(k);
  if (s.inner == 1) {
    for (Index o = 0; o < s.outer; ++o) {
      od.segment(o * k, k).setConstant(in(o) * inv_k);
    }
  } else {
    typename MArray<Scalar>::Storage v(s.inner);
    for (Index o = 0; o < s.outer; ++o) {
      v = in.segment(o * s.inner, s.inner) * inv_k;
      for (Index j = 0; j < k; ++j) {
        od.segment((o * k + j) * s.inner, s.inner) = v;
      }
    }
  }
  return out;
}

enum class AxisOp { Sum, Sub, Center, Smear };

template <typename Scalar>
MArray<Scalar> apply_axis_op(const MArray<Scalar>& arr, Index axis, AxisOp op,
                             Index k = 0) {
  switch (op) {
    case AxisOp::Sum:
      return axis_sum(arr, axis);
    case AxisOp::Sub:
      return axis_sub(arr, axis);
    case AxisOp::Center:
      return axis_center(arr, axis);
    case AxisOp::Smear:
      return axis_smear(arr, axis, k);
  }
  throw std::logic_error("apply_axis_op: unknown op");
}

}  // namespace privmarg

#endif  // PRIVMARG_MARRAY_HPP
