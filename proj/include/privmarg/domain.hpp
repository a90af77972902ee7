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

#ifndef PRIVMARG_DOMAIN_HPP
#define PRIVMARG_DOMAIN_HPP

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "privmarg/attrset.hpp"

namespace privmarg {

using Index = Eigen::Index;

/// The data universe: an ordered list of categorical attributes with their
/// cardinalities. Attribute i takes values in {0, ..., size(i) - 1}.
class Domain {
 public:
  Domain(std::vector<std::string> names, std::vector<Index> sizes)
      : names_(std::move(names)), sizes_(std::move(sizes)) {
    if (names_.size() != sizes_.size()) {
      throw std::invalid_argument("Domain: names/sizes length mismatch");
    }
    std::unordered_map<std::string, int> seen;
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (sizes_[i] < 2) {
        throw std::invalid_argument("Domain: attribute '" + names_[i] +
                                    "' needs cardinality >= 2");
      }
      if (!seen.emplace(names_[i], static_cast<int>(i)).second) {
        throw std::invalid_argument("Domain: duplicate attribute name '" +
                                    names_[i] + "'");
      }
      // Total size must stay representable; full-scale universes that
      // overflow int64 cannot be materialized anywhere downstream.
      if (__builtin_mul_overflow(total, static_cast<std::uint64_t>(sizes_[i]),
                                 &total) ||
          total > static_cast<std::uint64_t>(
                      std::numeric_limits<std::int64_t>::max())) {
        throw std::invalid_argument("Domain: total size overflows int64");
      }
    }
    index_by_name_ = std::move(seen);
  }

  int attr_count() const { return static_cast<int>(sizes_.size()); }

  Index size(int attr) const { return sizes_.at(static_cast<std::size_t>(attr)); }
  const std::vector<Index>& sizes() const { return sizes_; }

  const std::string& name(int attr) const {
    return names_.at(static_cast<std::size_t>(attr));
  }
  const std::vector<std::string>& names() const { return names_; }

  int index_of(const std::string& name) const {
    auto it = index_by_name_.find(name);
    if (it == index_by_name_.end()) {
      throw std::invalid_argument("Domain: unknown attribute '" + name + "'");
    }
    return it->second;
  }

  bool has_attr(const std::string& name) const {
    return index_by_name_.count(name) > 0;
  }

  std::uint64_t total_size() const {
    std::uint64_t total = 1;
    for (Index s : sizes_) total *= static_cast<std::uint64_t>(s);
    return total;
  }

  AttrSet all_attrs() const {
    std::vector<int> ids(sizes_.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    return AttrSet(std::move(ids));
  }

  void check_attrs(const AttrSet& attrs) const {
    if (!attrs.empty() && attrs.ids().back() >= attr_count()) {
      throw std::invalid_argument("Domain: attribute index " +
                                  std::to_string(attrs.ids().back()) +
                                  " out of range");
    }
  }

  /// Marginal shape over gamma: (n_i)_{i in gamma}, axes in attribute order.
  std::vector<Index> marginal_shape(const AttrSet& attrs) const {
    check_attrs(attrs);
    std::vector<Index> shape;
    shape.reserve(attrs.count());
    for (int a : attrs) shape.push_back(size(a));
    return shape;
  }

  /// Residual shape over tau: (n_i - 1)_{i in tau}.
  std::vector<Index> residual_shape(const AttrSet& attrs) const {
    check_attrs(attrs);
    std::vector<Index> shape;
    shape.reserve(attrs.count());
    for (int a : attrs) shape.push_back(size(a) - 1);
    return shape;
  }

  Index marginal_size(const AttrSet& attrs) const {
    check_attrs(attrs);
    Index n = 1;
    for (int a : attrs) n *= size(a);
    return n;
  }

  Index residual_size(const AttrSet& attrs) const {
    check_attrs(attrs);
    Index n = 1;
    for (int a : attrs) n *= size(a) - 1;
    return n;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Index> sizes_;
  std::unordered_map<std::string, int> index_by_name_;
};

/// A discrete tabular dataset: one row per record, one 0-based value index
/// per attribute. Rows are stored flat (N x d, row-major).
class DataTable {
 public:
  explicit DataTable(Domain domain) : domain_(std::move(domain)) {}

  DataTable(Domain domain, std::vector<std::int32_t> flat_records)
      : domain_(std::move(domain)), records_(std::move(flat_records)) {
    const std::size_t d = static_cast<std::size_t>(domain_.attr_count());
    if (d == 0 || records_.size() % d != 0) {
      throw std::invalid_argument("DataTable: flat record size mismatch");
    }
    for (std::size_t i = 0; i < records_.size(); ++i) {
      validate(static_cast<int>(i % d), records_[i]);
    }
  }

  const Domain& domain() const { return domain_; }

  Index record_count() const {
    return static_cast<Index>(records_.size() /
                              static_cast<std::size_t>(domain_.attr_count()));
  }

  void add_record(const std::vector<std::int32_t>& row) {
    if (row.size() != static_cast<std::size_t>(domain_.attr_count())) {
      throw std::invalid_argument("DataTable: row arity mismatch");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      validate(static_cast<int>(i), row[i]);
    }
    records_.insert(records_.end(), row.begin(), row.end());
  }

  std::int32_t value(Index record, int attr) const {
    return records_[static_cast<std::size_t>(record) *
                        static_cast<std::size_t>(domain_.attr_count()) +
                    static_cast<std::size_t>(attr)];
  }

 private:
  void validate(int attr, std::int32_t v) const {
    if (v < 0 || v >= domain_.size(attr)) {
      throw std::invalid_argument(
          "DataTable: value " + std::to_string(v) + " out of range for '" +
          domain_.name(attr) + "' (cardinality " +
          std::to_string(domain_.size(attr)) + ")");
    }
  }

  Domain domain_;
  std::vector<std::int32_t> records_;
};

}  // namespace privmarg

#endif  // PRIVMARG_DOMAIN_HPP
