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

#ifndef PRIVMARG_ATTRSET_HPP
#define PRIVMARG_ATTRSET_HPP

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace privmarg {

/// A sorted set of attribute indices. Attribute subsets index both marginals
/// (gamma) and residuals (tau); they are small, so a sorted vector wins over
/// any tree or hash structure and gives a total order usable as a map key.
class AttrSet {
 public:
  AttrSet() = default;

  AttrSet(std::initializer_list<int> ids) : ids_(ids) { normalize(); }

  explicit AttrSet(std::vector<int> ids) : ids_(std::move(ids)) { normalize(); }

  std::size_t count() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  const std::vector<int>& ids() const { return ids_; }
  int operator[](std::size_t i) const { return ids_[i]; }

  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  bool contains(int attr) const {
    return std::binary_search(ids_.begin(), ids_.end(), attr);
  }

  bool subset_of(const AttrSet& other) const {
    return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(),
                         ids_.end());
  }

  AttrSet set_union(const AttrSet& other) const {
    std::vector<int> out;
    std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(),
                   other.ids_.end(), std::back_inserter(out));
    return AttrSet(std::move(out));
  }

  AttrSet intersect(const AttrSet& other) const {
    std::vector<int> out;
    std::set_intersection(ids_.begin(), ids_.end(), other.ids_.begin(),
                          other.ids_.end(), std::back_inserter(out));
    return AttrSet(std::move(out));
  }

  AttrSet difference(const AttrSet& other) const {
    std::vector<int> out;
    std::set_difference(ids_.begin(), ids_.end(), other.ids_.begin(),
                        other.ids_.end(), std::back_inserter(out));
    return AttrSet(std::move(out));
  }

  /// All 2^k subsets, in bitmask order (the empty set first, the full set
  /// last). Enumeration is capped: beyond 25 attributes the count no longer
  /// fits any sane workload and almost certainly signals a caller bug.
  std::vector<AttrSet> subsets() const {
    if (ids_.size() > kMaxEnumerableAttrs) {
      throw std::invalid_argument(
          "AttrSet::subsets: refusing to enumerate 2^" +
          std::to_string(ids_.size()) + " subsets");
    }
    const std::uint32_t k = static_cast<std::uint32_t>(ids_.size());
    std::vector<AttrSet> out;
    out.reserve(std::size_t{1} << k);
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << k); ++mask) {
      std::vector<int> ids;
      for (std::uint32_t b = 0; b < k; ++b) {
        if (mask & (std::uint32_t{1} << b)) ids.push_back(ids_[b]);
      }
      out.emplace_back(std::move(ids));
    }
    return out;
  }

  friend bool operator==(const AttrSet& a, const AttrSet& b) {
    return a.ids_ == b.ids_;
  }
  friend bool operator!=(const AttrSet& a, const AttrSet& b) {
    return !(a == b);
  }
  friend bool operator<(const AttrSet& a, const AttrSet& b) {
    return a.ids_ < b.ids_;
  }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(ids_[i]);
    }
    return s + "}";
  }

  static constexpr std::size_t kMaxEnumerableAttrs = 25;

 private:
  void normalize() {
    std::sort(ids_.begin(), ids_.end());
    auto last = std::unique(ids_.begin(), ids_.end());
    ids_.erase(last, ids_.end());
    if (!ids_.empty() && ids_.front() < 0) {
      throw std::invalid_argument("AttrSet: negative attribute index");
    }
  }

  std::vector<int> ids_;
};

}  // namespace privmarg

#endif  // PRIVMARG_ATTRSET_HPP
