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

#ifndef PRIVMARG_ACCOUNTANT_HPP
#define PRIVMARG_ACCOUNTANT_HPP

#include <string>
#include <vector>

namespace privmarg {

struct LedgerEntry {
  std::string label;
  double cost;
};

/// Running zCDP ledger. Costs compose additively; spending past the total
/// budget (beyond a 1e-12 slack for the exact-exhaustion arithmetic of the
/// final round) is a hard fault, never a warning.
class Accountant {
 public:
  explicit Accountant(double budget);

  void charge(const std::string& label, double cost);

  double budget() const { return budget_; }
  double used() const { return used_; }
  double remaining() const { return budget_ - used_; }
  const std::vector<LedgerEntry>& ledger() const { return ledger_; }

  static constexpr double kOverspendTolerance = 1e-12;

 private:
  double budget_;
  double used_ = 0.0;
  std::vector<LedgerEntry> ledger_;
};

}  // namespace privmarg

#endif  // PRIVMARG_ACCOUNTANT_HPP
