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

#include "privmarg/accountant.hpp"

#include <stdexcept>
#include <string>

namespace privmarg {

Accountant::Accountant(double budget) : budget_(budget) {
  if (!(budget > 0.0)) {
    throw std::invalid_argument("Accountant: budget must be positive");
  }
}

void Accountant::charge(const std::string& label, double cost) {
  if (cost < 0.0) {
    throw std::invalid_argument("Accountant: negative cost for '" + label + "'");
  }
  if (used_ + cost > budget_ + kOverspendTolerance) {
    throw std::runtime_error("Accountant: overspend at '" + label + "': " +
                             std::to_string(used_ + cost) + " > " +
                             std::to_string(budget_));
  }
  used_ += cost;
  ledger_.push_back(LedgerEntry{label, cost});
}

}  // namespace privmarg
