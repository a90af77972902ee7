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

#include "privmarg/rng.hpp"

#include <cmath>

namespace privmarg {

double Rng::uniform() {
  // 53-bit mantissa, shifted into (0, 1] so log() is always finite.
  return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

Eigen::ArrayXd Rng::gaussian_array(Eigen::Index n, double stddev) {
  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = stddev * gaussian();
  return out;
}

double Rng::gumbel() {
  // Strictly interior uniform keeps both logs finite.
  const double u = (static_cast<double>(gen_() >> 12) + 0.5) * 0x1.0p-52;
  return -std::log(-std::log(u));
}

}  // namespace privmarg
