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

#ifndef PRIVMARG_RNG_HPP
#define PRIVMARG_RNG_HPP

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace privmarg {

/// Seeded random stream. All randomness in a mechanism run flows through one
/// instance so that identical seed + call sequence reproduces identical
/// output. Gaussian and Gumbel variates are derived from the raw 64-bit
/// stream directly rather than through std::distributions, whose output is
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in (0, 1].
  double uniform();

  /// Standard normal via Box-Muller.
  double gaussian();

  double gaussian(double mean, double stddev) {
    return mean + stddev * gaussian();
  }

  Eigen::ArrayXd gaussian_array(Eigen::Index n, double stddev);

  /// Standard Gumbel(0, 1).
  double gumbel();

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace privmarg

#endif  // PRIVMARG_RNG_HPP
