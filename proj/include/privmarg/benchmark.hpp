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

#ifndef PRIVMARG_BENCHMARK_HPP
#define PRIVMARG_BENCHMARK_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace privmarg {

struct BenchmarkRow {
  int setting;         // 1: n_i = 16, vary |gamma|; 2: |gamma| = 3, vary n_i
  long long size;      // the varied parameter: |gamma| or n_i
  std::string method;  // decomp/recon x inaxis/kron
  double seconds;
};

struct BenchmarkPoint {
  int setting;
  int gamma_card;
  long long attr_size;
  double decomp_inaxis, decomp_kron, recon_inaxis, recon_kron;
};

/// Times the in-axis decomposition/reconstruction against the dense-factor
/// shuffle baseline on the two standard grids. Outputs are cross-checked to
/// 1e-10 before any timing; disagreement throws.
std::vector<BenchmarkPoint> run_benchmark(int reps, std::uint64_t seed);

std::vector<BenchmarkRow> to_rows(const std::vector<BenchmarkPoint>& points);

void write_benchmark_csv(std::ostream& out,
                         const std::vector<BenchmarkRow>& rows);

/// Single benchmark point; exposed for targeted tests.
BenchmarkPoint benchmark_point(int setting, int gamma_card,
                               long long attr_size, int reps,
                               std::uint64_t seed);

}  // namespace privmarg

#endif  // PRIVMARG_BENCHMARK_HPP
