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

#include "privmarg/benchmark.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "privmarg/kron.hpp"
#include "privmarg/rng.hpp"
#include "privmarg/transforms.hpp"

namespace privmarg {

namespace {

// Skip grid points whose dense baseline would need more memory than this.
constexpr long long kMaxCells = 20'000'000;

volatile double g_sink = 0.0;  // keeps timed results alive

double time_once(const std::function<double()>& op) {
  // Repeat until the clock resolution stops mattering, then average.
  int iters = 1;
  for (;;) {
    const auto begin = std::chrono::steady_clock::now();
    double acc = 0.0;
    for (int i = 0; i < iters; ++i) acc += op();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - begin)
            .count();
    g_sink = g_sink + acc;
    if (elapsed >= 5e-3 || iters >= (1 << 20)) {
      return elapsed / static_cast<double>(iters);
    }
    iters *= 4;
  }
}

double time_best_of(int reps, const std::function<double()>& op) {
  op();  // warmup
  double best = time_once(op);
  for (int r = 1; r < reps; ++r) best = std::min(best, time_once(op));
  return best;
}

}  // namespace

BenchmarkPoint benchmark_point(int setting, int gamma_card,
                               long long attr_size, int reps,
                               std::uint64_t seed) {
  std::vector<std::string> names;
  std::vector<Index> sizes;
  std::vector<int> ids;
  for (int i = 0; i < gamma_card; ++i) {
    names.push_back("a" + std::to_string(i));
    sizes.push_back(static_cast<Index>(attr_size));
    ids.push_back(i);
  }
  const Domain domain(names, sizes);
  const AttrSet gamma(ids);

  Rng rng(seed);
  Marginal mu{gamma, MArrayD(domain.marginal_shape(gamma))};
  for (Index i = 0; i < mu.data.size(); ++i) {
    mu.data[i] = std::floor(1000.0 * rng.uniform());
  }
  const Residual zeta = decomp(mu, gamma);

  // Correctness gate before any timing.
  {
    const Residual z_kron = kron::shuffle_decomp(mu, gamma, domain);
    const double scale = 1.0 + mu.data.data().abs().maxCoeff();
    if ((zeta.data.data() - z_kron.data.data()).abs().maxCoeff() >
        1e-10 * scale) {
      throw std::runtime_error("benchmark: decomp paths disagree");
    }
    const Marginal m_in = recon(zeta, gamma, domain);
    const Marginal m_kron = kron::shuffle_recon(zeta, gamma, domain);
    if ((m_in.data.data() - m_kron.data.data()).abs().maxCoeff() >
        1e-10 * scale) {
      throw std::runtime_error("benchmark: recon paths disagree");
    }
  }

  BenchmarkPoint point;
  point.setting = setting;
  point.gamma_card = gamma_card;
  point.attr_size = attr_size;
  point.decomp_inaxis =
      time_best_of(reps, [&] { return decomp(mu, gamma).data.data()(0); });
  point.decomp_kron = time_best_of(
      reps, [&] { return kron::shuffle_decomp(mu, gamma, domain).data.data()(0); });
  point.recon_inaxis = time_best_of(
      reps, [&] { return recon(zeta, gamma, domain).data.data()(0); });
  point.recon_kron = time_best_of(reps, [&] {
    return kron::shuffle_recon(zeta, gamma, domain).data.data()(0);
  });
  return point;
}

std::vector<BenchmarkPoint> run_benchmark(int reps, std::uint64_t seed) {
  std::vector<BenchmarkPoint> points;
  // Setting 1: n_i = 16 fixed, |gamma| from 2 upward while the baseline fits.
  for (int card = 2; card <= 7; ++card) {
    long long cells = 1;
    for (int i = 0; i < card; ++i) cells *= 16;
    if (cells > kMaxCells) break;
    points.push_back(benchmark_point(1, card, 16, reps, seed));
  }
  // Setting 2: |gamma| = 3 fixed, n_i from 2 to 256.
  for (long long n = 2; n <= 256; n *= 2) {
    if (n * n * n > kMaxCells) break;
    points.push_back(benchmark_point(2, 3, n, reps, seed));
  }
  return points;
}

std::vector<BenchmarkRow> to_rows(const std::vector<BenchmarkPoint>& points) {
  std::vector<BenchmarkRow> rows;
  for (const BenchmarkPoint& p : points) {
    const long long size = p.setting == 1 ? p.gamma_card : p.attr_size;
    rows.push_back({p.setting, size, "decomp-inaxis", p.decomp_inaxis});
    rows.push_back({p.setting, size, "decomp-kron", p.decomp_kron});
    rows.push_back({p.setting, size, "recon-inaxis", p.recon_inaxis});
    rows.push_back({p.setting, size, "recon-kron", p.recon_kron});
  }
  return rows;
}

void write_benchmark_csv(std::ostream& out,
                         const std::vector<BenchmarkRow>& rows) {
  out << "setting,size,method,seconds\n";
  for (const BenchmarkRow& r : rows) {
    out << r.setting << ',' << r.size << ',' << r.method << ',' << r.seconds
        << '\n';
  }
}

}  // namespace privmarg
