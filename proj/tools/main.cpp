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
// privmarg: differentially private release of marginal-query workloads over
// categorical tables, via noisy residual measurements.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "privmarg/benchmark.hpp"
#include "privmarg/csv_io.hpp"
#include "privmarg/mechanisms.hpp"
#include "privmarg/privacy.hpp"
#include "privmarg/report.hpp"

namespace {

using namespace privmarg;

int run_benchmark_mode(const std::string& output, int reps,
                       std::uint64_t seed) {
  const auto rows = to_rows(run_benchmark(reps, seed));
  if (output.empty()) {
    write_benchmark_csv(std::cout, rows);
  } else {
    std::ofstream out(output);
    if (!out) {
      std::cerr << "error: cannot write '" << output << "'\n";
      return 1;
    }
    write_benchmark_csv(out, rows);
    std::cout << "wrote " << output << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "privmarg: differentially private marginal release via residual "
      "measurements"};

  std::string mechanism = "aim-grem";
  app.add_option("--mechanism", mechanism,
                 "Mechanism: aim-grem | batch-planner | iid-fixed")
      ->check(CLI::IsMember({"aim-grem", "batch-planner", "iid-fixed"}));

  double rho = 0.0;
  auto* rho_opt = app.add_option("--rho", rho, "zCDP budget");
  double epsilon = 0.0;
  auto* eps_opt = app.add_option("--epsilon", epsilon, "DP epsilon");
  double delta = 0.0;
  auto* delta_opt =
      app.add_option("--delta", delta, "DP delta (required with --epsilon)");

  std::string workload_spec;
  app.add_option("--workload", workload_spec,
                 "Workload: 'all-Kway' or a JSON file of attribute-name lists");
  std::string data_path;
  app.add_option("--data", data_path, "Input CSV (header row)");
  std::string domain_path;
  app.add_option("--domain", domain_path,
                 "Domain JSON (name -> cardinality or {size, values})");

  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Base seed; trial k uses seed + k");
  int trials = 1;
  app.add_option("--trials", trials, "Independent trials")
      ->check(CLI::PositiveNumber);
  double eta = kDefaultEta;
  app.add_option("--eta", eta,
                 "Allocation drop threshold (share of privacy cost)");
  std::string output;
  app.add_option("--output", output, "Output path prefix");

  bool benchmark = false;
  app.add_flag("--benchmark", benchmark,
               "Time in-axis transforms against the Kronecker baseline");
  int bench_reps = 5;
  app.add_option("--bench-reps", bench_reps, "Benchmark repetitions");

  bool audit = false;
  app.add_flag("--audit-full-rebuild", audit,
               "Cross-check lazy updates against full reconstruction");
  std::string iid_mode = "lazy";
  app.add_option("--iid-mode", iid_mode,
                 "Reconstruction mode for iid-fixed: lazy | full")
      ->check(CLI::IsMember({"lazy", "full"}));
  double sensitivity = 0.0;
  app.add_option("--exp-mech-sensitivity", sensitivity,
                 "Override the selection score sensitivity (default: max "
                 "candidate weight)");
  double crp_tol = 1e-8;
  app.add_option("--crp-tol", crp_tol, "Allocation solver tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (benchmark) {
      return run_benchmark_mode(output, bench_reps, seed);
    }

    if (data_path.empty() || workload_spec.empty()) {
      std::cerr << "error: --data and --workload are required\n";
      return 1;
    }
    const bool has_rho = rho_opt->count() > 0;
    const bool has_eps = eps_opt->count() > 0;
    if (has_rho == has_eps) {
      std::cerr << "error: specify exactly one of --rho or --epsilon/--delta\n";
      return 1;
    }
    if (has_eps && delta_opt->count() == 0) {
      std::cerr << "error: --epsilon requires --delta\n";
      return 1;
    }
    if (output.empty()) {
      std::cerr << "error: --output is required\n";
      return 1;
    }

    IngestResult ingest = ingest_csv(
        data_path, domain_path.empty()
                       ? std::nullopt
                       : std::optional<std::string>(domain_path));
    for (const std::string& line : ingest.log) {
      std::cerr << "warning: " << line << "\n";
    }
    const Domain& domain = ingest.table.domain();

    const std::vector<AttrSet> sequence = parse_workload(workload_spec, domain);
    const Workload workload{sequence};

    double run_rho = rho;
    if (has_eps) {
      run_rho = calibrate_rho(epsilon, delta);
      std::cerr << "derived rho = " << run_rho << " from (epsilon = "
                << epsilon << ", delta = " << delta << ")\n";
    }

    MechanismConfig config;
    config.eta = eta;
    config.audit_full_rebuild = audit;
    config.exp_mech_sensitivity = sensitivity;
    config.crp_tolerance = crp_tol;

    nlohmann::json trials_json = nlohmann::json::array();
    std::ofstream metrics(output + ".metrics.csv");
    if (!metrics) {
      std::cerr << "error: cannot write '" << output << ".metrics.csv'\n";
      return 1;
    }
    metrics << kMetricsCsvHeader << "\n";
    char budget_buf[64];
    std::snprintf(budget_buf, sizeof(budget_buf), "%.12g",
                  has_eps ? epsilon : run_rho);
    const std::string budget_label = budget_buf;

    for (int k = 0; k < trials; ++k) {
      const std::uint64_t trial_seed = seed + static_cast<std::uint64_t>(k);
      RunResult result;
      if (mechanism == "aim-grem") {
        result = run_aim_grem(ingest.table, workload, run_rho, trial_seed, config);
      } else if (mechanism == "batch-planner") {
        result = run_batch_planner(ingest.table, workload, run_rho, trial_seed,
                                   config);
      } else {
        const ReconstructMode mode = iid_mode == "lazy"
                                         ? ReconstructMode::kLazy
                                         : ReconstructMode::kFull;
        result = run_iid_fixed(ingest.table, sequence, run_rho, trial_seed,
                               mode, config);
      }
      nlohmann::json doc = run_result_to_json(result, domain);
      if (has_eps) {
        doc["epsilon"] = epsilon;
        doc["delta"] = delta;
      }
      trials_json.push_back(std::move(doc));
      append_metrics_csv(metrics, result.report, budget_label);
    }

    nlohmann::json report{{"mechanism", mechanism},
                          {"rho", run_rho},
                          {"trials", trials_json}};
    std::ofstream report_out(output + ".report.json");
    if (!report_out) {
      std::cerr << "error: cannot write '" << output << ".report.json'\n";
      return 1;
    }
    report_out << report.dump(2) << "\n";
    std::cout << "wrote " << output << ".report.json and " << output
              << ".metrics.csv\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
