// SPDX-License-Identifier: Apache-2.0
//
// Benchmark driver: runs the configured time loop once per selected
// solver, writes the per-step reports, the quantities of interest, the
// run summary, and the cross-solver state differences.

#pragma once

#include <string>
#include <vector>

#include "fsi/config.hpp"
#include "fsi/metrics.hpp"

namespace fsi {

struct BenchmarkResult {
  std::vector<SolverReport> reports;
  std::vector<QoISeries> qois;
  std::vector<std::vector<double>> final_states;
  std::vector<std::string> solver_names;
  // max relative state difference (discrete max norm) of each later
  // solver against the first one, per time step
  std::vector<std::vector<double>> state_diffs;
};

BenchmarkResult run_benchmark(const RunConfig& cfg);

}  // namespace fsi
