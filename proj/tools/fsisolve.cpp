// SPDX-License-Identifier: Apache-2.0
//
// fsisolve: benchmark CLI for the monolithic fluid-structure solver.
//
//   fsisolve run --case channel.cfg --smoother as,fs,direct --levels 3 \
//                --cycle v --tstep 32 --periods 1 --out results/
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "fsi/bench.hpp"
#include "fsi/config.hpp"
#include "fsi/errors.hpp"
#include "fsi/metrics.hpp"

int main(int argc, char** argv) {
  CLI::App app{"monolithic fluid-structure interaction benchmark solver"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the configured time loop and write reports");
  std::string case_file;
  std::vector<std::string> sets;
  std::string smoother, ordering, cycle, out;
  int levels = -1, tstep = -1, periods = -1, pre = -1, post = -1, sweeps = -1;
  int elems_per_block = -1, vtk = -1, dump = -1;
  double omega = -1.0;

  run->add_option("--case", case_file, "case configuration file (key = value lines)");
  run->add_option("--smoother", smoother, "as | fs | direct (comma separated for comparison runs)");
  run->add_option("--ordering", ordering, "auto | j1 | j2");
  run->add_option("--levels", levels, "mesh levels in the hierarchy");
  run->add_option("--cycle", cycle, "multigrid cycle: v | f | w");
  run->add_option("--tstep", tstep, "steps per period (dt = 1/tstep)");
  run->add_option("--periods", periods, "number of periods");
  run->add_option("--omega", omega, "Richardson damping");
  run->add_option("--sweeps", sweeps, "pre- and post-smoothing sweeps (overrides pre/post)");
  run->add_option("--pre", pre, "pre-smoothing sweeps");
  run->add_option("--post", post, "post-smoothing sweeps");
  run->add_option("--elems-per-block", elems_per_block, "elements seeding one Vanka block");
  run->add_option("--out", out, "output directory");
  run->add_option("--vtk", vtk, "write per-step VTK snapshots (0/1)");
  run->add_option("--dump-matrices", dump, "write Matrix Market dumps of the level systems (0/1)");
  run->add_option("--set", sets, "extra key=value overrides")->take_all();

  CLI11_PARSE(app, argc, argv);

  try {
    fsi::RunConfig cfg;
    if (!case_file.empty()) cfg = fsi::parse_config_file(case_file);
    auto override_str = [&](const char* key, const std::string& v) {
      if (!v.empty()) fsi::apply_override(cfg, key, v);
    };
    auto override_int = [&](const char* key, int v) {
      if (v >= 0) fsi::apply_override(cfg, key, std::to_string(v));
    };
    override_str("smoother", smoother);
    override_str("ordering", ordering);
    override_str("cycle", cycle);
    override_str("out", out);
    override_int("levels", levels);
    override_int("t_step", tstep);
    override_int("periods", periods);
    override_int("pre", pre);
    override_int("post", post);
    override_int("sweeps", sweeps);
    override_int("elems_per_block", elems_per_block);
    override_int("vtk", vtk);
    override_int("dump_matrices", dump);
    if (omega >= 0.0) fsi::apply_override(cfg, "omega", std::to_string(omega));
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw fsi::ConfigError("--set expects key=value, got " + kv);
      fsi::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();

    const auto result = fsi::run_benchmark(cfg);
    for (std::size_t s = 0; s < result.reports.size(); ++s) {
      const auto agg = fsi::aggregate_metrics(result.reports[s]);
      std::printf("%-7s dofs=%lld  s_max=%.2f  N=%.2f  rho=%.3g  time=%.2fs\n",
                  result.solver_names[s].c_str(), result.reports[s].dofs, agg.s_max, agg.n_avg,
                  agg.rho_avg, result.reports[s].total_seconds);
    }
    for (std::size_t s = 0; s < result.state_diffs.size(); ++s) {
      const double final_diff =
          result.state_diffs[s].empty() ? 0.0 : result.state_diffs[s].back();
      std::printf("final-state rel diff %s vs %s: %.3e\n", result.solver_names[s + 1].c_str(),
                  result.solver_names[0].c_str(), final_diff);
    }
    std::printf("outputs written to %s\n", cfg.out.c_str());
    return 0;
  } catch (const fsi::ConfigError& ex) {
    std::fprintf(stderr, "configuration error: %s\n", ex.what());
    return 2;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "solver failure: %s\n", ex.what());
    return 3;
  }
}
