// SPDX-License-Identifier: Apache-2.0

#include "fsi/bench.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fsi/errors.hpp"
#include "fsi/sparse_lu.hpp"

namespace fsi {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

double rel_max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0, scale = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / std::max(scale, 1e-300);
}

void write_vtk_state(const std::string& path, const Space& space,
                     const std::vector<double>& state) {
  const Mesh& mesh = *space.mesh;
  std::vector<std::array<double, 2>> d(mesh.n_nodes()), u(mesh.n_nodes());
  for (int n = 0; n < mesh.n_nodes(); ++n) {
    d[n] = {state[space.layout.d_dof(n, 0)], state[space.layout.d_dof(n, 1)]};
    u[n] = {state[space.layout.u_dof(n, 0)], state[space.layout.u_dof(n, 1)]};
  }
  std::vector<double> p(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) p[e] = state[space.layout.p_dof(e, 0)];
  write_vtk(path, mesh, {{"displacement", d}, {"velocity", u}}, {{"pressure", p}});
}

void dump_matrices(const RunConfig& cfg, LevelStack& stack, const std::string& dir,
                   const std::string& smoother) {
  const double t1 = 1.0 / cfg.t_step;
  for (int l = 0; l < stack.n_levels(); ++l) {
    auto x_old = rest_state(stack.spaces[l], stack.problems[l].material);
    auto x = x_old;
    auto cs = build_constraints(stack.problems[l], t1);
    lift_constraints(cs, x);
    auto stab = compute_stabilization(stack.problems[l], x_old);
    stack.assemblers[l]->assemble(x, x_old, x_old, stab, t1, true);
    SparseMatrix jac = stack.assemblers[l]->jacobian();
    auto res = stack.assemblers[l]->residual();
    apply_dirichlet(jac, res, cs, x);
    write_matrix_market_file(dir + "/J_level" + std::to_string(l) + ".mtx", jac);
    const OrderingPlan& plan =
        (smoother == "fs") ? stack.orderings[l].j2 : stack.orderings[l].j1;
    write_matrix_market_file(dir + "/" + (smoother == "fs" ? "J2" : "J1") + "_level" +
                                 std::to_string(l) + ".mtx",
                             plan.apply(jac));
  }
}

}  // namespace

BenchmarkResult run_benchmark(const RunConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out);
  write_manifest_file(cfg.out + "/manifest.cfg", cfg);

  BenchmarkResult result;
  const auto solvers = cfg.smoother_list();
  std::vector<std::vector<std::vector<double>>> step_states(solvers.size());

  for (std::size_t s = 0; s < solvers.size(); ++s) {
    const std::string& name = solvers[s];
    LevelStack stack =
        build_level_stack(cfg.geometry_case(), cfg.material(), cfg.k_function(),
                          cfg.boundary_conditions(), cfg.time_scheme(), cfg.levels,
                          cfg.quad_points, cfg.frozen_geometry != 0, cfg.elems_per_block);
    if (cfg.dump_matrices && s == 0) dump_matrices(cfg, stack, cfg.out, name);

    RunOptions opts;
    opts.t_steps = cfg.t_step;
    opts.periods = cfg.periods;
    if (cfg.geometry != "unit_square") {
      opts.flux_inlet_group = "inlet";
      opts.flux_outlet_group = "outlet";
    }
    if (stack.fine().mesh->element_sets.count("cavity")) opts.cavity_set = "cavity";
    opts.on_step = [&](int step, double, const std::vector<double>& state) {
      step_states[s].push_back(state);
      if (cfg.vtk) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "/state_%s_%04d.vtk", name.c_str(), step);
        write_vtk_state(cfg.out + buf, stack.fine(), state);
      }
    };

    auto rr = run_time_loop(stack, cfg.solver_config(name), opts);

    write_report_csv(cfg.out + "/report_" + name + ".csv", rr.report);
    write_qoi_csv(cfg.out + "/qoi_" + name + ".csv", rr.qoi);
    if (s == 0) {
      write_report_csv(cfg.out + "/report.csv", rr.report);
      write_qoi_csv(cfg.out + "/qoi.csv", rr.qoi);
      std::ofstream os(cfg.out + "/state_final.txt");
      os.precision(17);
      for (double v : rr.final_state) os << v << "\n";
    }

    result.reports.push_back(std::move(rr.report));
    result.qois.push_back(std::move(rr.qoi));
    result.final_states.push_back(std::move(rr.final_state));
    result.solver_names.push_back(name);
  }

  // cross-solver state differences against the first run
  for (std::size_t s = 1; s < solvers.size(); ++s) {
    std::vector<double> diffs;
    const auto n_steps = std::min(step_states[0].size(), step_states[s].size());
    for (std::size_t k = 0; k < n_steps; ++k)
      diffs.push_back(rel_max_diff(step_states[s][k], step_states[0][k]));
    result.state_diffs.push_back(std::move(diffs));
  }
  if (solvers.size() > 1) {
    std::ofstream os(cfg.out + "/state_diff.csv");
    os.precision(12);
    os << "step";
    for (std::size_t s = 1; s < solvers.size(); ++s)
      os << ",rel_max_diff_" << solvers[s] << "_vs_" << solvers[0];
    os << "\n";
    for (std::size_t k = 0; !result.state_diffs.empty() && k < result.state_diffs[0].size(); ++k) {
      os << (k + 1);
      for (const auto& d : result.state_diffs) os << "," << (k < d.size() ? d[k] : 0.0);
      os << "\n";
    }
  }

  // summary
  json summary;
  summary["config"] = "manifest.cfg";
  summary["dofs"] = result.reports.empty() ? 0 : result.reports[0].dofs;
  summary["levels"] = cfg.levels;
  for (std::size_t s = 0; s < result.reports.size(); ++s) {
    const auto agg = aggregate_metrics(result.reports[s]);
    json js;
    js["s_max"] = agg.s_max;
    js["N"] = agg.n_avg;
    js["rho"] = agg.rho_avg;
    js["rho_max"] = agg.rho_max;
    js["linear_solves"] = agg.n_solves;
    js["time_seconds"] = result.reports[s].total_seconds;
    js["dt_halvings"] = result.reports[s].dt_halvings;
    js["max_solid_incompressibility_error"] = result.reports[s].max_solid_j_error;
    summary["solvers"][result.solver_names[s]] = js;
  }
  if (!result.qois.empty() && !result.qois[0].q1.empty()) {
    const auto& q = result.qois[0];
    const auto c1 = q.cum1();
    const auto c2 = q.cum2();
    double max_q1 = 0, max_imbalance = 0;
    for (std::size_t i = 0; i < c1.size(); ++i) {
      max_q1 = std::max(max_q1, std::abs(c1[i]));
      max_imbalance = std::max(max_imbalance, std::abs(c1[i] - c2[i]));
    }
    summary["qoi"]["max_abs_Q1"] = max_q1;
    summary["qoi"]["max_abs_Q1_minus_Q2"] = max_imbalance;
    if (max_q1 > 0) summary["qoi"]["flux_imbalance_ratio"] = max_imbalance / max_q1;
  }
  for (std::size_t s = 0; s + 1 < result.solver_names.size() + 0u && s < result.state_diffs.size();
       ++s) {
    const auto& d = result.state_diffs[s];
    summary["state_diff"][result.solver_names[s + 1] + "_vs_" + result.solver_names[0]] =
        d.empty() ? 0.0 : d.back();
  }
  std::ofstream os(cfg.out + "/summary.json");
  os << summary.dump(2) << "\n";
  return result;
}

}  // namespace fsi
