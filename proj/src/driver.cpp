// SPDX-License-Identifier: Apache-2.0

#include "fsi/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "fsi/errors.hpp"
#include "fsi/geometry_eval.hpp"
#include "fsi/kernels.hpp"
#include "fsi/sparse_lu.hpp"

namespace fsi {

namespace {

double wall_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

LevelStack build_level_stack(const GeometryCase& geo, const MaterialParams& mat,
                             const KFunction& kfun, const std::vector<BoundaryCondition>& bcs,
                             const TimeScheme& scheme, int levels, int quad_points_1d,
                             bool frozen_geometry, int elems_per_block) {
  LevelStack st;
  st.hier = make_hierarchy(geo, levels);
  st.spaces.reserve(levels);
  st.problems.reserve(levels);
  for (int l = 0; l < levels; ++l) st.spaces.push_back(build_layout(st.hier.levels[l], quad_points_1d));
  for (int l = 0; l < levels; ++l) {
    FsiProblem p;
    p.space = &st.spaces[l];
    p.material = mat;
    p.kfun = kfun;
    p.bcs = bcs;
    p.scheme = scheme;
    p.frozen_geometry = frozen_geometry;
    st.problems.push_back(std::move(p));
  }
  for (int l = 0; l < levels; ++l) {
    st.assemblers.push_back(std::make_unique<Assembler>(st.problems[l]));
    st.orderings.push_back(build_orderings(st.spaces[l].layout));
    st.vanka_blocks.push_back(build_vanka_blocks(st.spaces[l], elems_per_block));
  }
  for (int l = 1; l < levels; ++l) {
    st.transfers_j1.push_back(build_transfer(st.hier, l, st.spaces[l - 1], st.spaces[l],
                                             st.orderings[l - 1].j1, st.orderings[l].j1));
    st.transfers_j2.push_back(build_transfer(st.hier, l, st.spaces[l - 1], st.spaces[l],
                                             st.orderings[l - 1].j2, st.orderings[l].j2));
  }
  return st;
}

double solid_incompressibility_error(const Space& space, const std::vector<double>& state) {
  double worst = 0.0;
  for (int e = 0; e < space.mesh->n_elements(); ++e) {
    if (!region_is_solid(space.mesh->element_region[e])) continue;
    std::array<Vec2<double>, 9> xhat;
    std::array<Vec2<double>, 9> dloc;
    for (int a = 0; a < 9; ++a) {
      const int n = space.dofmap.element_nodes[e][a];
      xhat[a] = {space.dofmap.q2_coords[n][0], space.dofmap.q2_coords[n][1]};
      dloc[a] = {state[space.layout.d_dof(n, 0)], state[space.layout.d_dof(n, 1)]};
    }
    for (const QuadPoint& qp : space.ref.qp) {
      const auto rg = eval_geometry<double>(qp, xhat, false, e);
      Mat2<double> grad_d;
      for (int a = 0; a < 9; ++a) {
        grad_d(0, 0) += dloc[a].x * rg.grad[a].x;
        grad_d(0, 1) += dloc[a].x * rg.grad[a].y;
        grad_d(1, 0) += dloc[a].y * rg.grad[a].x;
        grad_d(1, 1) += dloc[a].y * rg.grad[a].y;
      }
      const double j = det(Mat2<double>::identity() + grad_d);
      worst = std::max(worst, std::abs(j - 1.0));
    }
  }
  return worst;
}

namespace {

// Per-step frozen data for the linear solves of one Newton loop.
struct LevelSolveData {
  std::vector<SparseMatrix> frame;  // permuted level Jacobians
  std::vector<std::unique_ptr<LinearOperator>> smoothers;
  std::unique_ptr<GmgPreconditioner> gmg;
};

}  // namespace

StepResult FsiSolver::newton_step(std::vector<double>& x, const std::vector<double>& x_old,
                                  const std::vector<double>& x_older, double t_new,
                                  int time_step_index) {
  LevelStack& st = *stack_;
  const int top = st.n_levels() - 1;
  const bool iterative = cfg_.kind != SolverConfig::Kind::Direct;
  const bool use_fs = cfg_.kind == SolverConfig::Kind::FS;
  StepResult out;

  // stabilization and restricted old states, fixed for the whole step
  std::vector<std::vector<double>> xo_l(st.n_levels()), xoo_l(st.n_levels());
  std::vector<StabilizationState> stab_l(st.n_levels());
  xo_l[top] = x_old;
  xoo_l[top] = x_older;
  for (int l = top - 1; l >= 0; --l) {
    xo_l[l] = restrict_state(st.hier, l + 1, st.spaces[l], st.spaces[l + 1], xo_l[l + 1]);
    xoo_l[l] = restrict_state(st.hier, l + 1, st.spaces[l], st.spaces[l + 1], xoo_l[l + 1]);
  }
  const int lo_level = iterative ? 0 : top;
  for (int l = lo_level; l <= top; ++l) stab_l[l] = compute_stabilization(st.problems[l], xo_l[l]);

  // constraints: values on the fine level, masks on the coarse ones
  const auto cs_fine = build_constraints(st.problems[top], t_new);
  lift_constraints(cs_fine, x);
  std::vector<std::vector<Constraint>> cs_l(st.n_levels());
  cs_l[top] = cs_fine;
  for (int l = 0; l < top; ++l) cs_l[l] = build_constraints(st.problems[l], t_new);
  std::vector<ConstraintMasks> cmask_l(st.n_levels());
  for (int l = 0; l <= top; ++l) {
    cmask_l[l].rows.assign(st.spaces[l].layout.n_dofs, 0);
    cmask_l[l].dofs.assign(st.spaces[l].layout.n_dofs, 0);
    for (const auto& c : cs_l[l]) {
      cmask_l[l].rows[c.row] = 1;
      cmask_l[l].dofs[c.dof] = 1;
    }
  }

  Assembler& fine_asm = *st.assemblers[top];
  const int n = st.fine().layout.n_dofs;
  double r0_newton = -1.0;
  int stall_count = 0;

  for (int it = 0; it < cfg_.newton_max; ++it) {
    fine_asm.assemble(x, x_old, x_older, stab_l[top], t_new, true);
    SparseMatrix jac = fine_asm.jacobian();
    std::vector<double> res = fine_asm.residual();
    apply_dirichlet(jac, res, cs_fine, x);

    // Row scales: the monolithic rows span many orders of magnitude in SI
    // units. Both the nonlinear convergence measure and the outer linear
    // solves work on the row-equilibrated system (a left diagonal
    // preconditioner); the GMG hierarchy keeps the unscaled level
    // operators.
    std::vector<double> row_scale(n, 1.0);
    {
      const auto& vals = jac.values();
      const auto& off = jac.row_offsets();
      for (int i = 0; i < n; ++i) {
        double mx = 0.0;
        for (int k = off[i]; k < off[i + 1]; ++k) mx = std::max(mx, std::abs(vals[k]));
        if (mx > 0.0) row_scale[i] = 1.0 / mx;
      }
    }
    auto scaled_norm = [&](const std::vector<double>& v) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        const double w = v[i] * row_scale[i];
        s += w * w;
      }
      return std::sqrt(s);
    };

    const double rn = scaled_norm(res);
    out.residual_history.push_back(rn);
    if (r0_newton < 0) r0_newton = rn;
    if (rn <= std::max(cfg_.newton_rtol * r0_newton, cfg_.newton_atol)) {
      out.converged = true;
      break;
    }

    SparseMatrix jac_scaled = jac;
    {
      auto& vals = jac_scaled.values();
      const auto& off = jac_scaled.row_offsets();
      for (int i = 0; i < n; ++i)
        for (int k = off[i]; k < off[i + 1]; ++k) vals[k] *= row_scale[i];
    }

    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = -res[i] * row_scale[i];

    LinearSolveRecord rec;
    rec.time_step = time_step_index;
    rec.newton_step = it + 1;
    const double t_start = wall_seconds();
    std::vector<double> delta;

    if (!iterative) {
      rec.r0 = kernels::norm2(n, rhs.data());
      SparseLu lu(jac_scaled, true, "newton-direct");
      delta = lu.solve(rhs);
      rec.iterations = 1;
      auto ax = jac_scaled.multiply(delta);
      double rn2 = 0;
      for (int i = 0; i < n; ++i) {
        const double d = rhs[i] - ax[i];
        rn2 += d * d;
      }
      rec.r_final = std::sqrt(rn2);
    } else {
      // level operators at the restricted current state
      LevelSolveData data;
      data.frame.resize(st.n_levels());
      data.smoothers.resize(st.n_levels());
      std::vector<std::vector<double>> x_l(st.n_levels());
      x_l[top] = x;
      for (int l = top - 1; l >= 0; --l)
        x_l[l] = restrict_state(st.hier, l + 1, st.spaces[l], st.spaces[l + 1], x_l[l + 1]);

      std::vector<GmgLevel> levels(st.n_levels());
      for (int l = 0; l <= top; ++l) {
        const OrderingPlan& plan = use_fs ? st.orderings[l].j2 : st.orderings[l].j1;
        if (l == top) {
          data.frame[l] = plan.apply(jac);
        } else {
          Assembler& la = *st.assemblers[l];
          la.assemble(x_l[l], xo_l[l], xoo_l[l], stab_l[l], t_new, true);
          SparseMatrix jl = la.jacobian();
          std::vector<double> rl = la.residual();
          apply_dirichlet(jl, rl, cs_l[l], x_l[l]);
          data.frame[l] = plan.apply(jl);
        }
        if (l > 0) {
          if (use_fs) {
            FieldSplitPlan fsplan;
            fsplan.elems_per_block = cfg_.elems_per_block;
            fsplan.overlap_layers = cfg_.overlap_layers;
            data.smoothers[l] = std::make_unique<FsPreconditioner>(data.frame[l], plan,
                                                                   st.spaces[l], fsplan,
                                                                   &cmask_l[l]);
          } else {
            data.smoothers[l] = std::make_unique<AsPreconditioner>(data.frame[l], plan,
                                                                   st.vanka_blocks[l], &cmask_l[l]);
          }
        }
        GmgLevel& gl = levels[l];
        gl.a = &data.frame[l];
        gl.smoother = data.smoothers[l].get();
        if (l > 0) {
          const TransferPair& tp = use_fs ? st.transfers_j2[l - 1] : st.transfers_j1[l - 1];
          gl.p = tp.p;
          gl.r = tp.r;
        }
        gl.constrained_rows.assign(st.spaces[l].layout.n_dofs, 0);
        gl.constrained_cols.assign(st.spaces[l].layout.n_dofs, 0);
        for (const auto& c : cs_l[l]) {
          gl.constrained_rows[plan.row_to[c.row]] = 1;
          gl.constrained_cols[plan.col_to[c.dof]] = 1;
        }
      }
      data.gmg = std::make_unique<GmgPreconditioner>(std::move(levels), cfg_.cycle);

      const OrderingPlan& plan_top = use_fs ? st.orderings[top].j2 : st.orderings[top].j1;
      const auto b = plan_top.permute_rows(rhs);
      const SparseMatrix a_scaled_frame = plan_top.apply(jac_scaled);
      CsrOperator aop(a_scaled_frame);
      // The cycle approximates the unscaled operator; undo the row scaling
      // of the incoming residual before it enters the hierarchy.
      std::vector<double> frame_scale(n);
      for (int i = 0; i < n; ++i) frame_scale[i] = row_scale[plan_top.row_from[i]];
      FunctionOperator mop(n, [&](const double* r, double* z) {
        std::vector<double> unscaled(n);
        for (int i = 0; i < n; ++i) unscaled[i] = r[i] / frame_scale[i];
        data.gmg->apply(unscaled.data(), z);
      });
      auto gres = gmres(aop, mop, b, cfg_.krylov);
      rec.iterations = gres.iterations;
      rec.r0 = gres.history.front();
      // true final residual of the permuted scaled system
      auto ax = a_scaled_frame.multiply(gres.x);
      double rn2 = 0;
      for (int i = 0; i < n; ++i) {
        const double d = b[i] - ax[i];
        rn2 += d * d;
      }
      rec.r_final = std::sqrt(rn2);
      delta = plan_top.unpermute_cols(gres.x);
    }
    rec.seconds = wall_seconds() - t_start;
    out.linear.push_back(rec);
    ++out.newton_iterations;

    // Backtracking line search: element inversions and residual growth
    // both halve the step. The first transient steps of the thin-wall
    // cases genuinely need this.
    double alpha = 1.0;
    double best_norm = -1.0;
    std::vector<double> best_x;
    for (int half = 0; half < 9; ++half) {
      std::vector<double> trial = x;
      kernels::axpy(n, alpha, delta.data(), trial.data());
      lift_constraints(cs_fine, trial);
      try {
        fine_asm.assemble(trial, x_old, x_older, stab_l[top], t_new, false);
      } catch (const ElementInversionError&) {
        alpha *= 0.5;
        continue;
      }
      std::vector<double> rt = fine_asm.residual();
      apply_dirichlet(rt, cs_fine, trial);
      const double rtn = scaled_norm(rt);
      if (best_norm < 0 || rtn < best_norm) {
        best_norm = rtn;
        best_x = std::move(trial);
      }
      if (rtn <= (1.0 - 1e-4 * alpha) * rn) break;
      alpha *= 0.5;
    }
    if (best_norm < 0)
      throw SolverError("newton: element inversion persists under step halving at t = " +
                        std::to_string(t_new));
    x = std::move(best_x);
    if (best_norm >= rn) {
      if (++stall_count >= 3) break;  // no progress: report non-convergence
    } else {
      stall_count = 0;
    }
  }
  return out;
}

RunResult run_time_loop(LevelStack& stack, const SolverConfig& cfg, const RunOptions& opts) {
  RunResult out;
  const Space& fine = stack.fine();
  out.report.solver_name = cfg.name();
  out.report.dofs = fine.layout.n_dofs;

  FsiSolver solver(stack, cfg);
  const double dt_nominal = stack.fine_problem().scheme.dt;
  std::vector<double> x_old = rest_state(fine, stack.fine_problem().material);
  std::vector<double> x_older = x_old;

  const int n_steps = opts.t_steps * opts.periods;
  out.qoi.dt = dt_nominal;
  auto record_qoi = [&](double t, const std::vector<double>& x) {
    out.qoi.time.push_back(t);
    if (!opts.flux_inlet_group.empty()) {
      out.qoi.q1.push_back(boundary_flux(fine, x, opts.flux_inlet_group, true));
      out.qoi.q2.push_back(boundary_flux(fine, x, opts.flux_outlet_group, false));
    } else {
      out.qoi.q1.push_back(0.0);
      out.qoi.q2.push_back(0.0);
    }
    if (!opts.cavity_set.empty()) {
      out.qoi.cavity.push_back(
          cavity_volume_change(fine, x, fine.mesh->element_sets.at(opts.cavity_set)));
    } else {
      out.qoi.cavity.push_back(0.0);
    }
  };
  record_qoi(0.0, x_old);

  const double t_total_start = wall_seconds();
  for (int step = 1; step <= n_steps; ++step) {
    const double t_new = step * dt_nominal;
    const double t_old = (step - 1) * dt_nominal;
    std::vector<double> x = x_old;
    StepResult sr;
    bool ok = true;
    try {
      sr = solver.newton_step(x, x_old, x_older, t_new, step);
      ok = sr.converged;
    } catch (const SolverError&) {
      ok = false;
    }
    if (!ok) {
      // one retry with the step split in half
      out.report.dt_halvings += 1;
      out.dt_was_halved = true;
      stack.set_dt(0.5 * dt_nominal);
      std::vector<double> x_mid = x_old;
      StepResult sr1 = solver.newton_step(x_mid, x_old, x_old, t_old + 0.5 * dt_nominal, step);
      x = x_mid;
      StepResult sr2 = solver.newton_step(x, x_mid, x_old, t_new, step);
      stack.set_dt(dt_nominal);
      if (!sr1.converged || !sr2.converged) {
        std::ostringstream msg;
        msg << "time step " << step << " failed twice (dt and dt/2); residual history:";
        for (double r : sr2.residual_history) msg << " " << r;
        throw SolverError(msg.str());
      }
      sr = sr1;
      sr.linear.insert(sr.linear.end(), sr2.linear.begin(), sr2.linear.end());
      sr.newton_iterations += sr2.newton_iterations;
    }

    out.report.records.insert(out.report.records.end(), sr.linear.begin(), sr.linear.end());
    out.report.newton_per_step.push_back(sr.newton_iterations);
    out.report.max_solid_j_error =
        std::max(out.report.max_solid_j_error, solid_incompressibility_error(fine, x));

    record_qoi(t_new, x);
    if (opts.on_step) opts.on_step(step, t_new, x);

    x_older = std::move(x_old);
    x_old = std::move(x);
  }
  out.report.total_seconds = wall_seconds() - t_total_start;
  out.final_state = std::move(x_old);
  return out;
}

}  // namespace fsi
