// SPDX-License-Identifier: Apache-2.0
//
// Solver orchestration: the per-level machinery (meshes, spaces,
// assemblers, orderings, transfers), the Newton loop with its
// GMG-preconditioned GMRES linear solves, and the time stepping loop.

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fsi/assembly.hpp"
#include "fsi/gmg.hpp"
#include "fsi/krylov.hpp"
#include "fsi/metrics.hpp"
#include "fsi/ordering.hpp"
#include "fsi/precond.hpp"

namespace fsi {

struct SolverConfig {
  enum class Kind { AS, FS, Direct } kind = Kind::AS;
  CycleConfig cycle;  // v/f/w, pre/post sweeps, Richardson damping
  int elems_per_block = 4;
  int overlap_layers = 1;
  SchwarzMode schwarz_mode = SchwarzMode::Multiplicative;
  KrylovConfig krylov;
  double newton_rtol = 1e-8;
  double newton_atol = 1e-10;
  int newton_max = 15;

  const char* name() const {
    switch (kind) {
      case Kind::AS: return "as";
      case Kind::FS: return "fs";
      case Kind::Direct: return "direct";
    }
    return "?";
  }
};

// Owns every level of the hierarchy plus the state-independent solver
// pieces (orderings, Vanka block index sets, transfer matrices).
struct LevelStack {
  MeshHierarchy hier;
  std::vector<Space> spaces;
  std::vector<FsiProblem> problems;  // shared physics, per-level space
  std::vector<std::unique_ptr<Assembler>> assemblers;
  std::vector<Orderings> orderings;
  std::vector<std::vector<VankaBlock>> vanka_blocks;   // per level
  std::vector<TransferPair> transfers_j1, transfers_j2;  // index l-1 for level pair (l-1, l)

  int n_levels() const { return static_cast<int>(spaces.size()); }
  const Space& fine() const { return spaces.back(); }
  FsiProblem& fine_problem() { return problems.back(); }
  const FsiProblem& fine_problem() const { return problems.back(); }

  void set_dt(double dt) {
    for (auto& p : problems) p.scheme.dt = dt;
  }
};

LevelStack build_level_stack(const GeometryCase& geo, const MaterialParams& mat,
                             const KFunction& kfun, const std::vector<BoundaryCondition>& bcs,
                             const TimeScheme& scheme, int levels, int quad_points_1d = 3,
                             bool frozen_geometry = false, int elems_per_block = 4);

struct StepResult {
  std::vector<LinearSolveRecord> linear;
  int newton_iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;
};

class FsiSolver {
 public:
  FsiSolver(LevelStack& stack, const SolverConfig& cfg) : stack_(&stack), cfg_(cfg) {}

  // One implicit step: x_new enters as the initial iterate (usually a copy
  // of x_old with the new constraints lifted) and leaves as the converged
  // state. x_older feeds the old-time ALE convection velocity.
  StepResult newton_step(std::vector<double>& x_new, const std::vector<double>& x_old,
                         const std::vector<double>& x_older, double t_new, int time_step_index);

  const SolverConfig& config() const { return cfg_; }

 private:
  LevelStack* stack_;
  SolverConfig cfg_;
};

// Largest |J(d) - 1| over the quadrature points of all solid elements.
double solid_incompressibility_error(const Space& space, const std::vector<double>& state);

struct RunOptions {
  int t_steps = 32;   // steps per period
  int periods = 1;
  std::string flux_inlet_group;   // empty: no flux QoI
  std::string flux_outlet_group;
  std::string cavity_set;         // empty: no cavity QoI
  std::function<void(int, double, const std::vector<double>&)> on_step;  // step, t, state
};

struct RunResult {
  SolverReport report;
  QoISeries qoi;
  std::vector<double> final_state;
  bool dt_was_halved = false;
};

RunResult run_time_loop(LevelStack& stack, const SolverConfig& cfg, const RunOptions& opts);

}  // namespace fsi
