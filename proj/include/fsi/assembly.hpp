// SPDX-License-Identifier: Apache-2.0
//
// Monolithic residual and exact Jacobian of the coupled solid/fluid
// system: solid and fluid kinematics, momentum with SUPG stabilization,
// and the two incompressibility constraints. Time stepping is
// Crank-Nicolson on the momentum flux terms with backward-difference time
// derivatives; the old-time flux half is evaluated on the old geometry.
//
// Rows follow the variable they are paired with in the unpermuted block
// grid: kinematic equations sit in the displacement slots, momentum in
// the velocity slots, continuity in the pressure slots. Momentum and
// kinematic contributions of interface nodes land in the solid slots
// because interface dofs are solid-owned.

#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "fsi/constitutive.hpp"
#include "fsi/sparse.hpp"
#include "fsi/spaces.hpp"
#include "fsi/supg.hpp"

namespace fsi {

enum class BcKind {
  VelocityDirichlet,
  DisplacementDirichlet,
  NormalStress,
  ZeroStress,
  Symmetry,
};

// Boundary condition attached to a mesh group. NormalStress prescribes
// sigma_nn = amplitude * sin(2 pi t) + offset with the tangential velocity
// pinned to zero; Symmetry pins the normal components of u and d.
struct BoundaryCondition {
  std::string group;
  BcKind kind = BcKind::ZeroStress;

  std::array<double, 2> displacement{0.0, 0.0};

  // parabolic velocity profile: dir * peak * pulse(t) * (1 - ((c-center)/radius)^2)
  std::array<double, 2> velocity_direction{1.0, 0.0};
  double profile_peak = 0.0;
  double profile_center = 0.0;
  double profile_radius = 1.0;
  int profile_axis = 1;
  bool pulsatile = true;  // (1 + 0.75 sin(2 pi t)) modulation

  double stress_amplitude = 0.0;  // Pa
  double stress_offset = 0.0;     // Pa

  double pulse(double t) const;
};

struct TimeScheme {
  double dt = 1.0 / 32.0;
};

struct KFunction {
  enum class Kind { InverseVolume, Distance } kind = Kind::InverseVolume;
  double a_far = 1.0;
  double a_near = 100.0;
  double c = 10000.0;
  std::array<double, 2> point{0.0, 0.0};
  std::string stiff_set;  // element set that uses a_near
};

struct FsiProblem {
  const Space* space = nullptr;
  MaterialParams material;
  KFunction kfun;
  std::vector<BoundaryCondition> bcs;
  TimeScheme scheme;
  bool frozen_geometry = false;
  std::array<double, 2> body_force_solid{0.0, 0.0};
  std::array<double, 2> body_force_fluid{0.0, 0.0};
};

struct Constraint {
  int dof;
  int row;  // equation slot replaced by the identity (stable pairing)
  double value;
};

// State vector in field-block layout; the solid pressure absorbs the
// Mooney-Rivlin isotropic term so the undeformed state has zero residual.
std::vector<double> rest_state(const Space& space, const MaterialParams& mat);

// Per-element lambda on the deformed configuration of the given state.
StabilizationState compute_stabilization(const FsiProblem& prob, const std::vector<double>& state);

// The equation slot a constrained dof replaces. Solid-side constraints use
// the stable pairing: prescribed displacement consumes the momentum row
// and prescribed velocity the kinematic row, so the kinematic equation
// keeps enforcing u = d_dot at displacement-constrained boundaries and
// every identity lands on the diagonal of the pivoted orderings.
int dirichlet_row(const FieldLayout& layout, int dof);

// Dirichlet data of all boundary conditions at time t; throws ConfigError
// on conflicting constraints.
std::vector<Constraint> build_constraints(const FsiProblem& prob, double t);

void lift_constraints(const std::vector<Constraint>& cs, std::vector<double>& x);

// Replaces each constrained row of (J, R) by an identity row with residual
// x[dof] - value.
void apply_dirichlet(SparseMatrix& jacobian, std::vector<double>& residual,
                     const std::vector<Constraint>& cs, const std::vector<double>& x);
void apply_dirichlet(std::vector<double>& residual, const std::vector<Constraint>& cs,
                     const std::vector<double>& x);

class Assembler {
 public:
  explicit Assembler(const FsiProblem& prob);

  // Assembles residual (and Jacobian) at x_new. x_old provides the
  // backward differences; x_older only feeds the old-time ALE convection
  // velocity of the explicit flux half. Boundary conditions are NOT
  // applied here. t_new is the new time level, t_new - dt the old one.
  void assemble(const std::vector<double>& x_new, const std::vector<double>& x_old,
                const std::vector<double>& x_older, const StabilizationState& stab, double t_new,
                bool want_jacobian);

  const std::vector<double>& residual() const { return residual_; }
  const SparseMatrix& jacobian() const { return builder_.matrix(); }
  const FsiProblem& problem() const { return *prob_; }
  const std::vector<double>& mesh_stiffness() const { return k_element_; }

 private:
  struct TractionFace {
    int edge;
    double amplitude, offset;
  };

  const FsiProblem* prob_;
  CsrBuilder builder_;
  std::vector<double> residual_;
  std::vector<double> k_element_;
  std::map<int, std::vector<TractionFace>> traction_;

  template <typename T, bool kOldFlux>
  void element_kernel(int e, const std::vector<double>& x_cur, const std::vector<double>& x_prev,
                      const StabilizationState& stab, double t_eval, bool want_jacobian);
};

}  // namespace fsi
