// SPDX-License-Identifier: Apache-2.0
//
// Solver statistics and physical quantities of interest: per-step linear
// and nonlinear counters with their period averages, boundary fluxes with
// their cumulative integrals, and the cavity volume change.

#pragma once

#include <string>
#include <vector>

#include "fsi/spaces.hpp"

namespace fsi {

struct LinearSolveRecord {
  int time_step = 0;
  int newton_step = 0;
  int iterations = 0;  // N_{i,s}
  double r0 = 0.0;     // unpreconditioned residual before the first iteration
  double r_final = 0.0;
  double seconds = 0.0;
  double rho() const { return r0 > 0.0 ? r_final / r0 : 0.0; }
};

struct SolverReport {
  std::string solver_name;
  std::vector<LinearSolveRecord> records;
  std::vector<int> newton_per_step;  // s_i^max per time step
  double total_seconds = 0.0;
  long long dofs = 0;
  double max_solid_j_error = 0.0;  // max |J(d)-1| over solid quadrature points
  int dt_halvings = 0;
};

struct AggregateMetrics {
  double s_max = 0.0;  // average of s_i^max
  double n_avg = 0.0;  // average linear iterations
  double rho_avg = 0.0;
  double rho_max = 0.0;
  int n_solves = 0;
};

// Period averages: N and rho are the arithmetic means of N_{i,s} and
// rho_{i,s} over every Newton step of every time step; s_max is the mean
// of the per-step Newton counts. Throws on an empty log.
AggregateMetrics aggregate_metrics(const SolverReport& report);

// Scaling exponent alpha = ln(T1/T2) / ln(dofs1/dofs2).
double estimate_alpha(double t1_seconds, long long dofs1, double t2_seconds, long long dofs2);

// Instant flux q = int u . n ds over a boundary group on the deformed
// configuration; `inward` flips the outward normal (inlet convention).
double boundary_flux(const Space& space, const std::vector<double>& state,
                     const std::string& group, bool inward);

// Trapezoidal cumulative integral, Q(0) = 0.
std::vector<double> cumulative_flux(const std::vector<double>& q, double dt);

// (V(t) - V(0)) / V(0) over a named element set, volumes on the deformed
// configuration.
double cavity_volume_change(const Space& space, const std::vector<double>& state,
                            const std::vector<int>& cavity_elements);

struct QoISeries {
  std::vector<double> time;
  std::vector<double> q1, q2;    // instant fluxes
  std::vector<double> cavity;    // relative volume change
  std::vector<double> cum1() const;
  std::vector<double> cum2() const;
  double dt = 0.0;
};

void write_report_csv(const std::string& path, const SolverReport& report);
void write_qoi_csv(const std::string& path, const QoISeries& qoi);

}  // namespace fsi
