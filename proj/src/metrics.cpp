// SPDX-License-Identifier: Apache-2.0

#include "fsi/metrics.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "fsi/errors.hpp"
#include "fsi/mesh.hpp"

namespace fsi {

AggregateMetrics aggregate_metrics(const SolverReport& report) {
  if (report.records.empty() || report.newton_per_step.empty())
    throw std::invalid_argument("aggregate_metrics: empty log");
  AggregateMetrics m;
  double n_sum = 0.0, rho_sum = 0.0;
  for (const auto& r : report.records) {
    n_sum += r.iterations;
    rho_sum += r.rho();
    m.rho_max = std::max(m.rho_max, r.rho());
  }
  m.n_solves = static_cast<int>(report.records.size());
  m.n_avg = n_sum / m.n_solves;
  m.rho_avg = rho_sum / m.n_solves;
  double s_sum = 0.0;
  for (int s : report.newton_per_step) s_sum += s;
  m.s_max = s_sum / report.newton_per_step.size();
  return m;
}

double estimate_alpha(double t1_seconds, long long dofs1, double t2_seconds, long long dofs2) {
  if (t1_seconds <= 0 || t2_seconds <= 0 || dofs1 <= 0 || dofs2 <= 0 || dofs1 == dofs2)
    throw std::invalid_argument("estimate_alpha: degenerate inputs");
  return std::log(t1_seconds / t2_seconds) /
         std::log(static_cast<double>(dofs1) / static_cast<double>(dofs2));
}

double boundary_flux(const Space& space, const std::vector<double>& state,
                     const std::string& group, bool inward) {
  const Mesh& mesh = *space.mesh;
  const int gid = mesh.group_id(group);
  if (gid < 0) throw std::invalid_argument("boundary_flux: unknown group " + group);
  bool seen = false;
  double q = 0.0;
  for (const auto& f : mesh.boundary_faces) {
    if (f.group != gid) continue;
    seen = true;
    for (const EdgeQuadPoint& eq : space.ref.edge_qp[f.edge]) {
      double tx = 0, ty = 0, ux = 0, uy = 0;
      for (int a = 0; a < 9; ++a) {
        const int node = space.dofmap.element_nodes[f.element][a];
        const double dns = eq.dn[a][0] * eq.dref[0] + eq.dn[a][1] * eq.dref[1];
        const double cx = space.dofmap.q2_coords[node][0] + state[space.layout.d_dof(node, 0)];
        const double cy = space.dofmap.q2_coords[node][1] + state[space.layout.d_dof(node, 1)];
        tx += cx * dns;
        ty += cy * dns;
        ux += state[space.layout.u_dof(node, 0)] * eq.n[a];
        uy += state[space.layout.u_dof(node, 1)] * eq.n[a];
      }
      // rotated tangent = outward normal times the length element
      q += eq.weight * (ux * ty - uy * tx);
    }
  }
  if (!seen) throw std::invalid_argument("boundary_flux: empty group " + group);
  return inward ? -q : q;
}

std::vector<double> cumulative_flux(const std::vector<double>& q, double dt) {
  std::vector<double> cum(q.size(), 0.0);
  for (std::size_t i = 1; i < q.size(); ++i) cum[i] = cum[i - 1] + 0.5 * dt * (q[i - 1] + q[i]);
  return cum;
}

double cavity_volume_change(const Space& space, const std::vector<double>& state,
                            const std::vector<int>& cavity_elements) {
  if (cavity_elements.empty()) throw std::invalid_argument("cavity_volume_change: empty set");
  const Mesh& mesh = *space.mesh;
  std::vector<std::array<double, 2>> disp(mesh.n_nodes());
  for (int n = 0; n < mesh.n_nodes(); ++n) {
    // mesh corner nodes share ids with the first Q2 nodes
    disp[n] = {state[space.layout.d_dof(n, 0)], state[space.layout.d_dof(n, 1)]};
  }
  double v0 = 0.0, vt = 0.0;
  for (int e : cavity_elements) {
    v0 += element_volume(mesh, e);
    vt += element_volume_displaced(mesh, e, disp);
  }
  return (vt - v0) / v0;
}

std::vector<double> QoISeries::cum1() const { return cumulative_flux(q1, dt); }
std::vector<double> QoISeries::cum2() const { return cumulative_flux(q2, dt); }

void write_report_csv(const std::string& path, const SolverReport& report) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(12);
  os << "time_step,newton_step,linear_iterations,r0,r_final,rho,seconds\n";
  for (const auto& r : report.records) {
    os << r.time_step << "," << r.newton_step << "," << r.iterations << "," << r.r0 << ","
       << r.r_final << "," << r.rho() << "," << r.seconds << "\n";
  }
}

void write_qoi_csv(const std::string& path, const QoISeries& qoi) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(12);
  const auto c1 = qoi.cum1();
  const auto c2 = qoi.cum2();
  os << "t,q1,q2,Q1,Q2,cavity_rel_volume\n";
  for (std::size_t i = 0; i < qoi.time.size(); ++i) {
    os << qoi.time[i] << "," << qoi.q1[i] << "," << qoi.q2[i] << "," << c1[i] << "," << c2[i] << ","
       << (qoi.cavity.empty() ? 0.0 : qoi.cavity[i]) << "\n";
  }
}

}  // namespace fsi
