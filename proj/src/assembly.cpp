// SPDX-License-Identifier: Apache-2.0

#include "fsi/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fsi/geometry_eval.hpp"

namespace fsi {

namespace {

constexpr int kLocalDofs = 39;  // 18 d + 18 u + 3 p
constexpr double kPi = 3.14159265358979323846;

using Dual39 = Dual<kLocalDofs>;

// Tensor-local node triplets of each element edge, counterclockwise.
constexpr int kEdgeLocals[4][3] = {{0, 1, 2}, {2, 5, 8}, {8, 7, 6}, {6, 3, 0}};

inline int local_d(int a, int i) { return 2 * a + i; }
inline int local_u(int a, int i) { return 18 + 2 * a + i; }
inline int local_p(int m) { return 36 + m; }

struct ElementDofs {
  std::array<int, kLocalDofs> global;
};

ElementDofs element_dofs(const Space& sp, int e) {
  ElementDofs out;
  const auto& nodes = sp.dofmap.element_nodes[e];
  for (int a = 0; a < 9; ++a) {
    for (int i = 0; i < 2; ++i) {
      out.global[local_d(a, i)] = sp.layout.d_dof(nodes[a], i);
      out.global[local_u(a, i)] = sp.layout.u_dof(nodes[a], i);
    }
  }
  for (int m = 0; m < 3; ++m) out.global[local_p(m)] = sp.layout.p_dof(e, m);
  return out;
}

template <typename T>
struct LocalState {
  std::array<Vec2<T>, 9> d, u;
  std::array<T, 3> p;
};

template <typename T, bool Seed>
LocalState<T> load_state(const ElementDofs& dofs, const std::vector<double>& x) {
  LocalState<T> s;
  for (int a = 0; a < 9; ++a) {
    for (int i = 0; i < 2; ++i) {
      const int ld = local_d(a, i), lu = local_u(a, i);
      if constexpr (Seed) {
        s.d[a][i] = T::seed(x[dofs.global[ld]], ld);
        s.u[a][i] = T::seed(x[dofs.global[lu]], lu);
      } else {
        s.d[a][i] = T(x[dofs.global[ld]]);
        s.u[a][i] = T(x[dofs.global[lu]]);
      }
    }
  }
  for (int m = 0; m < 3; ++m) {
    if constexpr (Seed) {
      s.p[m] = T::seed(x[dofs.global[local_p(m)]], local_p(m));
    } else {
      s.p[m] = T(x[dofs.global[local_p(m)]]);
    }
  }
  return s;
}

template <typename T>
Vec2<T> interp_vec(const std::array<Vec2<T>, 9>& nodal, const std::array<double, 9>& n) {
  Vec2<T> v{T(0.0), T(0.0)};
  for (int a = 0; a < 9; ++a) {
    v.x += nodal[a].x * n[a];
    v.y += nodal[a].y * n[a];
  }
  return v;
}

template <typename T, typename G>
Mat2<T> grad_vec(const std::array<Vec2<T>, 9>& nodal, const G& grads) {
  Mat2<T> g;
  for (int a = 0; a < 9; ++a) {
    g(0, 0) += nodal[a].x * grads[a].x;
    g(0, 1) += nodal[a].x * grads[a].y;
    g(1, 0) += nodal[a].y * grads[a].x;
    g(1, 1) += nodal[a].y * grads[a].y;
  }
  return g;
}

}  // namespace

double BoundaryCondition::pulse(double t) const {
  return pulsatile ? 1.0 + 0.75 * std::sin(2.0 * kPi * t) : 1.0;
}

std::vector<double> rest_state(const Space& space, const MaterialParams& mat) {
  std::vector<double> x(space.layout.n_dofs, 0.0);
  for (int e = 0; e < space.layout.n_elements; ++e) {
    const Region r = space.mesh->element_region[e];
    if (!region_is_solid(r)) continue;
    x[space.layout.p_dof(e, 0)] =
        (r == Region::Clot) ? mat.rest_pressure_clot() : mat.rest_pressure();
  }
  return x;
}

StabilizationState compute_stabilization(const FsiProblem& prob, const std::vector<double>& state) {
  const Space& sp = *prob.space;
  StabilizationState stab;
  stab.elements.resize(sp.layout.n_elements);
  for (int e = 0; e < sp.layout.n_elements; ++e) {
    if (region_is_solid(sp.mesh->element_region[e])) continue;
    std::array<std::array<double, 2>, 9> coords;
    for (int a = 0; a < 9; ++a) {
      const int n = sp.dofmap.element_nodes[e][a];
      coords[a][0] = sp.dofmap.q2_coords[n][0] + state[sp.layout.d_dof(n, 0)];
      coords[a][1] = sp.dofmap.q2_coords[n][1] + state[sp.layout.d_dof(n, 1)];
    }
    stab.elements[e] = element_lambda(sp.ref, coords, 1e-8, 500, e);
  }
  return stab;
}

namespace {

// Dominant axis of an (axis-aligned) boundary edge.
int edge_tangent_axis(const Space& sp, const BoundaryFace& f) {
  const auto& q = sp.mesh->elements[f.element];
  const auto& a = sp.mesh->nodes[q[f.edge]];
  const auto& b = sp.mesh->nodes[q[(f.edge + 1) % 4]];
  const double dx = std::abs(b[0] - a[0]), dy = std::abs(b[1] - a[1]);
  const double len = std::max(dx, dy);
  if (std::min(dx, dy) > 1e-10 * len)
    throw ConfigError("normal/tangential constraints need axis-aligned boundary edges");
  return dx > dy ? 0 : 1;
}

}  // namespace

int dirichlet_row(const FieldLayout& layout, int dof) {
  const int ds0 = layout.field_offset(Field::Ds);
  const int ds1 = ds0 + layout.field_size(Field::Ds);
  const int us0 = layout.field_offset(Field::Us);
  const int us1 = us0 + layout.field_size(Field::Us);
  if (dof >= ds0 && dof < ds1) return dof - ds0 + us0;  // d^s -> momentum slot
  if (dof >= us0 && dof < us1) return dof - us0 + ds0;  // u^s -> kinematic slot
  return dof;  // fluid fields keep their natural pairing
}

std::vector<Constraint> build_constraints(const FsiProblem& prob, double t) {
  const Space& sp = *prob.space;
  const Mesh& mesh = *sp.mesh;
  std::map<int, double> values;
  auto set = [&](int dof, double v) {
    auto [it, inserted] = values.emplace(dof, v);
    if (!inserted && std::abs(it->second - v) > 1e-12 * std::max(1.0, std::abs(v)))
      throw ConfigError("conflicting Dirichlet values on one dof");
  };

  for (const BoundaryCondition& bc : prob.bcs) {
    const int group = mesh.group_id(bc.group);
    if (group < 0)
      throw ConfigError("boundary condition references unknown group '" + bc.group + "'");
    for (const BoundaryFace& f : mesh.boundary_faces) {
      if (f.group != group) continue;
      for (int k = 0; k < 3; ++k) {
        const int node = sp.dofmap.element_nodes[f.element][kEdgeLocals[f.edge][k]];
        switch (bc.kind) {
          case BcKind::VelocityDirichlet: {
            const double c = sp.dofmap.q2_coords[node][bc.profile_axis];
            const double s = (c - bc.profile_center) / bc.profile_radius;
            const double mag = bc.profile_peak * bc.pulse(t) * (1.0 - s * s);
            set(sp.layout.u_dof(node, 0), bc.velocity_direction[0] * mag);
            set(sp.layout.u_dof(node, 1), bc.velocity_direction[1] * mag);
            break;
          }
          case BcKind::DisplacementDirichlet:
            set(sp.layout.d_dof(node, 0), bc.displacement[0]);
            set(sp.layout.d_dof(node, 1), bc.displacement[1]);
            break;
          case BcKind::NormalStress: {
            const int tangent = edge_tangent_axis(sp, f);
            set(sp.layout.u_dof(node, tangent), 0.0);
            set(sp.layout.d_dof(node, 0), 0.0);
            set(sp.layout.d_dof(node, 1), 0.0);
            break;
          }
          case BcKind::Symmetry: {
            const int normal = 1 - edge_tangent_axis(sp, f);
            set(sp.layout.u_dof(node, normal), 0.0);
            set(sp.layout.d_dof(node, normal), 0.0);
            break;
          }
          case BcKind::ZeroStress:
            break;
        }
      }
    }
  }
  std::vector<Constraint> cs;
  cs.reserve(values.size());
  for (const auto& [dof, v] : values) cs.push_back({dof, dirichlet_row(sp.layout, dof), v});
  return cs;
}

void lift_constraints(const std::vector<Constraint>& cs, std::vector<double>& x) {
  for (const auto& c : cs) x[c.dof] = c.value;
}

void apply_dirichlet(std::vector<double>& residual, const std::vector<Constraint>& cs,
                     const std::vector<double>& x) {
  for (const auto& c : cs) residual[c.row] = x[c.dof] - c.value;
}

void apply_dirichlet(SparseMatrix& jacobian, std::vector<double>& residual,
                     const std::vector<Constraint>& cs, const std::vector<double>& x) {
  apply_dirichlet(residual, cs, x);
  const auto& off = jacobian.row_offsets();
  const auto& ci = jacobian.col_indices();
  auto& vals = jacobian.values();
  for (const auto& c : cs) {
    for (int k = off[c.row]; k < off[c.row + 1]; ++k) vals[k] = (ci[k] == c.dof) ? 1.0 : 0.0;
  }
}

Assembler::Assembler(const FsiProblem& prob) : prob_(&prob) {
  const Space& sp = *prob.space;
  const Mesh& mesh = *sp.mesh;
  const int n = sp.layout.n_dofs;
  prob.material.validate();

  std::vector<std::vector<int>> pattern(n);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto dofs = element_dofs(sp, e);
    for (int r : dofs.global) {
      auto& row = pattern[r];
      row.insert(row.end(), dofs.global.begin(), dofs.global.end());
    }
  }
  for (int r = 0; r < n; ++r) {
    auto& row = pattern[r];
    row.push_back(r);  // keep the diagonal for Dirichlet rows
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  builder_.set_pattern(n, n, pattern);
  residual_.assign(n, 0.0);

  // mesh-motion stiffness per fluid element (reference quantities)
  k_element_.assign(mesh.n_elements(), 0.0);
  const std::vector<int>* stiff = nullptr;
  std::vector<int> stiff_sorted;
  if (prob.kfun.kind == KFunction::Kind::Distance && !prob.kfun.stiff_set.empty()) {
    auto it = mesh.element_sets.find(prob.kfun.stiff_set);
    if (it == mesh.element_sets.end())
      throw ConfigError("kfun stiff set '" + prob.kfun.stiff_set + "' not present in the mesh");
    stiff_sorted = it->second;
    std::sort(stiff_sorted.begin(), stiff_sorted.end());
    stiff = &stiff_sorted;
  }
  for (int e = 0; e < mesh.n_elements(); ++e) {
    if (region_is_solid(mesh.element_region[e])) continue;
    if (prob.kfun.kind == KFunction::Kind::InverseVolume) {
      k_element_[e] = mesh_stiffness_inverse_volume(element_volume(mesh, e));
    } else {
      std::array<double, 2> center{0.0, 0.0};
      for (int i = 0; i < 4; ++i) {
        center[0] += 0.25 * mesh.nodes[mesh.elements[e][i]][0];
        center[1] += 0.25 * mesh.nodes[mesh.elements[e][i]][1];
      }
      const bool near = stiff && std::binary_search(stiff->begin(), stiff->end(), e);
      k_element_[e] = mesh_stiffness_distance(
          center, prob.kfun.point, near ? prob.kfun.a_near : prob.kfun.a_far, prob.kfun.c);
    }
  }

  for (const BoundaryCondition& bc : prob.bcs) {
    if (bc.kind != BcKind::NormalStress) continue;
    const int group = mesh.group_id(bc.group);
    if (group < 0)
      throw ConfigError("boundary condition references unknown group '" + bc.group + "'");
    for (const BoundaryFace& f : mesh.boundary_faces) {
      if (f.group == group)
        traction_[f.element].push_back({f.edge, bc.stress_amplitude, bc.stress_offset});
    }
  }
}

template <typename T, bool kOldFlux>
void Assembler::element_kernel(int e, const std::vector<double>& x_cur,
                               const std::vector<double>& x_prev, const StabilizationState& stab,
                               double t_eval, bool want_jacobian) {
  const FsiProblem& prob = *prob_;
  const Space& sp = *prob.space;
  const MaterialParams& mat = prob.material;
  const Region region = sp.mesh->element_region[e];
  const bool solid = region_is_solid(region);
  const double dt = prob.scheme.dt;
  const auto dofs = element_dofs(sp, e);

  constexpr bool kSeed = !std::is_same_v<T, double> && !kOldFlux;
  const LocalState<T> cur = load_state<T, kSeed>(dofs, x_cur);
  const LocalState<double> prev = load_state<double, false>(dofs, x_prev);

  std::array<Vec2<double>, 9> xhat;
  for (int a = 0; a < 9; ++a) {
    const auto& c = sp.dofmap.q2_coords[sp.dofmap.element_nodes[e][a]];
    xhat[a] = {c[0], c[1]};
  }

  std::array<T, kLocalDofs> rloc{};

  const double c1 = (region == Region::Clot) ? mat.c1_clot() : mat.c1();
  const double c2 = (region == Region::Clot) ? mat.c2_clot() : mat.c2();
  const double flux_w = 0.5;  // Crank-Nicolson half weight on the flux terms

  for (const QuadPoint& qp : sp.ref.qp) {
    const auto rg = eval_geometry<double>(qp, xhat, false, e);
    const double wref = qp.weight * rg.det;

    const Vec2<T> u = interp_vec(cur.u, qp.n);
    const Vec2<double> d_prev = interp_vec(prev.d, qp.n);
    const Vec2<double> u_prev = interp_vec(prev.u, qp.n);
    const Vec2<T> d = interp_vec(cur.d, qp.n);
    const Vec2<T> ddot{(d.x - d_prev.x) / dt, (d.y - d_prev.y) / dt};
    const Vec2<T> udot{(u.x - u_prev.x) / dt, (u.y - u_prev.y) / dt};

    // geometry of the configuration the flux terms integrate over
    std::array<Vec2<T>, 9> xdef;
    const bool frozen = prob.frozen_geometry && !solid && !kOldFlux;
    for (int a = 0; a < 9; ++a) {
      if (frozen) {
        xdef[a] = {T(xhat[a].x + prev.d[a].x), T(xhat[a].y + prev.d[a].y)};
      } else {
        xdef[a] = {xhat[a].x + cur.d[a].x, xhat[a].y + cur.d[a].y};
      }
    }

    if (solid) {
      const auto dg = eval_geometry<T>(qp, xdef, false, e);
      const T wdef = qp.weight * dg.det;

      std::array<Vec2<T>, 9> ref_grads;
      for (int a = 0; a < 9; ++a) ref_grads[a] = Vec2<T>{T(rg.grad[a].x), T(rg.grad[a].y)};
      const Mat2<T> grad_d_ref = grad_vec(cur.d, ref_grads);
      const auto def = deformation(grad_d_ref, e);
      const T p = cur.p[0] * qp.psi[0] + cur.p[1] * qp.psi[1] + cur.p[2] * qp.psi[2];
      const Mat2<T> sigma = mooney_rivlin_stress(def, p, c1, c2);

      if constexpr (!kOldFlux) {
        for (int a = 0; a < 9; ++a) {
          for (int i = 0; i < 2; ++i) {
            rloc[local_u(a, i)] += wdef * (mat.rho_s * udot[i] * qp.n[a]);
            // kinematic equation, rho-scaled: its velocity block is the mass matrix
            rloc[local_d(a, i)] += wref * mat.rho_s * (u[i] - ddot[i]) * qp.n[a];
          }
        }
        for (int m = 0; m < 3; ++m) rloc[local_p(m)] += wref * (def.j - 1.0) * qp.psi[m];
      }
      for (int a = 0; a < 9; ++a) {
        for (int i = 0; i < 2; ++i) {
          T flux = sigma(i, 0) * dg.grad[a].x + sigma(i, 1) * dg.grad[a].y;
          flux -= mat.rho_s * prob.body_force_solid[i] * qp.n[a];
          rloc[local_u(a, i)] += flux_w * wdef * flux;
        }
      }
    } else {
      const auto dg = eval_geometry<T>(qp, xdef, !kOldFlux, e);
      const T wdef = qp.weight * dg.det;

      const Mat2<T> grad_u = grad_vec(cur.u, dg.grad);
      const T p = cur.p[0] * qp.psi[0] + cur.p[1] * qp.psi[1] + cur.p[2] * qp.psi[2];
      const Mat2<T> sigma = newtonian_stress(grad_u, p, mat.mu);
      const Vec2<T> adv{u.x - ddot.x, u.y - ddot.y};
      const Vec2<T> conv = matvec(grad_u, adv);  // (adv . grad) u

      for (int a = 0; a < 9; ++a) {
        for (int i = 0; i < 2; ++i) {
          T flux = mat.rho_f * conv[i] * qp.n[a];
          flux += sigma(i, 0) * dg.grad[a].x + sigma(i, 1) * dg.grad[a].y;
          flux -= mat.rho_f * prob.body_force_fluid[i] * qp.n[a];
          rloc[local_u(a, i)] += flux_w * wdef * flux;
        }
      }

      if constexpr (!kOldFlux) {
        // Galerkin time derivative
        for (int a = 0; a < 9; ++a)
          for (int i = 0; i < 2; ++i) rloc[local_u(a, i)] += wdef * mat.rho_f * udot[i] * qp.n[a];

        // SUPG, implicit at the new time level
        const double nu = mat.kinematic_viscosity();
        const double lambda = stab.elements[e].lambda;
        const double sl = std::sqrt(lambda);
        const double u_star = 4.0 * sl * nu;
        const T u2 = dot(u, u);
        T tau;
        if (value(u2) < u_star * u_star) {
          tau = T(1.0 / (sl * u_star));  // diffusive branch, speed-free
        } else {
          tau = T(1.0) / (sl * sqrt(u2));
        }

        const Vec2<T> grad_p = matvec_t(dg.jac_inv, Vec2<T>{cur.p[1], cur.p[2]});
        std::array<Mat2<T>, 2> hess_u;
        for (int a = 0; a < 9; ++a) {
          for (int i = 0; i < 2; ++i) {
            hess_u[i](0, 0) += cur.u[a][i] * dg.hess[a][0];
            hess_u[i](0, 1) += cur.u[a][i] * dg.hess[a][1];
            hess_u[i](1, 0) += cur.u[a][i] * dg.hess[a][1];
            hess_u[i](1, 1) += cur.u[a][i] * dg.hess[a][2];
          }
        }
        Vec2<T> strong;
        for (int i = 0; i < 2; ++i) {
          const T lap = hess_u[i](0, 0) + hess_u[i](1, 1);
          const T ddiv = hess_u[0](0, i) + hess_u[1](1, i);
          const T div_sigma_i = mat.mu * (lap + ddiv) - grad_p[i];
          strong[i] =
              mat.rho_f * (udot[i] + conv[i]) - div_sigma_i - mat.rho_f * prob.body_force_fluid[i];
        }
        for (int a = 0; a < 9; ++a) {
          const T test = tau * mat.rho_f * dot(adv, dg.grad[a]);
          for (int i = 0; i < 2; ++i) rloc[local_u(a, i)] += wdef * strong[i] * test;
        }

        // fluid continuity on the current configuration
        const T divu = trace(grad_u);
        for (int m = 0; m < 3; ++m) rloc[local_p(m)] += wdef * divu * qp.psi[m];

        // mesh motion on the reference configuration; interface tests vanish
        std::array<Vec2<T>, 9> ref_grads;
        for (int a = 0; a < 9; ++a) ref_grads[a] = Vec2<T>{T(rg.grad[a].x), T(rg.grad[a].y)};
        const Mat2<T> grad_d_ref = grad_vec(cur.d, ref_grads);
        const Mat2<T> sym = grad_d_ref + transpose(grad_d_ref);
        for (int a = 0; a < 9; ++a) {
          const int node = sp.dofmap.element_nodes[e][a];
          if (sp.layout.node_solid[node]) continue;
          for (int i = 0; i < 2; ++i) {
            rloc[local_d(a, i)] +=
                wref * k_element_[e] * (sym(i, 0) * rg.grad[a].x + sym(i, 1) * rg.grad[a].y);
          }
        }
      }
    }
  }

  // normal-stress traction: -0.5 * g(t) * (phi . n) ds on the current
  // configuration; the unnormalized rotated tangent absorbs the length
  // element, so no square roots appear.
  if (auto it = traction_.find(e); it != traction_.end()) {
    for (const TractionFace& tf : it->second) {
      const double g = tf.amplitude * std::sin(2.0 * kPi * t_eval) + tf.offset;
      for (const EdgeQuadPoint& eq : sp.ref.edge_qp[tf.edge]) {
        Vec2<T> tangent{T(0.0), T(0.0)};
        for (int a = 0; a < 9; ++a) {
          const T cx = xhat[a].x + cur.d[a].x;
          const T cy = xhat[a].y + cur.d[a].y;
          const double dns = eq.dn[a][0] * eq.dref[0] + eq.dn[a][1] * eq.dref[1];
          tangent.x += cx * dns;
          tangent.y += cy * dns;
        }
        const Vec2<T> n_raw{tangent.y, T(0.0) - tangent.x};  // outward for ccw elements
        for (int a = 0; a < 9; ++a) {
          if (eq.n[a] == 0.0) continue;
          for (int i = 0; i < 2; ++i)
            rloc[local_u(a, i)] -= flux_w * eq.weight * g * eq.n[a] * n_raw[i];
        }
      }
    }
  }

  // scatter
  for (int r = 0; r < kLocalDofs; ++r) {
    if constexpr (std::is_same_v<T, double>) {
      residual_[dofs.global[r]] += rloc[r];
      (void)want_jacobian;
    } else {
      residual_[dofs.global[r]] += rloc[r].v;
      if (want_jacobian) {
        for (int c = 0; c < kLocalDofs; ++c) {
          if (rloc[r].g[c] != 0.0) builder_.add(dofs.global[r], dofs.global[c], rloc[r].g[c]);
        }
      }
    }
  }
}

void Assembler::assemble(const std::vector<double>& x_new, const std::vector<double>& x_old,
                         const std::vector<double>& x_older, const StabilizationState& stab,
                         double t_new, bool want_jacobian) {
  const Space& sp = *prob_->space;
  if (static_cast<int>(x_new.size()) != sp.layout.n_dofs)
    throw std::invalid_argument("assemble: state size mismatch");
  std::fill(residual_.begin(), residual_.end(), 0.0);
  if (want_jacobian) builder_.zero_values();

  const double t_old = t_new - prob_->scheme.dt;
  for (int e = 0; e < sp.mesh->n_elements(); ++e) {
    if (want_jacobian) {
      element_kernel<Dual39, false>(e, x_new, x_old, stab, t_new, true);
    } else {
      element_kernel<double, false>(e, x_new, x_old, stab, t_new, false);
    }
    // explicit Crank-Nicolson half on the old state and geometry
    element_kernel<double, true>(e, x_old, x_older, stab, t_old, false);
  }
}

}  // namespace fsi
