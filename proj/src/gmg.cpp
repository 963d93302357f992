// SPDX-License-Identifier: Apache-2.0

#include "fsi/gmg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "fsi/errors.hpp"
#include "fsi/precond.hpp"

namespace fsi {

NodeInjection build_node_injection(const MeshHierarchy& hier, int fine_level, const Space& coarse,
                                   const Space& fine) {
  if (fine_level < 1 || fine_level >= hier.n_levels())
    throw std::invalid_argument("injection: bad fine level");
  const auto& parent_of = hier.parent_map[fine_level - 1];

  NodeInjection inj;
  std::vector<char> row_done(fine.dofmap.n_q2_nodes, 0);
  // child quadrant offsets matching the refinement pattern
  constexpr double kQuad[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};

  for (int pass = 0; pass < 2; ++pass) {
    const bool want_solid = (pass == 0);
    for (int parent = 0; parent < coarse.mesh->n_elements(); ++parent) {
      if (static_cast<bool>(coarse.layout.elem_solid[parent]) != want_solid) continue;
      for (int k = 0; k < 4; ++k) {
        const int child = 4 * parent + k;
        if (parent_of[child] != parent) throw std::logic_error("injection: hierarchy mismatch");
        for (int a = 0; a < 9; ++a) {
          const int nf = fine.dofmap.element_nodes[child][a];
          if (row_done[nf]) continue;
          row_done[nf] = 1;
          const double tx = (a % 3) - 1.0, ty = (a / 3) - 1.0;
          const double xi = 0.5 * (tx + kQuad[k][0]);
          const double eta = 0.5 * (ty + kQuad[k][1]);
          std::array<double, 9> w;
          q2_shape(xi, eta, w);
          const bool fine_solid = fine.layout.node_solid[nf];
          for (int b = 0; b < 9; ++b) {
            if (w[b] == 0.0) continue;
            const int nc = coarse.dofmap.element_nodes[parent][b];
            const bool coarse_solid = coarse.layout.node_solid[nc];
            const Triplet t{fine.layout.node_rank[nf], coarse.layout.node_rank[nc], w[b]};
            if (fine_solid && coarse_solid) {
              inj.ss.push_back(t);
            } else if (!fine_solid && coarse_solid) {
              inj.fs.push_back(t);
            } else if (!fine_solid && !coarse_solid) {
              inj.ff.push_back(t);
            } else {
              throw std::logic_error("injection: solid fine node fed by a fluid coarse node");
            }
          }
        }
      }
      // pressure modes of the four children
      for (int k = 0; k < 4; ++k) {
        const int child = 4 * parent + k;
        const int fr = 3 * fine.layout.elem_prank[child];
        const int cr = 3 * coarse.layout.elem_prank[parent];
        auto& dst = want_solid ? inj.ps : inj.pf;
        dst.push_back({fr + 0, cr + 0, 1.0});
        dst.push_back({fr + 0, cr + 1, 0.5 * kQuad[k][0]});
        dst.push_back({fr + 0, cr + 2, 0.5 * kQuad[k][1]});
        dst.push_back({fr + 1, cr + 1, 0.5});
        dst.push_back({fr + 2, cr + 2, 0.5});
      }
    }
  }
  return inj;
}

TransferPair build_transfer(const MeshHierarchy& hier, int fine_level, const Space& coarse,
                            const Space& fine, const OrderingPlan& plan_coarse,
                            const OrderingPlan& plan_fine) {
  const NodeInjection inj = build_node_injection(hier, fine_level, coarse, fine);
  const FieldLayout& fc = coarse.layout;
  const FieldLayout& ff = fine.layout;

  std::vector<Triplet> pt, rt;
  auto place_nodes = [&](const std::vector<Triplet>& w, Field fine_field, Field coarse_field,
                         bool into_p, bool into_r) {
    const int fo = ff.field_offset(fine_field);
    const int co = fc.field_offset(coarse_field);
    for (const auto& t : w) {
      for (int comp = 0; comp < 2; ++comp) {
        const int fr = fo + 2 * t.row + comp;
        const int cc = co + 2 * t.col + comp;
        if (into_p) pt.push_back({fr, cc, t.value});
        if (into_r) rt.push_back({cc, fr, t.value});
      }
    }
  };
  auto place_pressure = [&](const std::vector<Triplet>& w, Field field) {
    const int fo = ff.field_offset(field);
    const int co = fc.field_offset(field);
    for (const auto& t : w) {
      pt.push_back({fo + t.row, co + t.col, t.value});
      rt.push_back({co + t.col, fo + t.row, t.value});
    }
  };

  // prolongation blocks and their restriction placements
  place_nodes(inj.ss, Field::Ds, Field::Ds, true, true);   // P_dsds, R_KK
  place_nodes(inj.ss, Field::Us, Field::Us, true, true);   // P_usus, R_SS
  place_nodes(inj.fs, Field::Df, Field::Ds, true, false);  // P_dfds
  // R_SF = (P_dfds)^T placed into the solid momentum rows from the fluid
  // momentum residual
  {
    const int co = fc.field_offset(Field::Us);
    const int fo = ff.field_offset(Field::Uf);
    for (const auto& t : inj.fs)
      for (int comp = 0; comp < 2; ++comp)
        rt.push_back({co + 2 * t.col + comp, fo + 2 * t.row + comp, t.value});
  }
  // P_ufus exists in the prolongation but its transpose feeds no
  // restriction row
  place_nodes(inj.fs, Field::Uf, Field::Us, true, false);
  place_nodes(inj.ff, Field::Df, Field::Df, true, true);  // P_dfdf, R_AA
  place_nodes(inj.ff, Field::Uf, Field::Uf, true, true);  // P_ufuf, R_FF
  place_pressure(inj.ps, Field::Ps);                      // R_VV
  place_pressure(inj.pf, Field::Pf);                      // R_WW

  SparseMatrix p_nat = SparseMatrix::from_triplets(ff.n_dofs, fc.n_dofs, pt);
  SparseMatrix r_nat = SparseMatrix::from_triplets(fc.n_dofs, ff.n_dofs, rt);

  TransferPair out;
  // solution-space frames for P, equation-space frames for R
  out.p = p_nat.permuted(plan_fine.col_from, plan_coarse.col_to);
  out.r = r_nat.permuted(plan_coarse.row_from, plan_fine.row_to);
  return out;
}

std::vector<double> restrict_state(const MeshHierarchy& hier, int fine_level, const Space& coarse,
                                   const Space& fine, const std::vector<double>& x_fine) {
  const auto& origin = hier.node_origin[fine_level - 1];
  // reverse maps from the refinement records
  std::map<std::pair<int, int>, int> edge_to_fine;
  std::vector<int> center_to_fine(coarse.mesh->n_elements(), -1);
  for (std::size_t nf = 0; nf < origin.size(); ++nf) {
    if (origin[nf].kind == NodeOrigin::Kind::EdgeMidpoint)
      edge_to_fine[{origin[nf].a, origin[nf].b}] = static_cast<int>(nf);
    else if (origin[nf].kind == NodeOrigin::Kind::ElementCenter)
      center_to_fine[origin[nf].a] = static_cast<int>(nf);
  }

  std::vector<double> x_coarse(coarse.layout.n_dofs, 0.0);
  for (int nc = 0; nc < coarse.dofmap.n_q2_nodes; ++nc) {
    const Q2NodeKey& key = coarse.dofmap.q2_key[nc];
    int nf = -1;
    if (key.kind == Q2NodeKey::Kind::MeshNode) {
      nf = key.a;  // refine keeps coarse corner node ids
    } else if (key.kind == Q2NodeKey::Kind::Edge) {
      nf = edge_to_fine.at({key.a, key.b});
    } else {
      nf = center_to_fine[key.a];
    }
    for (int comp = 0; comp < 2; ++comp) {
      x_coarse[coarse.layout.d_dof(nc, comp)] = x_fine[fine.layout.d_dof(nf, comp)];
      x_coarse[coarse.layout.u_dof(nc, comp)] = x_fine[fine.layout.u_dof(nf, comp)];
    }
  }
  // fit the coarse linear pressure from the four child center values
  for (int e = 0; e < coarse.mesh->n_elements(); ++e) {
    double v[4];
    for (int k = 0; k < 4; ++k) v[k] = x_fine[fine.layout.p_dof(4 * e + k, 0)];
    x_coarse[coarse.layout.p_dof(e, 0)] = 0.25 * (v[0] + v[1] + v[2] + v[3]);
    x_coarse[coarse.layout.p_dof(e, 1)] = 0.5 * (-v[0] + v[1] + v[2] - v[3]);
    x_coarse[coarse.layout.p_dof(e, 2)] = 0.5 * (-v[0] - v[1] + v[2] + v[3]);
  }
  return x_coarse;
}

GmgPreconditioner::GmgPreconditioner(std::vector<GmgLevel> levels, CycleConfig cfg)
    : levels_(std::move(levels)), cfg_(cfg) {
  if (levels_.empty()) throw std::invalid_argument("gmg: no levels");
  if (cfg_.pre < 0 || cfg_.post < 0 || (cfg_.pre == 0 && cfg_.post == 0 && levels_.size() > 1))
    throw std::invalid_argument("gmg: need at least one smoothing sweep");
  coarse_lu_ = std::make_unique<SparseLu>(*levels_[0].a, true, "gmg-coarse");
}

int GmgPreconditioner::size() const { return levels_.back().a->rows(); }

void GmgPreconditioner::cycle(int level, char mode, const std::vector<double>& b,
                              std::vector<double>& x) const {
  const GmgLevel& lv = levels_[level];
  const int n = lv.a->rows();
  if (level == 0) {
    // direct coarse solve: x += A0^{ -1} (b - A0 x)
    std::vector<double> r(n);
    lv.a->multiply(x.data(), r.data());
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    auto dx = coarse_lu_->solve(r);
    for (int i = 0; i < n; ++i) x[i] += dx[i];
    return;
  }

  richardson_smooth(*lv.a, *lv.smoother, x, b, cfg_.omega, cfg_.pre);

  std::vector<double> r(n);
  lv.a->multiply(x.data(), r.data());
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];

  std::vector<double> rc(lv.r.rows());
  lv.r.multiply(r.data(), rc.data());
  const GmgLevel& below = levels_[level - 1];
  for (int i = 0; i < lv.r.rows(); ++i)
    if (below.constrained_rows[i]) rc[i] = 0.0;

  std::vector<double> ec(lv.r.rows(), 0.0);
  switch (mode) {
    case 'v':
      cycle(level - 1, 'v', rc, ec);
      break;
    case 'w':
      cycle(level - 1, 'w', rc, ec);
      cycle(level - 1, 'w', rc, ec);
      break;
    case 'f':
      cycle(level - 1, 'f', rc, ec);
      cycle(level - 1, 'v', rc, ec);
      break;
    default:
      throw std::invalid_argument("gmg: unknown cycle type");
  }
  for (int i = 0; i < lv.r.rows(); ++i)
    if (below.constrained_cols[i]) ec[i] = 0.0;

  std::vector<double> ef(n);
  lv.p.multiply(ec.data(), ef.data());
  for (int i = 0; i < n; ++i)
    if (!lv.constrained_cols[i]) x[i] += ef[i];

  richardson_smooth(*lv.a, *lv.smoother, x, b, cfg_.omega, cfg_.post);
}

void GmgPreconditioner::apply(const double* r, double* z) const {
  const int n = size();
  std::vector<double> b(r, r + n), x(n, 0.0);
  cycle(static_cast<int>(levels_.size()) - 1, cfg_.cycle, b, x);
  std::copy(x.begin(), x.end(), z);
}

}  // namespace fsi
