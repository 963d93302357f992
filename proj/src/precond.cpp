// SPDX-License-Identifier: Apache-2.0

#include "fsi/precond.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fsi/errors.hpp"

namespace fsi {

DenseFactorization factor_principal_block(const SparseMatrix& a, const IndexSet& dofs) {
  dofs.validate(a.rows());
  const auto block = extract_submatrix(a, dofs, dofs);
  DenseMatrix dense(dofs.size(), dofs.size());
  for (int i = 0; i < block.rows(); ++i)
    for (int k = block.row_offsets()[i]; k < block.row_offsets()[i + 1]; ++k)
      dense(i, block.col_indices()[k]) = block.values()[k];
  return DenseFactorization(dense, dofs.label);
}

SchwarzSweep::SchwarzSweep(const SparseMatrix& a, std::vector<IndexSet> block_dofs,
                           SchwarzMode mode)
    : n_(a.rows()), mode_(mode) {
  if (a.rows() != a.cols()) throw std::invalid_argument("schwarz: matrix not square");
  blocks_.reserve(block_dofs.size());
  for (auto& dofs : block_dofs) {
    Block b{std::move(dofs), DenseFactorization()};
    b.lu = factor_principal_block(a, b.dofs);
    blocks_.push_back(std::move(b));
  }
  if (mode_ == SchwarzMode::Multiplicative) {
    csc_ = SparseCsc::from_csr(a);
  } else {
    cover_.assign(n_, 0.0);
    for (const auto& b : blocks_)
      for (int i : b.dofs.indices) cover_[i] += 1.0;
  }
}

void SchwarzSweep::apply(const double* r, double* z) const {
  std::fill(z, z + n_, 0.0);
  if (mode_ == SchwarzMode::Additive) {
    std::vector<double> rhs, delta;
    for (const auto& b : blocks_) {
      const int m = b.dofs.size();
      rhs.resize(m);
      delta.resize(m);
      for (int i = 0; i < m; ++i) rhs[i] = r[b.dofs.indices[i]];
      b.lu.solve(rhs.data(), delta.data());
      for (int i = 0; i < m; ++i) z[b.dofs.indices[i]] += delta[i];
    }
    for (int i = 0; i < n_; ++i)
      if (cover_[i] > 1.0) z[i] /= cover_[i];
    return;
  }

  // multiplicative: each block sees the residual updated by all previous
  // block corrections
  std::vector<double> res(r, r + n_);
  std::vector<double> rhs, delta;
  for (const auto& b : blocks_) {
    const int m = b.dofs.size();
    rhs.resize(m);
    delta.resize(m);
    for (int i = 0; i < m; ++i) rhs[i] = res[b.dofs.indices[i]];
    b.lu.solve(rhs.data(), delta.data());
    for (int i = 0; i < m; ++i) {
      const int c = b.dofs.indices[i];
      z[c] += delta[i];
      const double d = delta[i];
      if (d == 0.0) continue;
      for (int k = csc_.col_offsets[c]; k < csc_.col_offsets[c + 1]; ++k)
        res[csc_.row_indices[k]] -= csc_.values[k] * d;
    }
  }
}

std::vector<double> lumped_mass(const SparseMatrix& mass_block) {
  std::vector<double> lumped(mass_block.rows(), 0.0);
  for (int i = 0; i < mass_block.rows(); ++i) {
    for (int k = mass_block.row_offsets()[i]; k < mass_block.row_offsets()[i + 1]; ++k)
      lumped[i] += mass_block.values()[k];
    if (lumped[i] <= 0.0) throw SingularBlockError("lumped mass row " + std::to_string(i));
  }
  return lumped;
}

std::vector<std::uint8_t> constrained_positions(const OrderingPlan& plan,
                                                const ConstraintMasks& masks) {
  std::vector<std::uint8_t> mask(plan.n, 0);
  for (int p = 0; p < plan.n; ++p) {
    if (masks.dofs[plan.col_from[p]] || masks.rows[plan.row_from[p]]) mask[p] = 1;
  }
  return mask;
}

AsPreconditioner::AsPreconditioner(const SparseMatrix& a_j1, const OrderingPlan& j1,
                                   const std::vector<VankaBlock>& blocks,
                                   const ConstraintMasks* constrained) {
  std::vector<std::uint8_t> drop;
  if (constrained) drop = constrained_positions(j1, *constrained);
  std::vector<IndexSet> frame_sets;
  frame_sets.reserve(blocks.size());
  for (const auto& blk : blocks) {
    std::vector<int> pos;
    pos.reserve(blk.dofs.indices.size());
    for (int dof : blk.dofs.indices) {
      const int p = j1.frame_of(dof);
      if (!drop.empty() && drop[p]) continue;
      pos.push_back(p);
    }
    frame_sets.push_back(make_index_set(std::move(pos), blk.dofs.label));
  }
  sweep_ = std::make_unique<SchwarzSweep>(a_j1, std::move(frame_sets), SchwarzMode::Multiplicative);
}

FsPreconditioner::FsPreconditioner(const SparseMatrix& a_j2, const OrderingPlan& j2,
                                   const Space& space, const FieldSplitPlan& plan,
                                   const ConstraintMasks* constrained)
    : n_(a_j2.rows()) {
  std::vector<std::uint8_t> drop;
  if (constrained) drop = constrained_positions(j2, *constrained);
  auto dropped = [&](int frame_pos) { return !drop.empty() && drop[frame_pos]; };
  const FieldLayout& fl = space.layout;
  const Mesh& mesh = *space.mesh;
  g1_size_ = j2.block_offsets[3];
  g2_size_ = n_ - g1_size_;
  n_us_ = j2.block_offsets[4] - j2.block_offsets[3];

  std::vector<int> g1(g1_size_), g2(g2_size_);
  for (int i = 0; i < g1_size_; ++i) g1[i] = i;
  for (int i = 0; i < g2_size_; ++i) g2[i] = g1_size_ + i;
  const IndexSet g1set{std::move(g1), "group-d-ps"};
  const IndexSet g2set{std::move(g2), "group-u-pf"};
  a_g1_ = extract_submatrix(a_j2, g1set, g1set);
  a_g2_ = extract_submatrix(a_j2, g2set, g2set);
  csc_g2_ = SparseCsc::from_csr(a_g2_);

  // Rows of constrained velocity dofs keep their unit diagonal in group 2,
  // which leaves the paired group-1 row empty; those pairs are dropped from
  // the blocks (the matching displacement dof is constrained as well).
  std::vector<char> g1_row_empty(g1_size_, 1);
  for (int i = 0; i < g1_size_; ++i) {
    for (int k = a_g1_.row_offsets()[i]; k < a_g1_.row_offsets()[i + 1]; ++k) {
      if (a_g1_.values()[k] != 0.0) {
        g1_row_empty[i] = 0;
        break;
      }
    }
  }
  auto drop_empty = [&](std::vector<int>& dofs) {
    dofs.erase(std::remove_if(dofs.begin(), dofs.end(), [&](int p) { return g1_row_empty[p]; }),
               dofs.end());
  };

  // element chunks per region, ascending ids
  std::vector<int> solid_elems, fluid_elems;
  for (int e = 0; e < mesh.n_elements(); ++e)
    (fl.elem_solid[e] ? solid_elems : fluid_elems).push_back(e);

  // AS1: solid [d^s, p^s] Vanka blocks, then overlapping fluid d^f blocks
  std::vector<IndexSet> as1_sets;
  for (std::size_t start = 0; start < solid_elems.size();
       start += static_cast<std::size_t>(plan.elems_per_block)) {
    std::vector<int> dofs;
    const auto stop = std::min(start + plan.elems_per_block, solid_elems.size());
    for (std::size_t k = start; k < stop; ++k) {
      const int e = solid_elems[k];
      for (int m = 0; m < 3; ++m) dofs.push_back(j2.frame_of(fl.p_dof(e, m)));
      for (int a = 0; a < 9; ++a) {
        const int node = space.dofmap.element_nodes[e][a];
        if (!fl.node_solid[node]) continue;
        for (int i = 0; i < 2; ++i) {
          const int p = j2.frame_of(fl.d_dof(node, i));
          if (!dropped(p)) dofs.push_back(p);
        }
      }
    }
    drop_empty(dofs);
    as1_sets.push_back(make_index_set(std::move(dofs), "fs-solid-dp-" + std::to_string(start)));
  }

  // element adjacency through shared Q2 nodes, for the overlap layers
  std::vector<std::vector<int>> node_elems(space.dofmap.n_q2_nodes);
  for (int e = 0; e < mesh.n_elements(); ++e)
    for (int a = 0; a < 9; ++a) node_elems[space.dofmap.element_nodes[e][a]].push_back(e);

  for (std::size_t start = 0; start < fluid_elems.size();
       start += static_cast<std::size_t>(plan.elems_per_block)) {
    const auto stop = std::min(start + plan.elems_per_block, fluid_elems.size());
    std::vector<int> patch(fluid_elems.begin() + start, fluid_elems.begin() + stop);
    std::vector<char> in_patch(mesh.n_elements(), 0);
    for (int e : patch) in_patch[e] = 1;
    std::vector<int> frontier = patch;
    for (int layer = 0; layer < plan.overlap_layers; ++layer) {
      std::vector<int> next;
      for (int e : frontier) {
        for (int a = 0; a < 9; ++a) {
          for (int nb : node_elems[space.dofmap.element_nodes[e][a]]) {
            if (!in_patch[nb] && !fl.elem_solid[nb]) {
              in_patch[nb] = 1;
              next.push_back(nb);
            }
          }
        }
      }
      patch.insert(patch.end(), next.begin(), next.end());
      frontier = std::move(next);
    }
    std::vector<int> dofs;
    for (int e : patch) {
      for (int a = 0; a < 9; ++a) {
        const int node = space.dofmap.element_nodes[e][a];
        if (fl.node_solid[node]) continue;
        for (int i = 0; i < 2; ++i) {
          const int p = j2.frame_of(fl.d_dof(node, i));
          if (!dropped(p)) dofs.push_back(p);
        }
      }
    }
    drop_empty(dofs);
    as1_sets.push_back(make_index_set(std::move(dofs), "fs-fluid-d-" + std::to_string(start)));
  }
  as1_ = std::make_unique<SchwarzSweep>(a_g1_, std::move(as1_sets), SchwarzMode::Multiplicative);

  // AS2 solid part: the lumped solid-velocity mass. Rows belonging to
  // displacement constraints keep their unit diagonal in group 1 and are
  // empty here; they fall back to an identity entry.
  lumped_.assign(n_us_, 1.0);
  for (int i = 0; i < n_us_; ++i) {
    double s = 0.0, amax = 0.0;
    for (int k = a_g2_.row_offsets()[i]; k < a_g2_.row_offsets()[i + 1]; ++k) {
      s += a_g2_.values()[k];
      amax = std::max(amax, std::abs(a_g2_.values()[k]));
    }
    if (amax == 0.0) {
      lumped_[i] = 1.0;  // constrained row
    } else if (s <= 0.0) {
      throw SingularBlockError("fs lumped mass row " + std::to_string(i));
    } else {
      lumped_[i] = s;
    }
  }

  // AS2 fluid part: [u^f, p^f] Vanka blocks in group-2 local positions
  for (std::size_t start = 0; start < fluid_elems.size();
       start += static_cast<std::size_t>(plan.elems_per_block)) {
    std::vector<int> dofs;
    const auto stop = std::min(start + plan.elems_per_block, fluid_elems.size());
    for (std::size_t k = start; k < stop; ++k) {
      const int e = fluid_elems[k];
      for (int m = 0; m < 3; ++m) dofs.push_back(j2.frame_of(fl.p_dof(e, m)) - g1_size_);
      for (int a = 0; a < 9; ++a) {
        const int node = space.dofmap.element_nodes[e][a];
        if (fl.node_solid[node]) continue;
        for (int i = 0; i < 2; ++i) {
          const int p = j2.frame_of(fl.u_dof(node, i));
          if (!dropped(p)) dofs.push_back(p - g1_size_);
        }
      }
    }
    FluidBlock blk;
    blk.dofs = make_index_set(std::move(dofs), "fs-fluid-up-" + std::to_string(start));
    blk.lu = factor_principal_block(a_g2_, blk.dofs);
    as2_fluid_.push_back(std::move(blk));
  }
}

void FsPreconditioner::apply(const double* r, double* z) const {
  std::fill(z, z + n_, 0.0);
  // group 1
  as1_->apply(r, z);

  // group 2: Jacobi on the lumped mass, then the fluid blocks against the
  // updated residual
  const double* r2 = r + g1_size_;
  double* z2 = z + g1_size_;
  std::vector<double> res(r2, r2 + g2_size_);
  for (int i = 0; i < n_us_; ++i) {
    const double d = r2[i] / lumped_[i];
    z2[i] = d;
    if (d == 0.0) continue;
    for (int k = csc_g2_.col_offsets[i]; k < csc_g2_.col_offsets[i + 1]; ++k)
      res[csc_g2_.row_indices[k]] -= csc_g2_.values[k] * d;
  }
  std::vector<double> rhs, delta;
  for (const auto& b : as2_fluid_) {
    const int m = b.dofs.size();
    rhs.resize(m);
    delta.resize(m);
    for (int i = 0; i < m; ++i) rhs[i] = res[b.dofs.indices[i]];
    b.lu.solve(rhs.data(), delta.data());
    for (int i = 0; i < m; ++i) {
      const int c = b.dofs.indices[i];
      z2[c] += delta[i];
      if (delta[i] == 0.0) continue;
      for (int k = csc_g2_.col_offsets[c]; k < csc_g2_.col_offsets[c + 1]; ++k)
        res[csc_g2_.row_indices[k]] -= csc_g2_.values[k] * delta[i];
    }
  }
}

void richardson_smooth(const SparseMatrix& a, const LinearOperator& m, std::vector<double>& x,
                       const std::vector<double>& b, double omega, int sweeps) {
  if (omega < 0.0 || omega >= 2.0) throw std::invalid_argument("richardson: omega outside [0,2)");
  if (omega == 0.0) return;  // degenerate damping: iterate unchanged
  const int n = a.rows();
  std::vector<double> res(n), z(n);
  for (int s = 0; s < sweeps; ++s) {
    a.multiply(x.data(), res.data());
    for (int i = 0; i < n; ++i) res[i] = b[i] - res[i];
    m.apply(res.data(), z.data());
    for (int i = 0; i < n; ++i) x[i] += omega * z[i];
  }
}

}  // namespace fsi
