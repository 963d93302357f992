// SPDX-License-Identifier: Apache-2.0
//
// Level smoother preconditioners. The AS preconditioner sweeps the
// region-wise Vanka blocks of the J1-ordered matrix in a locally
// multiplicative pass (solid blocks first). The FS preconditioner acts on
// the J2-ordered matrix: its two field groups are preconditioned
// independently, group [d, p^s] by a Vanka/overlapping-block sweep and
// group [u, p^f] by one Jacobi application on the lumped solid-velocity
// mass followed by the fluid Vanka blocks.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fsi/dense.hpp"
#include "fsi/krylov.hpp"
#include "fsi/ordering.hpp"
#include "fsi/sparse.hpp"

namespace fsi {

enum class SchwarzMode { Additive, Multiplicative };

// One Schwarz sweep over factorized principal subblocks of a frame
// matrix. Multiplicative sweeps re-restrict the running residual after
// each block solve; additive sweeps solve every block against the
// incoming residual and average overlapping corrections by cover count.
class SchwarzSweep final : public LinearOperator {
 public:
  SchwarzSweep(const SparseMatrix& a, std::vector<IndexSet> block_dofs, SchwarzMode mode);

  int size() const override { return n_; }
  void apply(const double* r, double* z) const override;

  int n_blocks() const { return static_cast<int>(blocks_.size()); }
  const IndexSet& block_dofs(int i) const { return blocks_[i].dofs; }
  SchwarzMode mode() const { return mode_; }

 private:
  struct Block {
    IndexSet dofs;
    DenseFactorization lu;
  };
  int n_ = 0;
  SchwarzMode mode_;
  std::vector<Block> blocks_;
  SparseCsc csc_;              // multiplicative residual updates
  std::vector<double> cover_;  // additive averaging weights
};

// Extracts and factorizes the principal submatrix of a on the given dofs.
DenseFactorization factor_principal_block(const SparseMatrix& a, const IndexSet& dofs);

// Row-sum lumping of a mass-matrix block; throws SingularBlockError on a
// non-positive entry (cannot happen for an unconstrained mass block
// assembled with positive density).
std::vector<double> lumped_mass(const SparseMatrix& mass_block);

// Natural-id masks of the Dirichlet data: `rows` marks equation slots
// replaced by identities, `dofs` the constrained variables.
struct ConstraintMasks {
  std::vector<std::uint8_t> rows, dofs;
};

// Frame positions whose equation row was replaced by a Dirichlet identity
// or whose variable is constrained; such pairs are excluded from smoother
// blocks (the equivalent of eliminating constrained dofs locally).
std::vector<std::uint8_t> constrained_positions(const OrderingPlan& plan,
                                                const ConstraintMasks& masks);

// AS preconditioner on the J1-ordered matrix: one locally multiplicative
// sweep over solid then fluid Vanka blocks.
class AsPreconditioner final : public LinearOperator {
 public:
  AsPreconditioner(const SparseMatrix& a_j1, const OrderingPlan& j1,
                   const std::vector<VankaBlock>& blocks,
                   const ConstraintMasks* constrained = nullptr);
  int size() const override { return sweep_->size(); }
  void apply(const double* r, double* z) const override { sweep_->apply(r, z); }
  const SchwarzSweep& sweep() const { return *sweep_; }

 private:
  std::unique_ptr<SchwarzSweep> sweep_;
};

struct FieldSplitPlan {
  int elems_per_block = 4;
  int overlap_layers = 1;  // mesh-motion block overlap in element layers
};

// FS preconditioner on the J2-ordered matrix. One application never moves
// residual mass across the two field groups.
class FsPreconditioner final : public LinearOperator {
 public:
  FsPreconditioner(const SparseMatrix& a_j2, const OrderingPlan& j2, const Space& space,
                   const FieldSplitPlan& plan, const ConstraintMasks* constrained = nullptr);
  int size() const override { return n_; }
  void apply(const double* r, double* z) const override;

  const SparseMatrix& group1_matrix() const { return a_g1_; }
  const SparseMatrix& group2_matrix() const { return a_g2_; }
  const std::vector<double>& lumped() const { return lumped_; }
  const SchwarzSweep& as1() const { return *as1_; }
  int group1_size() const { return g1_size_; }
  int solid_velocity_size() const { return n_us_; }
  int n_fluid_blocks() const { return static_cast<int>(as2_fluid_.size()); }
  const IndexSet& fluid_block_dofs(int i) const { return as2_fluid_[i].dofs; }

 private:
  int n_ = 0;
  int g1_size_ = 0, g2_size_ = 0;
  int n_us_ = 0;  // leading solid-velocity range of group 2
  SparseMatrix a_g1_, a_g2_;
  SparseCsc csc_g2_;
  std::unique_ptr<SchwarzSweep> as1_;
  std::vector<double> lumped_;
  struct FluidBlock {
    IndexSet dofs;  // group-2 local positions
    DenseFactorization lu;
  };
  std::vector<FluidBlock> as2_fluid_;
};

// x <- x + omega * M (b - A x), repeated `sweeps` times.
void richardson_smooth(const SparseMatrix& a, const LinearOperator& m, std::vector<double>& x,
                       const std::vector<double>& b, double omega, int sweeps);

}  // namespace fsi
