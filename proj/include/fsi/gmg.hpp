// SPDX-License-Identifier: Apache-2.0
//
// Geometric multigrid over the nested mesh hierarchy. Prolongation is the
// finite-element injection per field; restriction is assembled blockwise
// and is not the plain transpose of the prolongation: the solid-momentum
// restriction picks up the interface block (P_{d^f,d^s})^T from the fluid
// momentum residual, while the transpose of P_{u^f,u^s} appears nowhere
// (the solid kinematic equation receives no fluid contribution).

#pragma once

#include <memory>
#include <vector>

#include "fsi/krylov.hpp"
#include "fsi/mesh.hpp"
#include "fsi/ordering.hpp"
#include "fsi/sparse.hpp"
#include "fsi/sparse_lu.hpp"
#include "fsi/spaces.hpp"

namespace fsi {

// Scalar Q2 node injection between consecutive levels split by ownership:
// weights of coarse basis functions at fine node positions.
struct NodeInjection {
  std::vector<Triplet> ss;  // fine solid rank x coarse solid rank
  std::vector<Triplet> fs;  // fine fluid rank x coarse solid rank (interface coupling)
  std::vector<Triplet> ff;  // fine fluid rank x coarse fluid rank
  std::vector<Triplet> ps;  // fine solid pressure x coarse solid pressure (modal)
  std::vector<Triplet> pf;  // fluid pressure
};

NodeInjection build_node_injection(const MeshHierarchy& hier, int fine_level,
                                   const Space& coarse, const Space& fine);

struct TransferPair {
  SparseMatrix p;  // coarse -> fine, frame column ordering on both sides
  SparseMatrix r;  // fine -> coarse, frame row ordering on both sides
};

// Transfer matrices in the given ordering frame (same OrderingKind on
// both levels).
TransferPair build_transfer(const MeshHierarchy& hier, int fine_level, const Space& coarse,
                            const Space& fine, const OrderingPlan& plan_coarse,
                            const OrderingPlan& plan_fine);

// Injection of a fine state to the coarse level: coarse Q2 nodes coincide
// with fine nodes, coarse pressure modes are fitted from the four child
// center values.
std::vector<double> restrict_state(const MeshHierarchy& hier, int fine_level, const Space& coarse,
                                   const Space& fine, const std::vector<double>& x_fine);

struct CycleConfig {
  char cycle = 'v';  // v | f | w
  int pre = 1, post = 1;
  double omega = 0.7;
};

struct GmgLevel {
  const SparseMatrix* a = nullptr;          // frame matrix of this level
  const LinearOperator* smoother = nullptr; // AS or FS application
  SparseMatrix p, r;                        // transfers to/from the coarser level
  // Dirichlet masks; identity rows sit off the frame diagonal, so the
  // residual (row frame) and correction (column frame) masks differ.
  std::vector<std::uint8_t> constrained_rows;
  std::vector<std::uint8_t> constrained_cols;
};

// One multigrid cycle as a fixed linear operator: z = cycle(r) from a zero
// initial guess. Level 0 is solved directly.
class GmgPreconditioner final : public LinearOperator {
 public:
  GmgPreconditioner(std::vector<GmgLevel> levels, CycleConfig cfg);

  int size() const override;
  void apply(const double* r, double* z) const override;

  // x is improved in place toward A_l x = b (used by tests as a solver).
  void cycle(int level, char mode, const std::vector<double>& b, std::vector<double>& x) const;

 private:
  std::vector<GmgLevel> levels_;
  CycleConfig cfg_;
  std::unique_ptr<SparseLu> coarse_lu_;
};

}  // namespace fsi
