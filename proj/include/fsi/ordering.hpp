// SPDX-License-Identifier: Apache-2.0
//
// Row/column orderings of the monolithic system and the block index sets
// the smoothers are built from. The assembled matrix pairs each equation
// with a variable slot (kinematics <-> d, momentum <-> u, continuity
// <-> p); J1 swaps the solid kinematic and momentum rows so the elliptic
// solid-momentum block and the velocity mass block sit on the diagonal,
// and J2 additionally cycles the (u^s, u^f, p^s) rows/columns so the
// system splits into the [d, p^s] and [u, p^f] field groups.

#pragma once

#include <array>
#include <vector>

#include "fsi/sparse.hpp"
#include "fsi/spaces.hpp"

namespace fsi {

enum class OrderingKind { J, J1, J2 };

struct OrderingPlan {
  OrderingKind kind = OrderingKind::J;
  int n = 0;
  std::vector<int> row_from;  // frame row i holds natural row row_from[i]
  std::vector<int> col_to;    // natural col j sits at frame position col_to[j]
  std::vector<int> row_to;    // inverse of row_from
  std::vector<int> col_from;  // inverse of col_to
  std::array<int, 7> block_offsets{};   // frame variable-block offsets
  std::array<Field, 6> col_fields{};    // frame order of the variable blocks

  SparseMatrix apply(const SparseMatrix& a) const;
  std::vector<double> permute_rows(const std::vector<double>& r) const;
  std::vector<double> unpermute_cols(const std::vector<double>& y) const;
  // natural dof id -> frame position
  int frame_of(int dof) const { return col_to[dof]; }
};

struct Orderings {
  OrderingPlan j, j1, j2;
};

Orderings build_orderings(const FieldLayout& layout);

struct VankaBlock {
  IndexSet dofs;                   // natural variable ids
  std::vector<int> seed_elements;  // disjoint between blocks of one region
  bool solid = false;
};

// Vanka blocks: each region's elements are chunked into patches of
// elems_per_block seeds; a block takes the patch pressures plus every
// displacement/velocity dof whose shape support touches the patch (its
// nodes), restricted to the region's own field sets. Solid blocks come
// first, in seed order.
std::vector<VankaBlock> build_vanka_blocks(const Space& space, int elems_per_block);

struct FieldSplitSets {
  IndexSet group1;  // d^s, d^f, p^s
  IndexSet group2;  // u^s, u^f, p^f
};

FieldSplitSets build_fieldsplit_sets(const FieldLayout& layout);

}  // namespace fsi
