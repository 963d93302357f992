// SPDX-License-Identifier: Apache-2.0

#include "fsi/ordering.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace fsi {

SparseMatrix OrderingPlan::apply(const SparseMatrix& a) const {
  return a.permuted(row_from, col_to);
}

std::vector<double> OrderingPlan::permute_rows(const std::vector<double>& r) const {
  std::vector<double> out(r.size());
  for (int i = 0; i < n; ++i) out[i] = r[row_from[i]];
  return out;
}

std::vector<double> OrderingPlan::unpermute_cols(const std::vector<double>& y) const {
  std::vector<double> out(y.size());
  for (int j = 0; j < n; ++j) out[j] = y[col_to[j]];
  return out;
}

namespace {

OrderingPlan make_plan(const FieldLayout& fl, OrderingKind kind,
                       const std::array<Field, 6>& row_fields,
                       const std::array<Field, 6>& col_fields) {
  OrderingPlan plan;
  plan.kind = kind;
  plan.n = fl.n_dofs;
  plan.col_fields = col_fields;
  plan.row_from.reserve(fl.n_dofs);
  // rows: the natural slot ranges of the listed fields, concatenated.
  for (Field f : row_fields) {
    const int b = fl.field_offset(f);
    for (int i = 0; i < fl.field_size(f); ++i) plan.row_from.push_back(b + i);
  }
  plan.col_to.assign(fl.n_dofs, -1);
  int pos = 0;
  plan.block_offsets[0] = 0;
  for (int k = 0; k < 6; ++k) {
    const Field f = col_fields[k];
    const int b = fl.field_offset(f);
    for (int i = 0; i < fl.field_size(f); ++i) plan.col_to[b + i] = pos++;
    plan.block_offsets[k + 1] = pos;
  }
  plan.row_to.assign(fl.n_dofs, -1);
  plan.col_from.assign(fl.n_dofs, -1);
  for (int i = 0; i < fl.n_dofs; ++i) plan.row_to[plan.row_from[i]] = i;
  for (int j = 0; j < fl.n_dofs; ++j) plan.col_from[plan.col_to[j]] = j;
  return plan;
}

}  // namespace

Orderings build_orderings(const FieldLayout& fl) {
  Orderings out;
  // equations live in the slots of their paired variable:
  //   K -> d^s, A -> d^f, S -> u^s, F -> u^f, V -> p^s, W -> p^f
  const std::array<Field, 6> vars = {Field::Ds, Field::Df, Field::Us,
                                     Field::Uf, Field::Ps, Field::Pf};
  out.j = make_plan(fl, OrderingKind::J, vars, vars);
  // J1: swap the first and third equation rows (K <-> S)
  out.j1 = make_plan(fl, OrderingKind::J1,
                     {Field::Us, Field::Df, Field::Ds, Field::Uf, Field::Ps, Field::Pf}, vars);
  // J2: from J1, rows (3,4,5) -> (4,5,3) and the same cycle on columns
  out.j2 = make_plan(fl, OrderingKind::J2,
                     {Field::Us, Field::Df, Field::Ps, Field::Ds, Field::Uf, Field::Pf},
                     {Field::Ds, Field::Df, Field::Ps, Field::Us, Field::Uf, Field::Pf});
  return out;
}

std::vector<VankaBlock> build_vanka_blocks(const Space& space, int elems_per_block) {
  if (elems_per_block < 1) throw std::invalid_argument("vanka: elems_per_block must be >= 1");
  const FieldLayout& fl = space.layout;
  const Mesh& mesh = *space.mesh;

  std::vector<VankaBlock> blocks;
  for (int pass = 0; pass < 2; ++pass) {
    const bool want_solid = (pass == 0);
    std::vector<int> region_elems;
    for (int e = 0; e < mesh.n_elements(); ++e)
      if (static_cast<bool>(fl.elem_solid[e]) == want_solid) region_elems.push_back(e);

    for (std::size_t start = 0; start < region_elems.size(); start += elems_per_block) {
      VankaBlock blk;
      blk.solid = want_solid;
      std::vector<int> dofs;
      const std::size_t stop = std::min(start + elems_per_block, region_elems.size());
      for (std::size_t k = start; k < stop; ++k) {
        const int e = region_elems[k];
        blk.seed_elements.push_back(e);
        for (int m = 0; m < 3; ++m) dofs.push_back(fl.p_dof(e, m));
        for (int a = 0; a < 9; ++a) {
          const int node = space.dofmap.element_nodes[e][a];
          // blocks stay within their own region's field sets
          if (static_cast<bool>(fl.node_solid[node]) != want_solid) continue;
          for (int i = 0; i < 2; ++i) {
            dofs.push_back(fl.d_dof(node, i));
            dofs.push_back(fl.u_dof(node, i));
          }
        }
      }
      blk.dofs = make_index_set(std::move(dofs),
                                (want_solid ? "vanka-solid-" : "vanka-fluid-") +
                                    std::to_string(blocks.size()));
      blocks.push_back(std::move(blk));
    }
  }
  return blocks;
}

FieldSplitSets build_fieldsplit_sets(const FieldLayout& fl) {
  FieldSplitSets out;
  std::vector<int> g1, g2;
  for (Field f : {Field::Ds, Field::Df, Field::Ps}) {
    const int b = fl.field_offset(f);
    for (int i = 0; i < fl.field_size(f); ++i) g1.push_back(b + i);
  }
  for (Field f : {Field::Us, Field::Uf, Field::Pf}) {
    const int b = fl.field_offset(f);
    for (int i = 0; i < fl.field_size(f); ++i) g2.push_back(b + i);
  }
  out.group1 = make_index_set(std::move(g1), "group-d-ps");
  out.group2 = make_index_set(std::move(g2), "group-u-pf");
  return out;
}

}  // namespace fsi
