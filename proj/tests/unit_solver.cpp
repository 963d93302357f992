// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fsi/assembly.hpp"
#include "fsi/driver.hpp"
#include "fsi/errors.hpp"
#include "fsi/gmg.hpp"
#include "fsi/ordering.hpp"
#include "fsi/precond.hpp"
#include "fsi/sparse_lu.hpp"

using namespace fsi;

namespace {

std::mt19937_64 rng(1357ull);

double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> random_vector(int n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = uniform(lo, hi);
  return v;
}

std::vector<BoundaryCondition> channel_pulse_bcs(double amplitude) {
  BoundaryCondition inlet;
  inlet.group = "inlet";
  inlet.kind = BcKind::NormalStress;
  inlet.stress_amplitude = amplitude;
  BoundaryCondition outlet = inlet;
  outlet.group = "outlet";
  outlet.stress_amplitude = -amplitude;
  BoundaryCondition cin;
  cin.group = "clamp_in";
  cin.kind = BcKind::DisplacementDirichlet;
  BoundaryCondition cout = cin;
  cout.group = "clamp_out";
  return {inlet, outlet, cin, cout};
}

GeometryCase small_channel_geo() {
  GeometryCase geo;
  geo.name = "channel";
  geo.nx = 4;
  geo.ny_fluid = 2;
  geo.ny_wall = 1;
  return geo;
}

LevelStack make_stack(int levels, double amplitude = 15.0) {
  return build_level_stack(small_channel_geo(), MaterialParams{}, KFunction{},
                           channel_pulse_bcs(amplitude), TimeScheme{1.0 / 32.0}, levels);
}

// Millimeter-unit channel with order-one material constants: the same
// block structure as the physical case but with benign entry scales, so
// elimination oracles can be compared entrywise.
MaterialParams scaled_material() {
  MaterialParams m;
  m.rho_s = 1.12;
  m.rho_f = 1.035;
  m.mu = 3.5e-3;
  m.young = 1.0;
  m.poisson = 0.5;
  return m;
}

LevelStack scaled_stack(int levels, double amplitude = 1.0) {
  GeometryCase geo = small_channel_geo();
  geo.length = 10.0;
  geo.lumen_height = 2.0;
  geo.wall_thickness = 0.25;
  return build_level_stack(geo, scaled_material(), KFunction{}, channel_pulse_bcs(amplitude),
                           TimeScheme{1.0 / 32.0}, levels);
}

// Jacobian of the first implicit step at the lifted rest state, optionally
// with the Dirichlet rows applied.
SparseMatrix step_one_jacobian(LevelStack& st, int level, bool with_dirichlet = true,
                               double t = 1.0 / 32.0, ConstraintMasks* constrained = nullptr) {
  auto x_old = rest_state(st.spaces[level], st.problems[level].material);
  auto x = x_old;
  auto cs = build_constraints(st.problems[level], t);
  lift_constraints(cs, x);
  auto stab = compute_stabilization(st.problems[level], x_old);
  st.assemblers[level]->assemble(x, x_old, x_old, stab, t, true);
  SparseMatrix jac = st.assemblers[level]->jacobian();
  if (with_dirichlet) {
    std::vector<double> res = st.assemblers[level]->residual();
    apply_dirichlet(jac, res, cs, x);
  }
  if (constrained) {
    constrained->rows.assign(st.spaces[level].layout.n_dofs, 0);
    constrained->dofs.assign(st.spaces[level].layout.n_dofs, 0);
    for (const auto& c : cs) {
      constrained->rows[c.row] = 1;
      constrained->dofs[c.dof] = 1;
    }
  }
  return jac;
}

double norm_inf(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

DenseMatrix to_dense(const SparseMatrix& a) {
  DenseMatrix d(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k)
      d(i, a.col_indices()[k]) += a.values()[k];
  return d;
}

// Test-local dense solve (Gauss elimination with partial pivoting),
// independent of the library factorizations.
std::vector<double> naive_dense_solve(DenseMatrix a, std::vector<double> b) {
  const int n = a.n;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) b[i] -= a(i, j) * b[j];
    b[i] /= a(i, i);
  }
  return b;
}

// Naive transliteration of the locally multiplicative block update: every
// block solves against a fully recomputed residual.
std::vector<double> naive_multiplicative(const SparseMatrix& a, const std::vector<IndexSet>& sets,
                                         const std::vector<double>& r) {
  std::vector<double> y(a.rows(), 0.0);
  for (const auto& set : sets) {
    auto ay = a.multiply(y);
    std::vector<double> rhs(set.size());
    DenseMatrix blk(set.size(), set.size());
    auto sub = extract_submatrix(a, set, set);
    blk = to_dense(sub);
    for (int i = 0; i < set.size(); ++i) rhs[i] = r[set.indices[i]] - ay[set.indices[i]];
    auto delta = naive_dense_solve(blk, rhs);
    for (int i = 0; i < set.size(); ++i) y[set.indices[i]] += delta[i];
  }
  return y;
}

}  // namespace

TEST_CASE("orderings: composition, inverses, stable diagonal") {
  auto st = make_stack(1);
  const auto& fl = st.spaces[0].layout;
  const auto& ords = st.orderings[0];

  // J1 swaps the K and S row blocks of J
  for (int i = 0; i < fl.n_dofs; ++i) {
    int expect;
    if (i < fl.field_offset(Field::Df)) {
      expect = fl.field_offset(Field::Us) + i;  // S rows first
    } else if (i >= fl.field_offset(Field::Us) && i < fl.field_offset(Field::Uf)) {
      expect = i - fl.field_offset(Field::Us);  // K rows third
    } else {
      expect = i;
    }
    CHECK(ords.j1.row_from[i] == expect);
  }

  // J2 = J1 with rows/cols (3,4,5) -> (4,5,3)
  auto cycled = [&](const std::vector<int>& from_j1) {
    // block sizes in J1 frame order
    const int b1 = fl.field_size(Field::Ds), b2 = fl.field_size(Field::Df),
              b3 = fl.field_size(Field::Us), b4 = fl.field_size(Field::Uf),
              b5 = fl.field_size(Field::Ps);
    std::vector<int> out;
    out.reserve(from_j1.size());
    auto copy_range = [&](int begin, int len) {
      for (int i = 0; i < len; ++i) out.push_back(from_j1[begin + i]);
    };
    copy_range(0, b1);
    copy_range(b1, b2);
    copy_range(b1 + b2 + b3 + b4, b5);  // block 5 -> position 3
    copy_range(b1 + b2, b3);            // block 3 -> position 4
    copy_range(b1 + b2 + b3, b4);       // block 4 -> position 5
    for (std::size_t i = out.size(); i < from_j1.size(); ++i) out.push_back(from_j1[i]);
    return out;
  };
  CHECK(ords.j2.row_from == cycled(ords.j1.row_from));
  // column placements compose the same way
  std::vector<int> j1_cols(fl.n_dofs), j2_cols_expect;
  for (int j = 0; j < fl.n_dofs; ++j) j1_cols[j] = ords.j1.col_from[j];
  j2_cols_expect = cycled(j1_cols);
  for (int j = 0; j < fl.n_dofs; ++j) CHECK(ords.j2.col_from[j] == j2_cols_expect[j]);

  // applying a plan then its inverse is the identity
  auto v = random_vector(fl.n_dofs);
  auto pv = ords.j2.permute_rows(v);
  std::vector<double> back(v.size());
  for (int i = 0; i < fl.n_dofs; ++i) back[ords.j2.row_from[i]] = pv[i];
  CHECK(back == v);
  auto uv = ords.j2.unpermute_cols(v);
  std::vector<double> again(v.size());
  for (int j = 0; j < fl.n_dofs; ++j) again[ords.j2.col_to[j]] = uv[j];
  CHECK(again == v);

  // the J1-permuted assembled matrix has a nonzero diagonal on the d^s
  // rows (the elliptic solid momentum block lands there)
  auto st2 = make_stack(1);
  auto jac = step_one_jacobian(st2, 0, /*with_dirichlet=*/false);
  auto a1 = st2.orderings[0].j1.apply(jac);
  for (int i = 0; i < fl.field_size(Field::Ds); ++i) CHECK(a1.entry(i, i) != 0.0);
}

TEST_CASE("vanka blocks: content oracle, covering, determinism") {
  // 2x2 all-fluid mesh, one element per block
  GeometryCase geo;
  geo.name = "unit_square";
  geo.unit_n = 2;
  Mesh mesh = build_case(geo);
  Space sp = build_layout(mesh);
  auto blocks = build_vanka_blocks(sp, 1);
  REQUIRE(blocks.size() == 4);
  for (int b = 0; b < 4; ++b) {
    CHECK_FALSE(blocks[b].solid);
    CHECK(blocks[b].seed_elements == std::vector<int>{b});
    // support-intersection oracle: the element's three pressures plus d,u
    // of every node whose basis support meets the element
    std::vector<int> expect;
    for (int m = 0; m < 3; ++m) expect.push_back(sp.layout.p_dof(b, m));
    for (int n = 0; n < sp.layout.n_q2_nodes; ++n) {
      bool touches = false;
      for (int a = 0; a < 9; ++a) touches = touches || (sp.dofmap.element_nodes[b][a] == n);
      if (touches) {
        for (int i = 0; i < 2; ++i) {
          expect.push_back(sp.layout.d_dof(n, i));
          expect.push_back(sp.layout.u_dof(n, i));
        }
      }
    }
    auto es = make_index_set(expect, "oracle");
    CHECK(blocks[b].dofs.indices == es.indices);
    CHECK(blocks[b].dofs.size() == 3 + 9 * 4);
  }
  // union covers all dofs of the region
  std::vector<char> hit(sp.layout.n_dofs, 0);
  for (const auto& b : blocks)
    for (int i : b.dofs.indices) hit[i] = 1;
  for (char h : hit) CHECK(h == 1);

  // single solid element: one block with all dofs
  Mesh solo = build_case(GeometryCase{.name = "unit_square", .unit_n = 1});
  solo.element_region[0] = Region::Solid;
  Space sps = build_layout(solo);
  auto bsolo = build_vanka_blocks(sps, 4);
  REQUIRE(bsolo.size() == 1);
  CHECK(bsolo[0].solid);
  CHECK(bsolo[0].dofs.size() == sps.layout.n_dofs);

  // determinism
  auto again = build_vanka_blocks(sp, 1);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    CHECK(again[b].dofs.indices == blocks[b].dofs.indices);
}

TEST_CASE("field split sets") {
  auto st = make_stack(1);
  const auto& fl = st.spaces[0].layout;
  auto fs = build_fieldsplit_sets(fl);
  CHECK(fs.group1.size() + fs.group2.size() == fl.n_dofs);
  CHECK(fs.group1.contains(fl.field_offset(Field::Ps)));
  CHECK(fs.group2.contains(fl.field_offset(Field::Pf)));
  CHECK_FALSE(fs.group1.contains(fl.field_offset(Field::Pf)));

  // solid-only mesh: group2 = u^s only
  Mesh solo = build_case(GeometryCase{.name = "unit_square", .unit_n = 1});
  solo.element_region[0] = Region::Solid;
  Space sps = build_layout(solo);
  auto fss = build_fieldsplit_sets(sps.layout);
  CHECK(fss.group2.size() == sps.layout.field_size(Field::Us));
}

TEST_CASE("schwarz sweeps: exactness, gauss-seidel oracle, linearity") {
  // one block covering the whole system is an exact solve
  const int n = 12;
  std::vector<Triplet> ts;
  for (int i = 0; i < n; ++i) {
    ts.push_back({i, i, 5.0 + uniform(0, 1)});
    ts.push_back({i, (i + 3) % n, uniform(-1, 1)});
    ts.push_back({i, (i + 7) % n, uniform(-1, 1)});
  }
  auto a = SparseMatrix::from_triplets(n, n, ts);
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  SchwarzSweep whole(a, {IndexSet{all, "all"}}, SchwarzMode::Multiplicative);
  auto r = random_vector(n);
  std::vector<double> z(n);
  whole.apply(r.data(), z.data());
  auto az = a.multiply(z);
  for (int i = 0; i < n; ++i) CHECK(az[i] == doctest::Approx(r[i]).epsilon(1e-11));

  // additive on a block-diagonal matrix with matching blocks is exact
  {
    std::vector<Triplet> bd;
    for (int blk = 0; blk < 3; ++blk)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          bd.push_back({4 * blk + i, 4 * blk + j, (i == j ? 6.0 : uniform(-1, 1))});
    auto abd = SparseMatrix::from_triplets(12, 12, bd);
    std::vector<IndexSet> sets;
    for (int blk = 0; blk < 3; ++blk) {
      std::vector<int> idx = {4 * blk, 4 * blk + 1, 4 * blk + 2, 4 * blk + 3};
      sets.push_back(IndexSet{idx, "b" + std::to_string(blk)});
    }
    SchwarzSweep add(abd, sets, SchwarzMode::Additive);
    auto rb = random_vector(12);
    std::vector<double> zb(12);
    add.apply(rb.data(), zb.data());
    auto azb = abd.multiply(zb);
    for (int i = 0; i < 12; ++i) CHECK(azb[i] == doctest::Approx(rb[i]).epsilon(1e-12));

    // multiplicative equals additive for disjoint covering blocks on a
    // block-diagonal matrix
    SchwarzSweep mult(abd, sets, SchwarzMode::Multiplicative);
    std::vector<double> zm(12);
    mult.apply(rb.data(), zm.data());
    for (int i = 0; i < 12; ++i) CHECK(zm[i] == doctest::Approx(zb[i]).epsilon(1e-13));
  }

  // multiplicative 2-block iterate equals the hand-computed block
  // Gauss-Seidel step on a 2x2-coupled system
  {
    auto m = SparseMatrix::from_triplets(
        2, 2, {{0, 0, 4.0}, {0, 1, 1.0}, {1, 0, 2.0}, {1, 1, 5.0}});
    SchwarzSweep gs(m, {IndexSet{{0}, "first"}, IndexSet{{1}, "second"}},
                    SchwarzMode::Multiplicative);
    const double r0 = 3.0, r1 = -1.0;
    const double z0 = r0 / 4.0;             // first block solve
    const double z1 = (r1 - 2.0 * z0) / 5.0;  // second sees the updated residual
    double rr[2] = {r0, r1}, zz[2];
    gs.apply(rr, zz);
    CHECK(zz[0] == doctest::Approx(z0).epsilon(1e-15));
    CHECK(zz[1] == doctest::Approx(z1).epsilon(1e-15));
  }

  // additive application is linear
  {
    std::vector<IndexSet> sets;
    for (int b = 0; b < 3; ++b) {
      std::vector<int> idx;
      for (int i = 0; i < 6; ++i) idx.push_back((4 * b + i) % n);
      sets.push_back(make_index_set(idx, "ov" + std::to_string(b)));
    }
    SchwarzSweep add(a, sets, SchwarzMode::Additive);
    auto r1v = random_vector(n), r2v = random_vector(n);
    std::vector<double> z1(n), z2(n), z12(n), rsum(n);
    add.apply(r1v.data(), z1.data());
    add.apply(r2v.data(), z2.data());
    for (int i = 0; i < n; ++i) rsum[i] = r1v[i] + r2v[i];
    add.apply(rsum.data(), z12.data());
    for (int i = 0; i < n; ++i)
      CHECK(z12[i] == doctest::Approx(z1[i] + z2[i]).epsilon(1e-12));
  }
}

TEST_CASE("as preconditioner: naive reference, decoupling, single-block exactness") {
  auto st = scaled_stack(1);
  const auto& plan = st.orderings[0].j1;
  auto jac = step_one_jacobian(st, 0);
  auto a1 = plan.apply(jac);

  // frame index sets, same construction the preconditioner uses
  std::vector<IndexSet> frame_sets;
  for (const auto& blk : st.vanka_blocks[0]) {
    std::vector<int> pos(blk.dofs.indices.size());
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = plan.frame_of(blk.dofs.indices[i]);
    frame_sets.push_back(make_index_set(pos, blk.dofs.label));
  }

  AsPreconditioner as(a1, plan, st.vanka_blocks[0]);
  auto r = random_vector(a1.rows());
  std::vector<double> z(a1.rows());
  as.apply(r.data(), z.data());
  auto want = naive_multiplicative(a1, frame_sets, r);
  std::vector<double> diff(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) diff[i] = z[i] - want[i];
  CHECK(norm_inf(diff) <= 1e-12 * norm_inf(want));

  // a fluid-supported residual on a decoupled matrix leaves solid dofs
  // untouched
  const auto& fl = st.spaces[0].layout;
  auto is_solid_field = [&](int dof) {
    return (dof < fl.field_offset(Field::Df)) ||
           (dof >= fl.field_offset(Field::Us) && dof < fl.field_offset(Field::Uf)) ||
           (dof >= fl.field_offset(Field::Ps) && dof < fl.field_offset(Field::Pf));
  };
  SparseMatrix decoupled = jac;
  {
    // zero all solid/fluid coupling entries (frame = natural columns here)
    auto& vals = decoupled.values();
    for (int i = 0; i < decoupled.rows(); ++i) {
      for (int k = decoupled.row_offsets()[i]; k < decoupled.row_offsets()[i + 1]; ++k) {
        const int j = decoupled.col_indices()[k];
        if (is_solid_field(i) != is_solid_field(j)) vals[k] = 0.0;
      }
    }
    // keep it solvable: bump diagonals of zeroed rows
    for (int i = 0; i < decoupled.rows(); ++i) {
      double mx = 0;
      for (int k = decoupled.row_offsets()[i]; k < decoupled.row_offsets()[i + 1]; ++k)
        mx = std::max(mx, std::abs(decoupled.values()[k]));
      if (mx == 0.0) {
        for (int k = decoupled.row_offsets()[i]; k < decoupled.row_offsets()[i + 1]; ++k)
          if (decoupled.col_indices()[k] == i) decoupled.values()[k] = 1.0;
      }
    }
  }
  auto a1d = plan.apply(decoupled);
  AsPreconditioner asd(a1d, plan, st.vanka_blocks[0]);
  std::vector<double> rf(a1d.rows(), 0.0);
  for (int i = 0; i < a1d.rows(); ++i) {
    // fluid-field frame positions carry the residual
    if (!is_solid_field(i)) rf[plan.frame_of(i)] = uniform(-1, 1);
  }
  std::vector<double> zf(a1d.rows());
  asd.apply(rf.data(), zf.data());
  for (int i = 0; i < a1d.rows(); ++i) {
    if (is_solid_field(i)) CHECK(zf[plan.frame_of(i)] == 0.0);
  }

  // single solid element: the sweep solves its saddle block exactly
  Mesh solo = build_case(GeometryCase{.name = "unit_square", .unit_n = 1});
  solo.element_region[0] = Region::Solid;
  LevelStack sst;
  sst.hier.levels.push_back(solo);
  sst.spaces.push_back(build_layout(sst.hier.levels[0]));
  FsiProblem prob;
  prob.space = &sst.spaces[0];
  prob.material = scaled_material();
  prob.scheme.dt = 1.0 / 32.0;
  BoundaryCondition clamp;
  clamp.group = "bottom";
  clamp.kind = BcKind::DisplacementDirichlet;
  prob.bcs = {clamp};
  sst.problems.push_back(prob);
  sst.assemblers.push_back(std::make_unique<Assembler>(sst.problems[0]));
  sst.orderings.push_back(build_orderings(sst.spaces[0].layout));
  sst.vanka_blocks.push_back(build_vanka_blocks(sst.spaces[0], 4));
  ConstraintMasks scon;
  auto sj = step_one_jacobian(sst, 0, true, 1.0 / 32.0, &scon);
  auto sa1 = sst.orderings[0].j1.apply(sj);
  const auto& splan = sst.orderings[0].j1;
  AsPreconditioner asolo(sa1, splan, sst.vanka_blocks[0], &scon);
  auto rs = random_vector(sa1.rows());
  std::vector<double> zs(sa1.rows());
  asolo.apply(rs.data(), zs.data());
  // exact on every position that kept its equation/variable pairing
  auto azs = sa1.multiply(zs);
  double worst = 0, scale = norm_inf(rs);
  const auto dropped = constrained_positions(splan, scon);
  for (int p = 0; p < sa1.rows(); ++p) {
    if (dropped[p]) continue;
    worst = std::max(worst, std::abs(azs[p] - rs[p]));
  }
  CHECK(worst <= 1e-10 * scale);
}

TEST_CASE("fs preconditioner: group locality, naive reference, lumped mass") {
  auto st = scaled_stack(1);
  const auto& plan = st.orderings[0].j2;
  const auto& fl = st.spaces[0].layout;
  ConstraintMasks con;
  auto jac = step_one_jacobian(st, 0, true, 1.0 / 32.0, &con);
  auto a2 = plan.apply(jac);
  FieldSplitPlan fsplan;
  FsPreconditioner fs(a2, plan, st.spaces[0], fsplan, &con);

  const int n = a2.rows();
  const int g1 = fs.group1_size();

  // residual confined to group 1 yields zero corrections on group 2, and
  // the group-1 answer ignores group-2 residual content entirely
  auto r_full = random_vector(n);
  std::vector<double> r_g1only = r_full;
  for (int i = g1; i < n; ++i) r_g1only[i] = 0.0;
  std::vector<double> z_full(n), z_g1(n);
  fs.apply(r_full.data(), z_full.data());
  fs.apply(r_g1only.data(), z_g1.data());
  for (int i = g1; i < n; ++i) CHECK(z_g1[i] == 0.0);
  for (int i = 0; i < g1; ++i) CHECK(z_full[i] == z_g1[i]);

  // naive reference: group-1 sweep plus (jacobi, fluid blocks) on group 2
  {
    std::vector<IndexSet> as1_sets;
    for (int b = 0; b < fs.as1().n_blocks(); ++b) as1_sets.push_back(fs.as1().block_dofs(b));
    auto zg1 = naive_multiplicative(fs.group1_matrix(), as1_sets,
                                    std::vector<double>(r_full.begin(), r_full.begin() + g1));

    const auto& ag2 = fs.group2_matrix();
    std::vector<double> y(ag2.rows(), 0.0);
    for (int i = 0; i < fs.solid_velocity_size(); ++i)
      y[i] = r_full[g1 + i] / fs.lumped()[i];
    for (int b = 0; b < fs.n_fluid_blocks(); ++b) {
      const auto& set = fs.fluid_block_dofs(b);
      auto ay = ag2.multiply(y);
      std::vector<double> rhs(set.size());
      for (int i = 0; i < set.size(); ++i)
        rhs[i] = r_full[g1 + set.indices[i]] - ay[set.indices[i]];
      auto delta = naive_dense_solve(to_dense(extract_submatrix(ag2, set, set)), rhs);
      for (int i = 0; i < set.size(); ++i) y[set.indices[i]] += delta[i];
    }
    std::vector<double> want(n);
    for (int i = 0; i < g1; ++i) want[i] = zg1[i];
    for (int i = g1; i < n; ++i) want[i] = y[i - g1];
    std::vector<double> diff(n);
    for (int i = 0; i < n; ++i) diff[i] = z_full[i] - want[i];
    // two independent eliminations agree up to block conditioning
    CHECK(norm_inf(diff) <= 5e-11 * norm_inf(want));
  }

  // lumped mass of the raw solid-velocity mass block: entries are positive,
  // their total is rho * solid area per component, shared entries double,
  // and the block scales linearly in rho
  {
    auto raw = step_one_jacobian(st, 0, /*with_dirichlet=*/false);
    auto ks = extract_submatrix(raw, fl.field_set(Field::Ds), fl.field_set(Field::Us));
    auto lm = lumped_mass(ks);
    double total = 0;
    for (double v : lm) {
      CHECK(v > 0);
      total += v;
    }
    double solid_area = 0;
    for (int e = 0; e < st.spaces[0].mesh->n_elements(); ++e)
      if (region_is_solid(st.spaces[0].mesh->element_region[e]))
        solid_area += element_volume(*st.spaces[0].mesh, e);
    CHECK(total == doctest::Approx(2.0 * st.problems[0].material.rho_s * solid_area).epsilon(1e-10));
  }
}

TEST_CASE("lumped mass: shared-node additivity and rho linearity") {
  auto build_k = [&](int nx, double rho) {
    GeometryCase geo;
    geo.name = "unit_square";
    geo.unit_n = 1;
    Mesh mesh = build_case(geo);
    if (nx == 2) {
      // 1x2 strip of unit quads
      mesh.nodes = {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}};
      mesh.elements = {{0, 1, 4, 3}, {1, 2, 5, 4}};
      mesh.element_region = {Region::Solid, Region::Solid};
      mesh.boundary_faces.clear();
      mesh.group_names = {"none"};
    } else {
      mesh.element_region[0] = Region::Solid;
    }
    LevelStack st;
    st.hier.levels.push_back(mesh);
    st.spaces.push_back(build_layout(st.hier.levels[0]));
    FsiProblem prob;
    prob.space = &st.spaces[0];
    prob.material.rho_s = rho;
    prob.scheme.dt = 0.5;
    st.problems.push_back(prob);
    Assembler asem(st.problems[0]);
    auto x = rest_state(st.spaces[0], prob.material);
    StabilizationState stab;
    stab.elements.resize(mesh.n_elements());
    asem.assemble(x, x, x, stab, 0.0, true);
    const auto& fl = st.spaces[0].layout;
    auto k = extract_submatrix(asem.jacobian(), fl.field_set(Field::Ds), fl.field_set(Field::Us));
    auto lm = lumped_mass(k);
    // return entry of the x-component at the midside node of the edge
    // between the two elements (or the right edge of the single quad)
    int node = -1;
    for (int q = 0; q < fl.n_q2_nodes; ++q) {
      const auto& c = st.spaces[0].dofmap.q2_coords[q];
      if (std::abs(c[0] - 1.0) < 1e-12 && std::abs(c[1] - 0.5) < 1e-12) node = q;
    }
    REQUIRE(node >= 0);
    const int dof = fl.u_dof(node, 0) - fl.field_offset(Field::Us);
    return lm[dof];
  };
  const double single = build_k(1, 1120.0);
  const double shared = build_k(2, 1120.0);
  CHECK(shared == doctest::Approx(2.0 * single).epsilon(1e-12));
  CHECK(build_k(1, 2240.0) == doctest::Approx(2.0 * single).epsilon(1e-12));
}

TEST_CASE("richardson smoothing") {
  const int n = 6;
  std::vector<Triplet> ts;
  for (int i = 0; i < n; ++i) {
    ts.push_back({i, i, 4.0});
    if (i > 0) ts.push_back({i, i - 1, -1.0});
    if (i < n - 1) ts.push_back({i, i + 1, -1.0});
  }
  auto a = SparseMatrix::from_triplets(n, n, ts);
  auto b = random_vector(n);

  // exact preconditioner, omega 1: one sweep solves
  SparseLu lu(a);
  FunctionOperator exact(n, [&](const double* r, double* z) { lu.solve(r, z); });
  std::vector<double> x(n, 0.0);
  richardson_smooth(a, exact, x, b, 1.0, 1);
  auto ax = a.multiply(x);
  for (int i = 0; i < n; ++i) CHECK(ax[i] == doctest::Approx(b[i]).epsilon(1e-12));

  // omega 0 leaves the iterate unchanged
  auto x0 = random_vector(n);
  auto x1 = x0;
  richardson_smooth(a, exact, x1, b, 0.0, 3);
  CHECK(x1 == x0);

  // one damped-Jacobi sweep against the hand iterate
  auto a2 = SparseMatrix::from_triplets(2, 2, {{0, 0, 4.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}});
  FunctionOperator jacobi(2, [&](const double* r, double* z) {
    z[0] = r[0] / 4.0;
    z[1] = r[1] / 3.0;
  });
  std::vector<double> xj = {1.0, -2.0};
  const std::vector<double> bj = {1.0, 2.0};
  // hand: r = b - A x = (1-4+2, 2-1+6) = (-1, 7); z = (-1/4, 7/3)
  richardson_smooth(a2, jacobi, xj, bj, 1.0, 1);
  CHECK(xj[0] == doctest::Approx(1.0 - 0.25).epsilon(1e-15));
  CHECK(xj[1] == doctest::Approx(-2.0 + 7.0 / 3.0).epsilon(1e-15));
}
