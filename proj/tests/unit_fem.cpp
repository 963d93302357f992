// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fsi/constitutive.hpp"
#include "fsi/dense.hpp"
#include "fsi/errors.hpp"
#include "fsi/mesh.hpp"
#include "fsi/spaces.hpp"
#include "fsi/supg.hpp"

using namespace fsi;

namespace {

std::mt19937_64 rng(777ull);

double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Mesh single_quad(const std::array<std::array<double, 2>, 4>& corners,
                 Region region = Region::Fluid) {
  Mesh m;
  m.nodes.assign(corners.begin(), corners.end());
  m.elements.push_back({0, 1, 2, 3});
  m.element_region.push_back(region);
  m.group_names = {"all"};
  for (int e = 0; e < 4; ++e) m.boundary_faces.push_back({0, e, 0});
  return m;
}

GeometryCase channel_case() {
  GeometryCase g;
  g.name = "channel";
  return g;
}

std::array<std::array<double, 2>, 9> element_coords(const Space& sp, int e) {
  std::array<std::array<double, 2>, 9> c;
  for (int a = 0; a < 9; ++a) c[a] = sp.dofmap.q2_coords[sp.dofmap.element_nodes[e][a]];
  return c;
}

}  // namespace

TEST_CASE("mesh: unit square, channel, bulge degeneracy") {
  GeometryCase us;
  us.name = "unit_square";
  us.unit_n = 3;
  auto m = build_case(us);
  CHECK(m.n_elements() == 9);
  CHECK(m.n_nodes() == 16);
  CHECK(m.group_names.size() == 4);
  for (auto r : m.element_region) CHECK(r == Region::Fluid);

  auto ch = build_case(channel_case());
  CHECK(ch.group_id("inlet") >= 0);
  CHECK(ch.group_id("outlet") >= 0);
  int fluid = 0, solid = 0;
  for (auto r : ch.element_region) (region_is_solid(r) ? solid : fluid)++;
  CHECK(fluid == 8 * 4);
  CHECK(solid == 8 * 2);
  for (int e = 0; e < ch.n_elements(); ++e) CHECK(element_volume(ch, e) > 0.0);

  GeometryCase bg = channel_case();
  bg.name = "bulge";
  bg.bulge_height = 0.0;
  auto flat = build_case(bg);
  REQUIRE(flat.n_nodes() == ch.n_nodes());
  for (int n = 0; n < ch.n_nodes(); ++n) {
    CHECK(flat.nodes[n][0] == ch.nodes[n][0]);
    CHECK(flat.nodes[n][1] == ch.nodes[n][1]);
  }

  bg.bulge_height = 0.0008;
  auto bulge = build_case(bg);
  CHECK(bulge.element_sets.at("cavity").size() > 0);
  for (int e = 0; e < bulge.n_elements(); ++e) CHECK(element_volume(bulge, e) > 0.0);

  GeometryCase bad = channel_case();
  bad.wall_thickness = bad.lumen_height;
  CHECK_THROWS_AS(build_case(bad), ConfigError);
}

TEST_CASE("mesh: refinement counts, tag inheritance, area preservation, node origins") {
  MeshHierarchy h;
  h.levels.push_back(single_quad({{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}));
  refine(h);
  CHECK(h.levels[1].n_elements() == 4);
  CHECK(h.levels[1].n_nodes() == 9);
  CHECK(h.levels[1].boundary_faces.size() == 8);

  auto hc = make_hierarchy(channel_case(), 3);
  CHECK(hc.levels[2].n_elements() == hc.levels[0].n_elements() * 16);

  // region counts multiply by exactly 4 per level
  for (int l = 0; l + 1 < hc.n_levels(); ++l) {
    int cf = 0, ff = 0;
    for (auto r : hc.levels[l].element_region)
      if (!region_is_solid(r)) ++cf;
    for (auto r : hc.levels[l + 1].element_region)
      if (!region_is_solid(r)) ++ff;
    CHECK(ff == 4 * cf);
    for (std::size_t e = 0; e < hc.parent_map[l].size(); ++e)
      CHECK(hc.levels[l + 1].element_region[e] == hc.levels[l].element_region[hc.parent_map[l][e]]);
  }

  // total region area preserved to 1e-12 relative
  for (int l = 0; l + 1 < hc.n_levels(); ++l) {
    double coarse_fluid = 0, fine_fluid = 0, coarse_solid = 0, fine_solid = 0;
    for (int e = 0; e < hc.levels[l].n_elements(); ++e)
      (region_is_solid(hc.levels[l].element_region[e]) ? coarse_solid : coarse_fluid) +=
          element_volume(hc.levels[l], e);
    for (int e = 0; e < hc.levels[l + 1].n_elements(); ++e)
      (region_is_solid(hc.levels[l + 1].element_region[e]) ? fine_solid : fine_fluid) +=
          element_volume(hc.levels[l + 1], e);
    CHECK(std::abs(fine_fluid - coarse_fluid) <= 1e-12 * coarse_fluid);
    CHECK(std::abs(fine_solid - coarse_solid) <= 1e-12 * coarse_solid);
  }

  // every fine node is a coarse node, an edge midpoint, or an element center
  for (int l = 0; l + 1 < hc.n_levels(); ++l) {
    const auto& coarse = hc.levels[l];
    const auto& fine = hc.levels[l + 1];
    const auto& origin = hc.node_origin[l];
    REQUIRE(origin.size() == fine.nodes.size());
    for (std::size_t n = 0; n < fine.nodes.size(); ++n) {
      const auto& o = origin[n];
      std::array<double, 2> want{};
      if (o.kind == NodeOrigin::Kind::Corner) {
        want = coarse.nodes[o.a];
      } else if (o.kind == NodeOrigin::Kind::EdgeMidpoint) {
        want = {0.5 * (coarse.nodes[o.a][0] + coarse.nodes[o.b][0]),
                0.5 * (coarse.nodes[o.a][1] + coarse.nodes[o.b][1])};
      } else {
        const auto& q = coarse.elements[o.a];
        want = {0.25 * (coarse.nodes[q[0]][0] + coarse.nodes[q[1]][0] + coarse.nodes[q[2]][0] +
                        coarse.nodes[q[3]][0]),
                0.25 * (coarse.nodes[q[0]][1] + coarse.nodes[q[1]][1] + coarse.nodes[q[2]][1] +
                        coarse.nodes[q[3]][1])};
      }
      CHECK(std::abs(fine.nodes[n][0] - want[0]) <= 1e-14);
      CHECK(std::abs(fine.nodes[n][1] - want[1]) <= 1e-14);
    }
  }
}

TEST_CASE("mesh: element volumes incl. shoelace oracle and inversion") {
  auto unit = single_quad({{{0, 0}, {1, 0}, {1, 1}, {0, 1}}});
  CHECK(element_volume(unit, 0) == doctest::Approx(1.0).epsilon(1e-14));

  auto rect = single_quad({{{0, 0}, {2, 0}, {2, 1}, {0, 1}}});
  CHECK(element_volume(rect, 0) == doctest::Approx(2.0).epsilon(1e-14));

  // bilinear trapezoid; shoelace oracle gives 1.5
  auto trap = single_quad({{{0, 0}, {2, 0}, {1.5, 1}, {0.5, 1}}});
  const double shoelace =
      0.5 * std::abs(0.0 * (0.0 - 1.0) + 2.0 * (1.0 - 0.0) + 1.5 * (1.0 - 0.0) + 0.5 * (0.0 - 1.0));
  CHECK(shoelace == doctest::Approx(1.5));
  CHECK(element_volume(trap, 0) == doctest::Approx(shoelace).epsilon(1e-13));

  auto inverted = single_quad({{{0, 0}, {0, 1}, {1, 1}, {1, 0}}});  // clockwise
  CHECK_THROWS_AS(element_volume(inverted, 0), ElementInversionError);
}

TEST_CASE("spaces: reference element invariants") {
  auto ref = make_reference_element(3);
  REQUIRE(ref.qp.size() == 9);
  for (const auto& qp : ref.qp) {
    double sum = 0, gx = 0, gy = 0;
    for (int a = 0; a < 9; ++a) {
      sum += qp.n[a];
      gx += qp.dn[a][0];
      gy += qp.dn[a][1];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-14);
    CHECK(std::abs(gx) <= 1e-13);
    CHECK(std::abs(gy) <= 1e-13);
  }
}

TEST_CASE("spaces: Q2 reproduces biquadratics; mass entries exact on affine elements") {
  // affine (parallelogram) element
  auto mesh = single_quad({{{0.2, 0.1}, {1.4, 0.4}, {1.9, 1.6}, {0.7, 1.3}}});
  auto sp = build_layout(mesh);
  auto coords = element_coords(sp, 0);

  // general affine element: total degree <= 2 monomials are in the
  // pullback space; the full tensor set additionally needs an axis-aligned
  // rectangle
  auto rect_mesh = single_quad({{{0.3, -0.2}, {2.1, -0.2}, {2.1, 0.9}, {0.3, 0.9}}});
  auto sp_rect = build_layout(rect_mesh);
  auto rect = element_coords(sp_rect, 0);

  auto check_monomial = [&](const std::array<std::array<double, 2>, 9>& cs, int px, int py) {
    auto f = [&](double x, double y) { return std::pow(x, px) * std::pow(y, py); };
    std::array<double, 9> vals;
    for (int a = 0; a < 9; ++a) vals[a] = f(cs[a][0], cs[a][1]);
    for (int t = 0; t < 10; ++t) {
      const double xi = uniform(-1, 1), eta = uniform(-1, 1);
      std::array<double, 9> n;
      q2_shape(xi, eta, n);
      double x = 0, y = 0;
      for (int a = 0; a < 9; ++a) {
        x += cs[a][0] * n[a];
        y += cs[a][1] * n[a];
      }
      auto r = interpolate(cs, vals, xi, eta);
      CHECK(std::abs(r.value - f(x, y)) <= 1e-12 * std::max(1.0, std::abs(f(x, y))));
    }
  };
  for (int px = 0; px <= 2; ++px)
    for (int py = 0; py <= 2; ++py) {
      if (px + py <= 2) check_monomial(coords, px, py);
      check_monomial(rect, px, py);
    }

  // gradient of x^2 is (2x, 0) on affine geometry
  {
    std::array<double, 9> vals;
    for (int a = 0; a < 9; ++a) vals[a] = coords[a][0] * coords[a][0];
    auto r = interpolate(coords, vals, 0.3, -0.4);
    std::array<double, 9> n;
    q2_shape(0.3, -0.4, n);
    double x = 0;
    for (int a = 0; a < 9; ++a) x += coords[a][0] * n[a];
    CHECK(r.gradient[0] == doctest::Approx(2 * x).epsilon(1e-12));
    CHECK(std::abs(r.gradient[1]) <= 1e-12);
  }

  // constant field: value preserved, zero gradient
  {
    std::array<double, 9> vals;
    vals.fill(3.25);
    auto r = interpolate(coords, vals, -0.7, 0.2);
    CHECK(r.value == doctest::Approx(3.25).epsilon(1e-15));
    CHECK(std::abs(r.gradient[0]) <= 1e-12);
    CHECK(std::abs(r.gradient[1]) <= 1e-12);
  }

  // 3x3 Gauss mass matrix vs 5x5 high-order oracle
  auto ref3 = make_reference_element(3);
  auto jac_det = [&](double xi, double eta) {
    std::array<std::array<double, 2>, 9> dn;
    q2_grad(xi, eta, dn);
    double j00 = 0, j01 = 0, j10 = 0, j11 = 0;
    for (int a = 0; a < 9; ++a) {
      j00 += coords[a][0] * dn[a][0];
      j01 += coords[a][0] * dn[a][1];
      j10 += coords[a][1] * dn[a][0];
      j11 += coords[a][1] * dn[a][1];
    }
    return j00 * j11 - j01 * j10;
  };
  DenseMatrix m3(9, 9), m5(9, 9);
  for (const auto& qp : ref3.qp)
    for (int a = 0; a < 9; ++a)
      for (int b = 0; b < 9; ++b) m3(a, b) += qp.weight * jac_det(qp.xi, qp.eta) * qp.n[a] * qp.n[b];
  const double p5[5] = {-0.906179845938664, -0.538469310105683, 0.0, 0.538469310105683,
                        0.906179845938664};
  const double w5[5] = {0.236926885056189, 0.478628670499366, 128.0 / 225.0, 0.478628670499366,
                        0.236926885056189};
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      std::array<double, 9> n;
      q2_shape(p5[i], p5[j], n);
      const double w = w5[i] * w5[j] * jac_det(p5[i], p5[j]);
      for (int a = 0; a < 9; ++a)
        for (int b = 0; b < 9; ++b) m5(a, b) += w * n[a] * n[b];
    }
  }
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b) CHECK(std::abs(m3(a, b) - m5(a, b)) <= 1e-13 * std::abs(m5(a, a)));
}

TEST_CASE("spaces: dof layout counts and interface ownership") {
  // single fluid quad: 18 u^f + 18 d^f + 3 p^f
  auto mf = single_quad({{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}, Region::Fluid);
  auto spf = build_layout(mf);
  CHECK(spf.layout.n_dofs == 39);
  CHECK(spf.layout.field_size(Field::Df) == 18);
  CHECK(spf.layout.field_size(Field::Uf) == 18);
  CHECK(spf.layout.field_size(Field::Pf) == 3);
  CHECK(spf.layout.field_size(Field::Ds) == 0);
  CHECK(spf.layout.field_size(Field::Us) == 0);
  CHECK(spf.layout.field_size(Field::Ps) == 0);

  // mirrored solid quad
  auto ms = single_quad({{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}, Region::Solid);
  auto sps = build_layout(ms);
  CHECK(sps.layout.field_size(Field::Ds) == 18);
  CHECK(sps.layout.field_size(Field::Us) == 18);
  CHECK(sps.layout.field_size(Field::Ps) == 3);
  CHECK(sps.layout.field_size(Field::Df) == 0);

  // two-element strip, fluid below solid: the 3 shared nodes own solid dofs
  Mesh strip;
  strip.nodes = {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0, 2}, {1, 2}};
  strip.elements.push_back({0, 1, 3, 2});
  strip.elements.push_back({2, 3, 5, 4});
  strip.element_region = {Region::Fluid, Region::Solid};
  strip.group_names = {"outer"};
  auto spstrip = build_layout(strip);
  const auto& fl = spstrip.layout;
  // shared edge is mesh nodes 2,3 plus the midside between them
  int shared = 0;
  for (int n = 0; n < fl.n_q2_nodes; ++n) {
    if (fl.node_interface[n]) {
      ++shared;
      CHECK(fl.node_solid[n] == 1);
      CHECK(fl.d_dof(n, 0) < fl.field_offset(Field::Df));  // lies in the d^s block
    }
  }
  CHECK(shared == 3);
  CHECK(fl.field_size(Field::Ds) == 2 * 9);  // all 9 nodes of the solid quad
  // the fluid element keeps only its 6 non-interface nodes
  CHECK(fl.field_size(Field::Df) == 2 * 6);
  CHECK(fl.field_size(Field::Ps) == 3);
  CHECK(fl.field_size(Field::Pf) == 3);

  // disjoint and covering
  std::vector<char> hit(fl.n_dofs, 0);
  for (Field f : kAllFields) {
    auto set = fl.field_set(f);
    set.validate(fl.n_dofs);
    for (int i : set.indices) {
      CHECK(hit[i] == 0);
      hit[i] = 1;
    }
  }
  for (char h : hit) CHECK(h == 1);
}

TEST_CASE("constitutive: deformation states") {
  Mat2<double> zero;
  auto s0 = deformation(zero);
  CHECK(s0.j == 1.0);
  CHECK(s0.b(0, 0) == 1.0);
  CHECK(s0.b(0, 1) == 0.0);

  Mat2<double> stretch;
  stretch(0, 0) = 0.3;
  auto s1 = deformation(stretch);
  CHECK(s1.j == doctest::Approx(1.3).epsilon(1e-15));

  // rotation: F = Q, J = 1, B = I
  const double th = 0.35;
  Mat2<double> rot;
  rot(0, 0) = std::cos(th) - 1.0;
  rot(0, 1) = -std::sin(th);
  rot(1, 0) = std::sin(th);
  rot(1, 1) = std::cos(th) - 1.0;
  auto s2 = deformation(rot);
  CHECK(s2.j == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s2.b(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s2.b(0, 1) == doctest::Approx(0.0).epsilon(1e-14));

  Mat2<double> collapse;
  collapse(0, 0) = -1.0;
  CHECK_THROWS_AS(deformation(collapse, 7), ElementInversionError);
}

TEST_CASE("constitutive: Mooney-Rivlin stress") {
  MaterialParams mat;
  const double c1 = mat.c1(), c2 = mat.c2();
  CHECK(c2 == doctest::Approx(0.5 * c1));

  Mat2<double> zero;
  auto rest = deformation(zero);
  auto s = mooney_rivlin_stress(rest, 0.0, c1, c2);
  CHECK(s(0, 0) == doctest::Approx(c1).epsilon(1e-14));  // 2C1 - 2C2 = C1
  CHECK(s(0, 1) == 0.0);

  auto s_rest = mooney_rivlin_stress(rest, mat.rest_pressure(), c1, c2);
  CHECK(std::abs(s_rest(0, 0)) <= 1e-12 * c1);
  CHECK(std::abs(s_rest(1, 1)) <= 1e-12 * c1);

  // B = diag(4, 1/4): sigma11 = -p + 8 C1 - C2/2
  Mat2<double> gd;
  gd(0, 0) = 1.0;   // F = diag(2, 1/2)
  gd(1, 1) = -0.5;
  auto st = deformation(gd);
  CHECK(st.b(0, 0) == doctest::Approx(4.0));
  CHECK(st.b(1, 1) == doctest::Approx(0.25));
  const double p = 123.0;
  auto sig = mooney_rivlin_stress(st, p, c1, c2);
  CHECK(sig(0, 0) == doctest::Approx(-p + 8 * c1 - 0.5 * c2).epsilon(1e-13));

  // symmetry for random states
  for (int t = 0; t < 10; ++t) {
    Mat2<double> g;
    g(0, 0) = uniform(-0.3, 0.3);
    g(0, 1) = uniform(-0.3, 0.3);
    g(1, 0) = uniform(-0.3, 0.3);
    g(1, 1) = uniform(-0.3, 0.3);
    DeformationState<double> ds;
    try {
      ds = deformation(g);
    } catch (const ElementInversionError&) {
      continue;
    }
    auto sg = mooney_rivlin_stress(ds, uniform(-1, 1), c1, c2);
    CHECK(sg(0, 1) == sg(1, 0));

    // frame indifference: sigma(Q B Q^T) = Q sigma(B) Q^T
    const double a = uniform(0, 6.28);
    Mat2<double> q;
    q(0, 0) = std::cos(a);
    q(0, 1) = -std::sin(a);
    q(1, 0) = std::sin(a);
    q(1, 1) = std::cos(a);
    DeformationState<double> rotated;
    rotated.f = matmul(q, ds.f);
    rotated.j = det(rotated.f);
    rotated.b = matmul(rotated.f, transpose(rotated.f));
    auto s_rot = mooney_rivlin_stress(rotated, 0.77, c1, c2);
    auto want = matmul(q, matmul(mooney_rivlin_stress(ds, 0.77, c1, c2), transpose(q)));
    for (int i = 0; i < 4; ++i) CHECK(std::abs(s_rot.a[i] - want.a[i]) <= 1e-12 * c1);
  }
}

TEST_CASE("constitutive: Newtonian stress") {
  const double mu = 3.5e-3;
  Mat2<double> zero;
  auto hydro = newtonian_stress(zero, 2.5, mu);
  CHECK(hydro(0, 0) == -2.5);
  CHECK(hydro(1, 1) == -2.5);
  CHECK(hydro(0, 1) == 0.0);

  Mat2<double> shear;
  shear(0, 1) = 1.7;  // simple shear gradient
  auto ss = newtonian_stress(shear, 4.0, mu);
  CHECK(ss(0, 1) == doctest::Approx(mu * 1.7));
  CHECK(ss(1, 0) == doctest::Approx(mu * 1.7));
  CHECK(trace(ss) == doctest::Approx(-8.0));

  // Poiseuille u = (1 - y^2, 0): grad u = [[0, -2y], [0, 0]], sigma12 = -2 mu y
  const double y = 0.37;
  Mat2<double> pg;
  pg(0, 1) = -2.0 * y;
  auto sp = newtonian_stress(pg, 0.0, mu);
  CHECK(sp(0, 1) == doctest::Approx(-2.0 * mu * y).epsilon(1e-14));

  // trace identity: tr sigma = -2p + 2 mu div u
  for (int t = 0; t < 5; ++t) {
    Mat2<double> g;
    for (int i = 0; i < 4; ++i) g.a[i] = uniform(-1, 1);
    const double p = uniform(-1, 1);
    auto sg = newtonian_stress(g, p, mu);
    CHECK(trace(sg) == doctest::Approx(-2 * p + 2 * mu * trace(g)).epsilon(1e-13));
    // deviatoric part traceless for divergence-free gradients
    Mat2<double> gdf = g;
    gdf(1, 1) = -g(0, 0);
    auto sdf = newtonian_stress(gdf, 0.0, mu);
    CHECK(std::abs(trace(sdf)) <= 1e-14);
  }
}

TEST_CASE("constitutive: mesh stiffness functions") {
  CHECK(mesh_stiffness_inverse_volume(1.0) == 1.0);
  CHECK(mesh_stiffness_inverse_volume(0.25) == 4.0);
  CHECK_THROWS_AS(mesh_stiffness_inverse_volume(0.0), ElementInversionError);

  // refined children of an affine element have exactly 4x the stiffness
  MeshHierarchy h;
  h.levels.push_back(single_quad({{{0, 0}, {2, 0}, {2, 1}, {0, 1}}}));
  refine(h);
  const double kp = mesh_stiffness_inverse_volume(element_volume(h.levels[0], 0));
  for (int c = 0; c < 4; ++c) {
    const double kc = mesh_stiffness_inverse_volume(element_volume(h.levels[1], c));
    CHECK(kc == doctest::Approx(4.0 * kp).epsilon(1e-14));
  }

  CHECK(mesh_stiffness_distance({1.0, 2.0}, {1.0, 2.0}, 7.0, 10.0) == 7.0);
  CHECK(mesh_stiffness_distance({0.01, 0.0}, {0.0, 0.0}, 1.0, 10000.0) ==
        doctest::Approx(1.0 / 101.0).epsilon(1e-15));
  // a = 100 vs a = 1 at equal distance differ by exactly 100x
  const double k100 = mesh_stiffness_distance({0.3, 0.4}, {0, 0}, 100.0, 10000.0);
  const double k1 = mesh_stiffness_distance({0.3, 0.4}, {0, 0}, 1.0, 10000.0);
  CHECK(k100 == doctest::Approx(100.0 * k1).epsilon(1e-15));
  CHECK(k1 > 0.0);
  CHECK_THROWS_AS(mesh_stiffness_distance({0, 0}, {0, 0}, 0.5, 10.0), ConfigError);
}

TEST_CASE("supg: xi and tau") {
  CHECK(xi_function(0.5) == 0.5);
  CHECK(xi_function(0.0) == 0.0);
  CHECK(xi_function(10.0) == 1.0);
  CHECK_THROWS_AS(xi_function(-0.1), std::domain_error);

  const double lambda = 3.7e4, nu = 3.5e-3 / 1035.0;
  const double sl = std::sqrt(lambda);
  const double u_star = 4.0 * sl * nu;

  // below the seam tau is the diffusive value, independent of speed
  CHECK(tau_supg(0.0, lambda, nu) == tau_supg(0.5 * u_star, lambda, nu));
  CHECK(tau_supg(0.25 * u_star, lambda, nu) == doctest::Approx(1.0 / (4 * lambda * nu)).epsilon(1e-12));

  // above: tau = 1 / (sqrt(lambda) |u|)
  CHECK(tau_supg(3.0 * u_star, lambda, nu) == doctest::Approx(1.0 / (sl * 3.0 * u_star)).epsilon(1e-14));

  // exact continuity at the seam
  CHECK(tau_supg(u_star, lambda, nu) == tau_supg(std::nextafter(u_star, 0.0), lambda, nu));

  // monotone nonincreasing in speed beyond the seam
  double prev = tau_supg(u_star, lambda, nu);
  for (double f = 1.1; f < 4.0; f += 0.3) {
    const double t = tau_supg(f * u_star, lambda, nu);
    CHECK(t <= prev);
    prev = t;
  }
}

TEST_CASE("supg: element eigenvalue scaling and invariance") {
  auto ref = make_reference_element(3);

  auto coords_of = [&](double scale, double dx, double dy, double distort) {
    Mesh m = single_quad({{{0, 0},
                           {scale + distort * 0.1 * scale, 0},
                           {scale, scale},
                           {0 + distort * 0.07 * scale, scale}}});
    for (auto& nxy : m.nodes) {
      nxy[0] += dx;
      nxy[1] += dy;
    }
    auto sp = build_layout(m);
    return element_coords(sp, 0);
  };

  // lambda scales like 1/h^2 under uniform scaling
  auto l1 = element_lambda(ref, coords_of(1.0, 0, 0, 1.0));
  auto l2 = element_lambda(ref, coords_of(0.5, 0, 0, 1.0));
  CHECK(l2.lambda / l1.lambda == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(l1.lambda > 0.0);

  // rigid translation leaves lambda unchanged
  auto lt = element_lambda(ref, coords_of(1.0, 12.3, -4.5, 1.0));
  CHECK(lt.lambda == doctest::Approx(l1.lambda).epsilon(1e-10));

  // affine-scaled copies share lambda * h^2
  auto la = element_lambda(ref, coords_of(2.0, 0, 0, 1.0));
  CHECK(la.lambda * 4.0 == doctest::Approx(l1.lambda).epsilon(1e-6));

  // power method matches the dense eigensolve
  DenseMatrix a, b;
  bubble_pencil(ref, coords_of(1.0, 0, 0, 1.0), a, b);
  auto dense = dense_generalized_eigensolve(a, b);
  CHECK(l1.lambda == doctest::Approx(dense.lambda).epsilon(1e-8));

  // closed-form largest eigenvalue of the 2x2 pencil with diagonal B
  const double tr = a(0, 0) + a(1, 1);
  const double dev = std::sqrt((a(0, 0) - a(1, 1)) * (a(0, 0) - a(1, 1)) + 4 * a(0, 1) * a(1, 0));
  const double closed = 0.5 * (tr + dev) / b(0, 0);
  CHECK(l1.lambda == doctest::Approx(closed).epsilon(1e-8));
}

TEST_CASE("supg: streamline test factor") {
  const double tau = 0.37, rho = 1035.0;
  Vec2<double> grad{2.0, -3.0};

  // u = d_dot: zero advection kills the factor
  Vec2<double> zero{0.0, 0.0};
  CHECK(supg_test_factor(zero, grad, tau, rho) == 0.0);

  // pure x-advection picks the x-gradient
  Vec2<double> ex{1.0, 0.0};
  CHECK(supg_test_factor(ex, grad, tau, rho) == doctest::Approx(tau * rho * 2.0));

  CHECK(supg_test_factor(ex, grad, 0.0, rho) == 0.0);
}
