// SPDX-License-Identifier: Apache-2.0

#include "fsi/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "fsi/errors.hpp"

namespace fsi {

const char* field_name(Field f) {
  switch (f) {
    case Field::Ds: return "d_s";
    case Field::Df: return "d_f";
    case Field::Us: return "u_s";
    case Field::Uf: return "u_f";
    case Field::Ps: return "p_s";
    case Field::Pf: return "p_f";
  }
  return "?";
}

namespace {

// 1D quadratic Lagrange basis on {-1, 0, 1}.
inline void lag3(double x, double* l) {
  l[0] = 0.5 * x * (x - 1.0);
  l[1] = 1.0 - x * x;
  l[2] = 0.5 * x * (x + 1.0);
}
inline void lag3_d(double x, double* l) {
  l[0] = x - 0.5;
  l[1] = -2.0 * x;
  l[2] = x + 0.5;
}
inline void lag3_dd(double* l) {
  l[0] = 1.0;
  l[1] = -2.0;
  l[2] = 1.0;
}

struct GaussRule {
  std::vector<double> pts, wts;
};

GaussRule gauss_1d(int n) {
  GaussRule g;
  if (n == 2) {
    const double a = 1.0 / std::sqrt(3.0);
    g.pts = {-a, a};
    g.wts = {1.0, 1.0};
  } else if (n == 3) {
    const double a = std::sqrt(3.0 / 5.0);
    g.pts = {-a, 0.0, a};
    g.wts = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  } else if (n == 4) {
    const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
    const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
    const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
    const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
    g.pts = {-b, -a, a, b};
    g.wts = {wb, wa, wa, wb};
  } else {
    throw std::invalid_argument("gauss rule: 2..4 points supported");
  }
  return g;
}

}  // namespace

void q2_shape(double xi, double eta, std::array<double, 9>& n) {
  double lx[3], ly[3];
  lag3(xi, lx);
  lag3(eta, ly);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) n[3 * j + i] = lx[i] * ly[j];
}

void q2_grad(double xi, double eta, std::array<std::array<double, 2>, 9>& dn) {
  double lx[3], ly[3], dlx[3], dly[3];
  lag3(xi, lx);
  lag3(eta, ly);
  lag3_d(xi, dlx);
  lag3_d(eta, dly);
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      dn[3 * j + i][0] = dlx[i] * ly[j];
      dn[3 * j + i][1] = lx[i] * dly[j];
    }
  }
}

void q2_hess(double xi, double eta, std::array<std::array<double, 3>, 9>& d2n) {
  double lx[3], ly[3], dlx[3], dly[3], ddlx[3], ddly[3];
  lag3(xi, lx);
  lag3(eta, ly);
  lag3_d(xi, dlx);
  lag3_d(eta, dly);
  lag3_dd(ddlx);
  lag3_dd(ddly);
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      d2n[3 * j + i][0] = ddlx[i] * ly[j];
      d2n[3 * j + i][1] = dlx[i] * dly[j];
      d2n[3 * j + i][2] = lx[i] * ddly[j];
    }
  }
}

ReferenceElement make_reference_element(int gauss_points_1d) {
  ReferenceElement ref;
  ref.order = gauss_points_1d;
  const GaussRule g = gauss_1d(gauss_points_1d);
  for (std::size_t j = 0; j < g.pts.size(); ++j) {
    for (std::size_t i = 0; i < g.pts.size(); ++i) {
      QuadPoint q;
      q.xi = g.pts[i];
      q.eta = g.pts[j];
      q.weight = g.wts[i] * g.wts[j];
      q2_shape(q.xi, q.eta, q.n);
      q2_grad(q.xi, q.eta, q.dn);
      q2_hess(q.xi, q.eta, q.d2n);
      q.psi = {1.0, q.xi, q.eta};
      ref.qp.push_back(q);
    }
  }
  const GaussRule ge = gauss_1d(3);
  // Edge e runs counterclockwise from corner e to corner e+1.
  const std::array<std::array<double, 4>, 4> edge_param = {{
      // xi0, eta0, dxi/ds, deta/ds with s in [-1, 1]
      {0.0, -1.0, 1.0, 0.0},   // bottom
      {1.0, 0.0, 0.0, 1.0},    // right
      {0.0, 1.0, -1.0, 0.0},   // top
      {-1.0, 0.0, 0.0, -1.0},  // left
  }};
  for (int e = 0; e < 4; ++e) {
    for (std::size_t k = 0; k < ge.pts.size(); ++k) {
      EdgeQuadPoint q;
      q.s = ge.pts[k];
      q.weight = ge.wts[k];
      q.xi = edge_param[e][0] + edge_param[e][2] * q.s;
      q.eta = edge_param[e][1] + edge_param[e][3] * q.s;
      q.dref = {edge_param[e][2], edge_param[e][3]};
      q2_shape(q.xi, q.eta, q.n);
      q2_grad(q.xi, q.eta, q.dn);
      ref.edge_qp[e].push_back(q);
    }
  }
  return ref;
}

IndexSet FieldLayout::field_set(Field f) const {
  std::vector<int> idx(field_size(f));
  for (int i = 0; i < field_size(f); ++i) idx[i] = field_offset(f) + i;
  return IndexSet{std::move(idx), field_name(f)};
}

std::vector<int> FieldLayout::interface_nodes() const {
  std::vector<int> out;
  for (int n = 0; n < n_q2_nodes; ++n)
    if (node_interface[n]) out.push_back(n);
  return out;
}

Space build_layout(const Mesh& mesh, int gauss_points_1d) {
  Space sp;
  sp.mesh = &mesh;
  sp.ref = make_reference_element(gauss_points_1d);

  DofMap& dm = sp.dofmap;
  dm.n_mesh_nodes = mesh.n_nodes();
  dm.q2_coords.assign(mesh.nodes.begin(), mesh.nodes.end());
  dm.q2_key.resize(mesh.n_nodes());
  for (int n = 0; n < mesh.n_nodes(); ++n) dm.q2_key[n] = {Q2NodeKey::Kind::MeshNode, n, -1};

  std::map<std::pair<int, int>, int> edge_node;
  auto midside = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = edge_node.find(key);
    if (it != edge_node.end()) return it->second;
    const int id = static_cast<int>(dm.q2_coords.size());
    dm.q2_coords.push_back({0.5 * (mesh.nodes[a][0] + mesh.nodes[b][0]),
                            0.5 * (mesh.nodes[a][1] + mesh.nodes[b][1])});
    dm.q2_key.push_back({Q2NodeKey::Kind::Edge, key.first, key.second});
    edge_node.emplace(key, id);
    return id;
  };

  dm.element_nodes.resize(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& q = mesh.elements[e];
    auto& loc = dm.element_nodes[e];
    loc[0] = q[0];
    loc[2] = q[1];
    loc[8] = q[2];
    loc[6] = q[3];
    loc[1] = midside(q[0], q[1]);
    loc[5] = midside(q[1], q[2]);
    loc[7] = midside(q[2], q[3]);
    loc[3] = midside(q[3], q[0]);
    loc[4] = static_cast<int>(dm.q2_coords.size());
    dm.q2_coords.push_back({0.25 * (mesh.nodes[q[0]][0] + mesh.nodes[q[1]][0] +
                                    mesh.nodes[q[2]][0] + mesh.nodes[q[3]][0]),
                            0.25 * (mesh.nodes[q[0]][1] + mesh.nodes[q[1]][1] +
                                    mesh.nodes[q[2]][1] + mesh.nodes[q[3]][1])});
    dm.q2_key.push_back({Q2NodeKey::Kind::Center, e, -1});
  }
  dm.n_q2_nodes = static_cast<int>(dm.q2_coords.size());

  FieldLayout& fl = sp.layout;
  fl.n_q2_nodes = dm.n_q2_nodes;
  fl.n_elements = mesh.n_elements();
  fl.node_solid.assign(dm.n_q2_nodes, 0);
  fl.node_interface.assign(dm.n_q2_nodes, 0);
  fl.elem_solid.resize(mesh.n_elements());

  std::vector<std::uint8_t> node_fluid(dm.n_q2_nodes, 0);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const bool solid = region_is_solid(mesh.element_region[e]);
    fl.elem_solid[e] = solid ? 1 : 0;
    for (int a = 0; a < 9; ++a) {
      if (solid)
        fl.node_solid[dm.element_nodes[e][a]] = 1;
      else
        node_fluid[dm.element_nodes[e][a]] = 1;
    }
  }
  for (int n = 0; n < dm.n_q2_nodes; ++n)
    fl.node_interface[n] = (fl.node_solid[n] && node_fluid[n]) ? 1 : 0;

  fl.node_rank.resize(dm.n_q2_nodes);
  int n_solid_nodes = 0, n_fluid_nodes = 0;
  for (int n = 0; n < dm.n_q2_nodes; ++n)
    fl.node_rank[n] = fl.node_solid[n] ? n_solid_nodes++ : n_fluid_nodes++;

  fl.elem_prank.resize(mesh.n_elements());
  int n_solid_el = 0, n_fluid_el = 0;
  for (int e = 0; e < mesh.n_elements(); ++e)
    fl.elem_prank[e] = fl.elem_solid[e] ? n_solid_el++ : n_fluid_el++;

  const int sizes[6] = {2 * n_solid_nodes, 2 * n_fluid_nodes, 2 * n_solid_nodes,
                        2 * n_fluid_nodes, 3 * n_solid_el,    3 * n_fluid_el};
  fl.offsets[0] = 0;
  for (int f = 0; f < 6; ++f) fl.offsets[f + 1] = fl.offsets[f] + sizes[f];
  fl.n_dofs = fl.offsets[6];
  return sp;
}

InterpResult interpolate(const std::array<std::array<double, 2>, 9>& coords,
                         const std::array<double, 9>& values, double xi, double eta,
                         int element_for_error) {
  std::array<double, 9> n;
  std::array<std::array<double, 2>, 9> dn;
  q2_shape(xi, eta, n);
  q2_grad(xi, eta, dn);
  double j00 = 0, j01 = 0, j10 = 0, j11 = 0, v = 0, gxi = 0, geta = 0;
  for (int a = 0; a < 9; ++a) {
    j00 += coords[a][0] * dn[a][0];
    j01 += coords[a][0] * dn[a][1];
    j10 += coords[a][1] * dn[a][0];
    j11 += coords[a][1] * dn[a][1];
    v += values[a] * n[a];
    gxi += values[a] * dn[a][0];
    geta += values[a] * dn[a][1];
  }
  const double det = j00 * j11 - j01 * j10;
  if (det <= 0.0) throw ElementInversionError(element_for_error);
  // gradient = J^{-T} grad_ref
  InterpResult r;
  r.value = v;
  r.gradient[0] = (j11 * gxi - j10 * geta) / det;
  r.gradient[1] = (-j01 * gxi + j00 * geta) / det;
  return r;
}

}  // namespace fsi
