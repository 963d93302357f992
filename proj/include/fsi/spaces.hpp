// SPDX-License-Identifier: Apache-2.0
//
// Q2 vector Lagrange spaces for displacement and velocity, element-wise
// discontinuous P1 (modal 1, xi, eta) pressure, and the six-field dof
// layout d^s, d^f, u^s, u^f, p^s, p^f. Displacement and velocity dofs of
// interface nodes belong to the solid sets.

#pragma once

#include <array>
#include <vector>

#include "fsi/mesh.hpp"
#include "fsi/sparse.hpp"

namespace fsi {

enum class Field : int { Ds = 0, Df = 1, Us = 2, Uf = 3, Ps = 4, Pf = 5 };

constexpr std::array<Field, 6> kAllFields = {Field::Ds, Field::Df, Field::Us,
                                             Field::Uf, Field::Ps, Field::Pf};

const char* field_name(Field f);

// Local Q2 nodes in tensor order: id = 3*i_eta + i_xi over {-1,0,1}^2.
// Corners are locals {0,2,8,6}, edge midside nodes {1,5,7,3}, center 4.
void q2_shape(double xi, double eta, std::array<double, 9>& n);
void q2_grad(double xi, double eta, std::array<std::array<double, 2>, 9>& dn);
void q2_hess(double xi, double eta, std::array<std::array<double, 3>, 9>& d2n);  // xx, xy, yy

struct QuadPoint {
  double xi, eta, weight;
  std::array<double, 9> n;
  std::array<std::array<double, 2>, 9> dn;
  std::array<std::array<double, 3>, 9> d2n;
  std::array<double, 3> psi;  // P1 modes (1, xi, eta)
};

struct EdgeQuadPoint {
  double s, weight;
  double xi, eta;
  std::array<double, 2> dref;  // d(xi,eta)/ds along the edge
  std::array<double, 9> n;
  std::array<std::array<double, 2>, 9> dn;
};

struct ReferenceElement {
  std::vector<QuadPoint> qp;                         // tensor Gauss rule
  std::array<std::vector<EdgeQuadPoint>, 4> edge_qp; // 3-point rule per edge
  int order = 3;
};

ReferenceElement make_reference_element(int gauss_points_1d = 3);

// Provenance of a Q2 node: mesh corner node, midside of a corner-node
// pair, or element center. Mirrors NodeOrigin on the refined mesh, which
// makes Q2 nodes of level l coincide with corner nodes of level l+1.
struct Q2NodeKey {
  enum class Kind : std::uint8_t { MeshNode, Edge, Center } kind;
  int a = -1, b = -1;
};

struct DofMap {
  int n_mesh_nodes = 0;
  int n_q2_nodes = 0;
  std::vector<std::array<int, 9>> element_nodes;  // tensor-local order
  std::vector<std::array<double, 2>> q2_coords;
  std::vector<Q2NodeKey> q2_key;
};

struct FieldLayout {
  int n_q2_nodes = 0;
  int n_elements = 0;
  int n_dofs = 0;
  std::array<int, 7> offsets{};  // block offsets in field order Ds..Pf

  std::vector<std::uint8_t> node_solid;      // owns d,u in the solid sets
  std::vector<std::uint8_t> node_interface;  // adjacent to both regions
  std::vector<int> node_rank;                // rank within ownership class
  std::vector<int> elem_prank;               // element rank within its pressure class
  std::vector<std::uint8_t> elem_solid;

  int field_size(Field f) const { return offsets[static_cast<int>(f) + 1] - offsets[static_cast<int>(f)]; }
  int field_offset(Field f) const { return offsets[static_cast<int>(f)]; }

  int d_dof(int q2_node, int comp) const {
    return node_solid[q2_node] ? offsets[0] + 2 * node_rank[q2_node] + comp
                               : offsets[1] + 2 * node_rank[q2_node] + comp;
  }
  int u_dof(int q2_node, int comp) const {
    return node_solid[q2_node] ? offsets[2] + 2 * node_rank[q2_node] + comp
                               : offsets[3] + 2 * node_rank[q2_node] + comp;
  }
  int p_dof(int element, int mode) const {
    return elem_solid[element] ? offsets[4] + 3 * elem_prank[element] + mode
                               : offsets[5] + 3 * elem_prank[element] + mode;
  }

  Field d_field(int q2_node) const { return node_solid[q2_node] ? Field::Ds : Field::Df; }
  Field u_field(int q2_node) const { return node_solid[q2_node] ? Field::Us : Field::Uf; }

  IndexSet field_set(Field f) const;
  std::vector<int> interface_nodes() const;
};

struct Space {
  const Mesh* mesh = nullptr;
  ReferenceElement ref;
  DofMap dofmap;
  FieldLayout layout;
};

// Deterministic construction: Q2 nodes are the mesh corner nodes (same
// ids) followed by midside and center nodes in element-traversal order;
// dofs are numbered by node rank then component.
Space build_layout(const Mesh& mesh, int gauss_points_1d = 3);

struct InterpResult {
  double value;
  std::array<double, 2> gradient;  // physical-frame gradient
};

// Isoparametric evaluation of a scalar Q2 field given its 9 local values
// and the element's 9 geometry node coordinates.
InterpResult interpolate(const std::array<std::array<double, 2>, 9>& coords,
                         const std::array<double, 9>& values, double xi, double eta,
                         int element_for_error = -1);

}  // namespace fsi
