// SPDX-License-Identifier: Apache-2.0
//
// Isoparametric geometry evaluation at a quadrature point: Jacobian,
// physical shape gradients and (optionally) physical shape Hessians on a
// possibly curved 9-node geometry. Templated so deformed configurations
// can be differentiated with dual numbers.

#pragma once

#include <array>

#include "fsi/ad.hpp"
#include "fsi/errors.hpp"
#include "fsi/spaces.hpp"
#include "fsi/tensor.hpp"

namespace fsi {

template <typename T>
struct GeomEval {
  Mat2<T> jac;      // J(i,a) = dx_i / dxi_a
  T det{};
  Mat2<T> jac_inv;
  std::array<Vec2<T>, 9> grad;           // physical gradients of the 9 shapes
  std::array<std::array<T, 3>, 9> hess;  // physical Hessians (xx, xy, yy)
};

template <typename T>
GeomEval<T> eval_geometry(const QuadPoint& qp, const std::array<Vec2<T>, 9>& coords,
                          bool with_hessians, int element_for_error) {
  GeomEval<T> g;
  for (int i = 0; i < 4; ++i) g.jac.a[i] = T(0.0);
  for (int a = 0; a < 9; ++a) {
    g.jac(0, 0) += coords[a].x * qp.dn[a][0];
    g.jac(0, 1) += coords[a].x * qp.dn[a][1];
    g.jac(1, 0) += coords[a].y * qp.dn[a][0];
    g.jac(1, 1) += coords[a].y * qp.dn[a][1];
  }
  g.det = det(g.jac);
  if (value(g.det) <= 0.0) throw ElementInversionError(element_for_error);
  g.jac_inv = inverse(g.jac, g.det);

  for (int a = 0; a < 9; ++a) {
    const Vec2<T> gref{T(qp.dn[a][0]), T(qp.dn[a][1])};
    g.grad[a] = matvec_t(g.jac_inv, gref);  // J^{-T} grad_ref
  }

  if (with_hessians) {
    // Reference Hessians of the geometry map components.
    std::array<T, 3> hx{}, hy{};
    for (int a = 0; a < 9; ++a) {
      for (int k = 0; k < 3; ++k) {
        hx[k] += coords[a].x * qp.d2n[a][k];
        hy[k] += coords[a].y * qp.d2n[a][k];
      }
    }
    for (int a = 0; a < 9; ++a) {
      // M = H_ref(N) - gx * H_ref(x) - gy * H_ref(y)
      Mat2<T> m;
      m(0, 0) = qp.d2n[a][0] - g.grad[a].x * hx[0] - g.grad[a].y * hy[0];
      m(0, 1) = qp.d2n[a][1] - g.grad[a].x * hx[1] - g.grad[a].y * hy[1];
      m(1, 0) = m(0, 1);
      m(1, 1) = qp.d2n[a][2] - g.grad[a].x * hx[2] - g.grad[a].y * hy[2];
      // H_x = J^{-T} M J^{-1}
      const Mat2<T> h = matmul(transpose(g.jac_inv), matmul(m, g.jac_inv));
      g.hess[a] = {h(0, 0), h(0, 1), h(1, 1)};
    }
  }
  return g;
}

}  // namespace fsi
