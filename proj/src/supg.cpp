// SPDX-License-Identifier: Apache-2.0

#include "fsi/supg.hpp"

#include <cmath>
#include <stdexcept>

#include "fsi/dense.hpp"
#include "fsi/geometry_eval.hpp"

namespace fsi {

void bubble_pencil(const ReferenceElement& ref, const std::array<std::array<double, 2>, 9>& coords,
                   DenseMatrix& amat, DenseMatrix& bmat, int element_for_error) {
  std::array<Vec2<double>, 9> c;
  for (int a = 0; a < 9; ++a) c[a] = {coords[a][0], coords[a][1]};

  amat = DenseMatrix(2, 2);
  bmat = DenseMatrix(2, 2);
  constexpr int bubble = 4;  // tensor-local interior node
  for (const QuadPoint& qp : ref.qp) {
    const auto g = eval_geometry<double>(qp, c, true, element_for_error);
    const double w = qp.weight * g.det;
    const auto& grad = g.grad[bubble];
    const auto& h = g.hess[bubble];  // xx, xy, yy
    const double lap = h[0] + h[2];
    // div(grad w_k + grad w_k^T)_i = lap * delta_ik + H_ik
    const double hm[2][2] = {{h[0], h[1]}, {h[1], h[2]}};
    for (int k = 0; k < 2; ++k) {
      for (int l = 0; l < 2; ++l) {
        double alk = (k == l ? lap * lap : 0.0) + 2.0 * lap * hm[k][l];
        for (int i = 0; i < 2; ++i) alk += hm[i][k] * hm[i][l];
        amat(k, l) += w * alk;
      }
    }
    const double g2 = grad.x * grad.x + grad.y * grad.y;
    bmat(0, 0) += w * g2;
    bmat(1, 1) += w * g2;
  }
}

ElementStabilization element_lambda(const ReferenceElement& ref,
                                    const std::array<std::array<double, 2>, 9>& coords,
                                    double tol, int max_it, int element_for_error) {
  DenseMatrix amat, bmat;
  bubble_pencil(ref, coords, amat, bmat, element_for_error);

  ElementStabilization out;
  auto res = power_method_generalized(amat, bmat, tol, max_it);
  if (!res.converged) {
    out.power_converged = false;
    res = dense_generalized_eigensolve(amat, bmat);
  }
  out.lambda = res.lambda;
  out.eigenvector = {res.eigenvector[0], res.eigenvector[1]};
  return out;
}

double xi_function(double re) {
  if (re < 0.0) throw std::domain_error("xi: negative local Reynolds number");
  return re < 1.0 ? re : 1.0;
}

double reynolds_local(double speed, double lambda, double nu_kin) {
  return speed / (4.0 * std::sqrt(lambda) * nu_kin);
}

double tau_supg(double speed, double lambda, double nu_kin) {
  return tau_supg_t<double>(speed, lambda, nu_kin);
}

}  // namespace fsi
