// SPDX-License-Identifier: Apache-2.0
//
// SUPG stabilization following the inverse-estimate-free tau design: the
// element constant lambda_k is the largest eigenvalue of a local
// generalized eigenproblem on the bubble space vanishing on the element
// boundary, solved by the power method with a dense fallback.

#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "fsi/ad.hpp"
#include "fsi/spaces.hpp"
#include "fsi/tensor.hpp"

namespace fsi {

struct ElementStabilization {
  double lambda = 0.0;               // 1/m^2
  std::array<double, 2> eigenvector{1.0, 0.0};
  bool power_converged = true;
};

struct DenseMatrix;

// Assembles the 2x2 pencil over span{phi_b e1, phi_b e2} (phi_b the Q2
// interior bubble) on the element given by its 9 geometry nodes:
//   A_kl = ( div(grad w_k + grad w_k^T), div(grad w_l + grad w_l^T) )
//   B_kl = ( grad w_k, grad w_l )
void bubble_pencil(const ReferenceElement& ref, const std::array<std::array<double, 2>, 9>& coords,
                   DenseMatrix& a, DenseMatrix& b, int element_for_error = -1);

// Largest generalized eigenvalue of the bubble pencil via the power
// method; falls back to the dense solve when the power method does not
// converge (flagged in the result).
ElementStabilization element_lambda(const ReferenceElement& ref,
                                    const std::array<std::array<double, 2>, 9>& coords,
                                    double tol = 1e-8, int max_it = 500,
                                    int element_for_error = -1);

// xi(Re) = Re on [0,1), 1 afterwards; negative Re is a domain error.
double xi_function(double re);

double reynolds_local(double speed, double lambda, double nu_kin);

// tau = xi(Re_k) / (sqrt(lambda_k) |u|). For Re_k < 1 the xi factor
// cancels the speed, leaving the diffusive value 1/(4 lambda nu); both
// branches are evaluated through the same seam expression so they agree
// exactly at Re_k = 1. Templated for use inside differentiated kernels.
template <typename T>
T tau_supg_t(const T& speed, double lambda, double nu_kin) {
  const double sl = std::sqrt(lambda);
  const double u_star = 4.0 * sl * nu_kin;  // speed at Re_k = 1
  if (value(speed) < u_star) return T(1.0 / (sl * u_star));
  return T(1.0) / (sl * speed);
}

double tau_supg(double speed, double lambda, double nu_kin);

// Streamline test factor tau * rho * (a . grad_phi) with a = u - d_dot;
// the SUPG test function is this factor times the velocity shape.
template <typename T>
T supg_test_factor(const Vec2<T>& advection, const Vec2<T>& grad_phi, const T& tau, double rho) {
  return tau * rho * dot(advection, grad_phi);
}

// Per-element stabilization state for the fluid elements of a mesh; the
// geometry is the deformed configuration at the time the state is built
// (it is refreshed once per time step).
struct StabilizationState {
  std::vector<ElementStabilization> elements;  // indexed by element id; unused for solid
};

}  // namespace fsi
