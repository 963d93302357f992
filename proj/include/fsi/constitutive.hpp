// SPDX-License-Identifier: Apache-2.0
//
// Kinematic tensors, Mooney-Rivlin and Newtonian stresses, and the mesh
// motion stiffness functions. Templated on the scalar type so the element
// kernels can differentiate through them.

#pragma once

#include <cmath>

#include "fsi/ad.hpp"
#include "fsi/errors.hpp"
#include "fsi/tensor.hpp"

namespace fsi {

struct MaterialParams {
  double rho_s = 1120.0;      // kg/m^3
  double rho_f = 1035.0;      // kg/m^3
  double mu = 3.5e-3;         // Pa s
  double young = 1.0e6;       // Pa
  double poisson = 0.5;
  double young_clot = 3.0e3;  // Pa, soft inclusion regions

  double shear_modulus() const { return young / (2.0 * (1.0 + poisson)); }
  double c1() const { return shear_modulus() / 3.0; }
  double c2() const { return 0.5 * c1(); }
  double c1_clot() const { return young_clot / (2.0 * (1.0 + poisson)) / 3.0; }
  double c2_clot() const { return 0.5 * c1_clot(); }
  double kinematic_viscosity() const { return mu / rho_f; }
  // Solid pressure that makes the undeformed state stress free.
  double rest_pressure() const { return 2.0 * c1() - 2.0 * c2(); }
  double rest_pressure_clot() const { return 2.0 * c1_clot() - 2.0 * c2_clot(); }

  void validate() const;
};

template <typename T>
struct DeformationState {
  Mat2<T> f;  // deformation gradient I + grad d
  T j;        // det F
  Mat2<T> b;  // left Cauchy-Green F F^T
};

// Builds F, J, B from the reference displacement gradient. J <= 0 raises
// ElementInversionError tagged with the given element id.
template <typename T>
DeformationState<T> deformation(const Mat2<T>& grad_d, int element_for_error = -1) {
  DeformationState<T> s;
  s.f = Mat2<T>::identity() + grad_d;
  s.j = det(s.f);
  if (value(s.j) <= 0.0) throw ElementInversionError(element_for_error);
  s.b = matmul(s.f, transpose(s.f));
  return s;
}

// Incompressible Mooney-Rivlin Cauchy stress: -p I + 2 C1 B - 2 C2 B^{-1}.
template <typename T>
Mat2<T> mooney_rivlin_stress(const DeformationState<T>& state, const T& p_s, double c1, double c2) {
  const T det_b = det(state.b);
  Mat2<T> s = 2.0 * c1 * state.b - 2.0 * c2 * inverse(state.b, det_b);
  s(0, 0) = s(0, 0) - p_s;
  s(1, 1) = s(1, 1) - p_s;
  return s;
}

// Newtonian fluid Cauchy stress: -p I + mu (grad u + grad u^T).
template <typename T>
Mat2<T> newtonian_stress(const Mat2<T>& grad_u, const T& p_f, double mu) {
  Mat2<T> s = mu * (grad_u + transpose(grad_u));
  s(0, 0) = s(0, 0) - p_f;
  s(1, 1) = s(1, 1) - p_f;
  return s;
}

// Mesh stiffness k = 1/V_el on the reference element.
double mesh_stiffness_inverse_volume(double element_volume);

// Distance-based mesh stiffness k = a / (1 + c * |x - m|), a, c >= 1.
double mesh_stiffness_distance(const std::array<double, 2>& x, const std::array<double, 2>& m,
                               double a, double c);

}  // namespace fsi
