// SPDX-License-Identifier: Apache-2.0

#include "fsi/constitutive.hpp"

#include <cmath>

namespace fsi {

void MaterialParams::validate() const {
  if (rho_s <= 0 || rho_f <= 0 || mu <= 0 || young <= 0 || young_clot <= 0)
    throw ConfigError("material parameters must be positive");
  if (poisson <= 0.0 || poisson > 0.5) throw ConfigError("poisson ratio must lie in (0, 0.5]");
}

double mesh_stiffness_inverse_volume(double element_volume) {
  if (element_volume <= 0.0) throw ElementInversionError(-1);
  return 1.0 / element_volume;
}

double mesh_stiffness_distance(const std::array<double, 2>& x, const std::array<double, 2>& m,
                               double a, double c) {
  if (a < 1.0 || c < 1.0) throw ConfigError("distance stiffness requires a >= 1 and c >= 1");
  const double k1 = std::hypot(x[0] - m[0], x[1] - m[1]);
  return a / (1.0 + c * k1);
}

}  // namespace fsi
