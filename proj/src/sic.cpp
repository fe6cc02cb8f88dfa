#include "sic.hpp"

#include <cmath>

namespace dphc {

const std::array<std::array<double, 3>, 4>& sic_directions() {
  static const double r = 1.0 / std::sqrt(3.0);
  static const std::array<std::array<double, 3>, 4> dirs = {{
      {r, r, r},
      {r, -r, -r},
      {-r, r, -r},
      {-r, -r, r},
  }};
  return dirs;
}

std::array<double, 4> sic_probabilities(const DensityMatrix& rho) {
  auto b = rho.bloch();
  const auto& dirs = sic_directions();
  std::array<double, 4> p;
  for (int k = 0; k < 4; ++k) {
    p[k] = 0.25 * (1.0 + dirs[k][0] * b[0] + dirs[k][1] * b[1] +
                   dirs[k][2] * b[2]);
  }
  return p;
}

std::array<double, 3> sic_bloch_from_probabilities(
    const std::array<double, 4>& p) {
  const auto& dirs = sic_directions();
  std::array<double, 3> b = {0.0, 0.0, 0.0};
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 3; ++i) b[i] += 3.0 * p[k] * dirs[k][i];
  }
  return b;
}

}  // namespace dphc
