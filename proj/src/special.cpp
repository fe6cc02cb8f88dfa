#include "special.hpp"

#include <cmath>

#include "errors.hpp"

namespace dphc {

namespace {

constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

double lanczos_positive(double x) {
  // Valid for x >= 0.5.
  x -= 1.0;
  double a = kLanczos[0];
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (x + i);
  double t = x + kLanczosG + 0.5;
  return std::sqrt(2.0 * M_PI) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

}  // namespace

double gamma_function(double x) {
  require(std::isfinite(x), Status::invalid_argument,
          "gamma_function: non-finite argument");
  if (x <= 0.0 && x == std::floor(x))
    fail(Status::pole, "gamma_function: pole at non-positive integer");
  if (x >= 0.5) return lanczos_positive(x);
  // Reflection: Gamma(x) = pi / (sin(pi x) * Gamma(1 - x)).
  return M_PI / (std::sin(M_PI * x) * lanczos_positive(1.0 - x));
}

}  // namespace dphc
