#pragma once

#include <functional>

namespace dphc {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

// Adaptive Gauss-Kronrod (G7/K15) integration of f over [a, b] to the given
// absolute tolerance.  Bisects intervals whose Kronrod-Gauss discrepancy
// exceeds their share of the budget; throws Status::quadrature (carrying the
// achieved estimate in the message) if the depth cap is hit first.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, int max_depth = 60);

}  // namespace dphc
