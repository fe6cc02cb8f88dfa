#pragma once

namespace dphc {

// Complete gamma function for real arguments.  Lanczos approximation (g = 7,
// 9 terms) for x >= 0.5, reflection formula below; relative error stays under
// 1e-12 on [-5, 10] away from the poles.  Throws Status::pole at non-positive
// integers.
double gamma_function(double x);

}  // namespace dphc
