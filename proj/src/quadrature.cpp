#include "quadrature.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace dphc {

namespace {

// 15-point Kronrod extension of 7-point Gauss, positive half of the rule.
constexpr double kNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000,
};
constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
};
// Gauss weights attach to the odd-index Kronrod nodes.
constexpr double kGaussW[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
};

struct Panel {
  double kronrod;
  double discrepancy;
};

Panel evaluate_panel(const std::function<double(double)>& f, double a,
                     double b) {
  double c = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  double fc = f(c);
  double kronrod = kKronrodW[7] * fc;
  double gauss = kGaussW[3] * fc;
  for (int i = 0; i < 7; ++i) {
    double x = h * kNodes[i];
    double sum = f(c - x) + f(c + x);
    kronrod += kKronrodW[i] * sum;
    if (i % 2 == 1) gauss += kGaussW[i / 2] * sum;
  }
  return {kronrod * h, std::fabs((kronrod - gauss) * h)};
}

void refine(const std::function<double(double)>& f, double a, double b,
            double tol, int depth, int max_depth, QuadResult& acc) {
  Panel p = evaluate_panel(f, a, b);
  acc.evaluations += 15;
  if (p.discrepancy <= tol || p.discrepancy <= 1e-300) {
    acc.value += p.kronrod;
    acc.error_estimate += p.discrepancy;
    return;
  }
  if (depth >= max_depth) {
    std::ostringstream msg;
    msg << "quadrature failed to converge on [" << a << ", " << b
        << "]: local discrepancy " << p.discrepancy << " exceeds tolerance "
        << tol << " at depth " << depth;
    fail(Status::quadrature, msg.str());
  }
  double c = 0.5 * (a + b);
  refine(f, a, c, 0.5 * tol, depth + 1, max_depth, acc);
  refine(f, c, b, 0.5 * tol, depth + 1, max_depth, acc);
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, int max_depth) {
  require(std::isfinite(a) && std::isfinite(b), Status::invalid_argument,
          "integrate: non-finite interval");
  require(abs_tol > 0.0, Status::invalid_argument,
          "integrate: tolerance must be positive");
  QuadResult acc;
  if (a == b) return acc;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  refine(f, a, b, abs_tol, 0, max_depth, acc);
  acc.value *= sign;
  return acc;
}

}  // namespace dphc
