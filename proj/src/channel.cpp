#include "channel.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "quadrature.hpp"
#include "special.hpp"

namespace dphc {

namespace {

constexpr double kTraceTol = 1e-12;
constexpr double kBranchHalfWidth = 1e-6;  // |gamma - 2| below this -> series

void validate_density(const DensityMatrix& rho) {
  require(std::fabs(rho.a00 + rho.a11 - 1.0) <= kTraceTol,
          Status::invalid_argument, "density matrix: trace differs from 1");
  require(rho.a00 >= -kTraceTol && rho.a11 >= -kTraceTol,
          Status::invalid_argument, "density matrix: negative population");
  double det = rho.a00 * rho.a11 - std::norm(rho.a01);
  require(det >= -kTraceTol, Status::invalid_argument,
          "density matrix: positivity violated");
}

void validate_colored(const ColoredNoiseParams& p) {
  require(p.alpha > 0.0, Status::invalid_argument, "alpha must be positive");
  require(p.gamma1 > 0.0 && p.gamma2 > p.gamma1, Status::invalid_argument,
          "switching-rate bounds require 0 < gamma1 < gamma2");
  require(p.quad_tol > 0.0, Status::invalid_argument,
          "quad_tol must be positive");
}

}  // namespace

std::array<double, 3> DensityMatrix::bloch() const {
  return {2.0 * a01.real(), -2.0 * a01.imag(), a00 - a11};
}

double DensityMatrix::purity() const {
  return a00 * a00 + a11 * a11 + 2.0 * std::norm(a01);
}

DensityMatrix make_density(double a00, double a11, std::complex<double> a01) {
  DensityMatrix rho{a00, a11, a01};
  validate_density(rho);
  return rho;
}

DensityMatrix density_from_bloch(const std::array<double, 3>& b) {
  double r2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
  require(r2 <= 1.0 + 1e-12, Status::invalid_argument,
          "Bloch vector leaves the unit ball");
  return {0.5 * (1.0 + b[2]), 0.5 * (1.0 - b[2]),
          std::complex<double>(0.5 * b[0], -0.5 * b[1])};
}

double rtn_kernel(double t, double gamma) {
  require(t >= 0.0, Status::invalid_argument, "rtn_kernel: t must be >= 0");
  require(gamma > 0.0, Status::invalid_argument,
          "rtn_kernel: gamma must be positive");
  double d2 = gamma * gamma - 4.0;
  if (std::fabs(gamma - 2.0) <= kBranchHalfWidth) {
    // Series in u = delta^2 t^2 (valid for either sign of u):
    // cosh(delta t) and sinh(delta t)/delta expanded to the u^3 term.
    double u = d2 * t * t;
    double c = 1.0 + u * (1.0 / 2 + u * (1.0 / 24 + u / 720));
    double s = 1.0 + u * (1.0 / 6 + u * (1.0 / 120 + u / 5040));
    return std::exp(-gamma * t) * (c + gamma * t * s);
  }
  if (gamma > 2.0) {
    // Two decaying exponentials; gamma - delta computed as 4/(gamma + delta)
    // to dodge cancellation, and no cosh that could overflow.
    double delta = std::sqrt(d2);
    double slow = std::exp(-4.0 / (gamma + delta) * t);
    double fast = std::exp(-(gamma + delta) * t);
    return ((gamma + delta) * slow + (delta - gamma) * fast) / (2.0 * delta);
  }
  double omega = std::sqrt(-d2);
  return std::exp(-gamma * t) *
         (std::cos(omega * t) + gamma / omega * std::sin(omega * t));
}

double color_weight(double gamma, const ColoredNoiseParams& p) {
  validate_colored(p);
  require(gamma >= p.gamma1 && gamma <= p.gamma2, Status::invalid_argument,
          "color_weight: gamma outside [gamma1, gamma2]");
  if (std::fabs(p.alpha - 1.0) < 1e-9)
    return 1.0 / (gamma * std::log(p.gamma2 / p.gamma1));
  double am1 = p.alpha - 1.0;
  // g2^(a-1) - g1^(a-1) via expm1 keeps precision when alpha is near 1.
  double diff = std::expm1(am1 * std::log(p.gamma2)) -
                std::expm1(am1 * std::log(p.gamma1));
  double geo = std::exp(am1 * (std::log(p.gamma1) + std::log(p.gamma2)));
  return am1 * std::pow(gamma, -p.alpha) * geo / diff;
}

double lambda_classical(double t, const ColoredNoiseParams& p) {
  validate_colored(p);
  require(t >= 0.0, Status::invalid_argument,
          "lambda_classical: t must be >= 0");
  auto integrand = [&](double u) {
    double gamma = std::exp(u);
    return rtn_kernel(t, gamma) * color_weight(gamma, p) * gamma;
  };
  double lo = std::log(p.gamma1);
  double hi = std::log(p.gamma2);
  double split = std::log(2.0);
  double value = 0.0;
  if (lo < split && split < hi) {
    value = integrate(integrand, lo, split, 0.5 * p.quad_tol).value +
            integrate(integrand, split, hi, 0.5 * p.quad_tol).value;
  } else {
    value = integrate(integrand, lo, hi, p.quad_tol).value;
  }
  if (std::fabs(value) > 1.0) {
    require(std::fabs(value) <= 1.0 + 100.0 * p.quad_tol, Status::quadrature,
            "lambda_classical: result outside [-1, 1] beyond tolerance");
    value = value > 0.0 ? 1.0 : -1.0;
  }
  return value;
}

double lambda_quantum(double t, const OhmicBathParams& p) {
  require(t >= 0.0, Status::invalid_argument,
          "lambda_quantum: t must be >= 0");
  require(p.s > 0.0, Status::invalid_argument,
          "lambda_quantum: s must be positive");
  require(p.omega_c > 0.0, Status::invalid_argument,
          "lambda_quantum: omega_c must be positive");
  double wt = p.omega_c * t;
  double decoherence;
  if (std::fabs(p.s - 1.0) < 1e-9) {
    decoherence = 0.5 * std::log1p(wt * wt);
  } else {
    double sm1 = p.s - 1.0;
    decoherence = gamma_function(sm1) *
                  (1.0 - std::cos(sm1 * std::atan(wt)) /
                             std::pow(1.0 + wt * wt, 0.5 * sm1));
  }
  return std::exp(-decoherence);
}

DensityMatrix dephase(const DensityMatrix& rho, double lam) {
  validate_density(rho);
  require(std::fabs(lam) <= 1.0 + 1e-12, Status::invalid_argument,
          "dephase: |lambda| must not exceed 1");
  return {rho.a00, rho.a11, rho.a01 * lam};
}

}  // namespace dphc
