#pragma once

#include <array>
#include <complex>

namespace dphc {

// Qubit density matrix; a10 is implied as conj(a01).
struct DensityMatrix {
  double a00 = 1.0;
  double a11 = 0.0;
  std::complex<double> a01 = 0.0;

  std::array<double, 3> bloch() const;
  double purity() const;
};

// Validates trace, positivity, and purity range; throws on violation.
DensityMatrix make_density(double a00, double a11, std::complex<double> a01);
DensityMatrix density_from_bloch(const std::array<double, 3>& b);

struct ColoredNoiseParams {
  double alpha = 1.0;
  double gamma1 = 1e-4;
  double gamma2 = 1e4;
  double quad_tol = 1e-10;
};

struct OhmicBathParams {
  double s = 1.0;
  double omega_c = 1.0;
};

// Two-state telegraph kernel G(t, gamma) with delta = sqrt(gamma^2 - 4);
// evaluated on the overdamped, underdamped, or series branch so the result
// stays finite and |G| <= 1 for all rates up to 1e4.
double rtn_kernel(double t, double gamma);

// Switching-rate weight p_alpha(gamma) on [gamma1, gamma2]; the alpha = 1
// branch takes over within 1e-9 of the log-uniform point.
double color_weight(double gamma, const ColoredNoiseParams& p);

// Dephasing coefficient for 1/f^alpha classical noise: the weighted kernel
// integral, evaluated adaptively in log-gamma with a split at gamma = 2.
double lambda_classical(double t, const ColoredNoiseParams& p);

// Dephasing coefficient for the zero-temperature Ohmic-family bath.
double lambda_quantum(double t, const OhmicBathParams& p);

// Applies the dephasing map: diagonal untouched, coherence scaled by lam.
DensityMatrix dephase(const DensityMatrix& rho, double lam);

}  // namespace dphc
