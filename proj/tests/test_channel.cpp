#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "channel.hpp"
#include "common.hpp"
#include "doctest.h"

using dphc::ColoredNoiseParams;
using dphc::DensityMatrix;
using dphc::OhmicBathParams;
using dphc::Status;
using testutil::status_of;

namespace {

ColoredNoiseParams colored(double alpha, double tol = 1e-10) {
  ColoredNoiseParams p;
  p.alpha = alpha;
  p.quad_tol = tol;
  return p;
}

// Composite Simpson of the weighted kernel in log-gamma, split at ln 2 so
// each half is smooth.  Independent of the adaptive integrator under test.
double simpson_lambda(double t, const ColoredNoiseParams& p, int half_points) {
  auto f = [&](double u) {
    // exp(log(gamma)) can land a rounding step outside the support
    double g = std::clamp(std::exp(u), p.gamma1, p.gamma2);
    return dphc::rtn_kernel(t, g) * dphc::color_weight(g, p) * g;
  };
  auto simpson = [&](double a, double b, int n) {  // n odd point count
    double h = (b - a) / (n - 1);
    double acc = f(a) + f(b);
    for (int i = 1; i < n - 1; ++i) acc += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
  };
  double lo = std::log(p.gamma1), mid = std::log(2.0),
         hi = std::log(p.gamma2);
  return simpson(lo, mid, half_points) + simpson(mid, hi, half_points);
}

}  // namespace

TEST_CASE("rtn kernel matches references on all three branches") {
  CHECK(std::abs(dphc::rtn_kernel(1.0, 1.0) - 0.15057436514588761) < 1e-14);
  CHECK(std::abs(dphc::rtn_kernel(1.0, 2.0) - 0.40600584970983808) < 1e-14);
  CHECK(std::abs(dphc::rtn_kernel(0.5, 3.0) - 0.78664559930336833) < 1e-14);
  CHECK(std::abs(dphc::rtn_kernel(2.5, 0.25) - 0.066226238903137833) < 1e-14);
}

TEST_CASE("rtn kernel is 1 at t = 0 and bounded") {
  for (double g : {0.3, 1.999, 2.0, 2.001, 57.0, 1e4}) {
    CHECK(dphc::rtn_kernel(0.0, g) == doctest::Approx(1.0).epsilon(1e-15));
  }
  for (double t : {0.1, 0.9, 2.7}) {
    for (double g : {1e-4, 0.5, 1.9, 2.0, 2.1, 800.0}) {
      CHECK(std::abs(dphc::rtn_kernel(t, g)) <= 1.0);
    }
  }
}

TEST_CASE("rtn kernel is continuous across the gamma = 2 series window") {
  // reference values around the removable singularity
  CHECK(std::abs(dphc::rtn_kernel(1.0, 2.0 + 1e-6) - 0.40600603015682826) <
        1e-13);
  CHECK(std::abs(dphc::rtn_kernel(1.0, 2.0 - 1e-6) - 0.40600566926273963) <
        1e-13);
  // window edge: series on one side, closed form just outside.  The
  // genuine variation of G over the 2e-9 gamma gap is below 2e-9, so any
  // seam between the two branches would dominate the difference.
  for (double t : {0.3, 1.0, 3.0}) {
    double inside = dphc::rtn_kernel(t, 2.0 + 0.999e-6);
    double outside = dphc::rtn_kernel(t, 2.0 + 1.001e-6);
    CHECK(std::abs(inside - outside) < 2e-9);
    inside = dphc::rtn_kernel(t, 2.0 - 0.999e-6);
    outside = dphc::rtn_kernel(t, 2.0 - 1.001e-6);
    CHECK(std::abs(inside - outside) < 2e-9);
  }
}

TEST_CASE("rtn kernel rejects bad arguments") {
  CHECK(status_of([] { dphc::rtn_kernel(-0.1, 1.0); }) ==
        Status::invalid_argument);
  CHECK(status_of([] { dphc::rtn_kernel(1.0, 0.0); }) ==
        Status::invalid_argument);
  CHECK(status_of([] { dphc::rtn_kernel(1.0, -2.0); }) ==
        Status::invalid_argument);
}

TEST_CASE("switching-rate weight matches references") {
  CHECK(std::abs(dphc::color_weight(1.0, colored(1.0)) -
                 0.054286810237906478) < 1e-15);
  CHECK(std::abs(dphc::color_weight(10.0, colored(1.5)) -
                 1.5812969597801677e-4) < 1e-18);
  CHECK(std::abs(dphc::color_weight(0.03, colored(0.7)) -
                 0.22124261580838736) < 1e-14);
}

TEST_CASE("switching-rate weight is continuous at alpha = 1") {
  double at = dphc::color_weight(5.0, colored(1.0));
  for (double a : {1.0 - 1e-12, 1.0 + 1e-12}) {
    CHECK(std::abs(dphc::color_weight(5.0, colored(a)) - at) <
          1e-9 * std::abs(at));
  }
}

TEST_CASE("switching-rate weight normalises to 1") {
  for (double a : {0.5, 0.8, 1.0, 1.3, 1.7, 2.0}) {
    ColoredNoiseParams p = colored(a);
    auto f = [&](double u) {
      double g = std::clamp(std::exp(u), p.gamma1, p.gamma2);
      return dphc::color_weight(g, p) * g;
    };
    auto simpson = [&](double lo, double hi, int n) {
      double h = (hi - lo) / (n - 1);
      double acc = f(lo) + f(hi);
      for (int i = 1; i < n - 1; ++i)
        acc += f(lo + h * i) * (i % 2 ? 4.0 : 2.0);
      return acc * h / 3.0;
    };
    double total = simpson(std::log(p.gamma1), std::log(p.gamma2), 20001);
    CHECK(std::abs(total - 1.0) <= 1e-8);
  }
}

TEST_CASE("switching-rate weight rejects out-of-support rates") {
  CHECK(status_of([] { dphc::color_weight(1e-5, colored(1.0)); }) ==
        Status::invalid_argument);
  CHECK(status_of([] { dphc::color_weight(2e4, colored(1.0)); }) ==
        Status::invalid_argument);
  CHECK(status_of([] {
          ColoredNoiseParams p;
          p.gamma1 = 10.0;
          p.gamma2 = 1.0;
          dphc::color_weight(5.0, p);
        }) == Status::invalid_argument);
  CHECK(status_of([] { dphc::color_weight(1.0, colored(-0.5)); }) ==
        Status::invalid_argument);
}

TEST_CASE("classical coefficient matches references") {
  CHECK(std::abs(dphc::lambda_classical(1.0, colored(1.0)) -
                 0.26165057087909305) < 1e-9);
  CHECK(std::abs(dphc::lambda_classical(3.14, colored(2.0)) -
                 0.99733697566944039) < 1e-9);
  CHECK(std::abs(dphc::lambda_classical(0.2, colored(2.0)) -
                 0.92107294251038907) < 1e-9);
  CHECK(std::abs(dphc::lambda_classical(0.7, colored(0.5)) -
                 0.98271377276003162) < 1e-9);
  CHECK(std::abs(dphc::lambda_classical(1.5, colored(2.0)) -
                 (-0.98852294613526090)) < 1e-9);
}

TEST_CASE("classical coefficient agrees with a Simpson oracle on a grid") {
  for (int i = 0; i < 10; ++i) {
    double t = 0.2 + (3.14 - 0.2) * i / 9.0;
    for (int j = 0; j < 10; ++j) {
      double a = 0.5 + 1.5 * j / 9.0;
      ColoredNoiseParams p = colored(a);
      double adaptive = dphc::lambda_classical(t, p);
      double simpson = simpson_lambda(t, p, 10001);
      CHECK(std::abs(adaptive - simpson) <= 1e-8);
      CHECK(std::abs(adaptive) <= 1.0);
    }
  }
}

TEST_CASE("classical coefficient is 1 at t = 0") {
  for (double a : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(dphc::lambda_classical(0.0, colored(a)) - 1.0) < 1e-9);
  }
}

TEST_CASE("classical coefficient rejects bad parameters") {
  CHECK(status_of([] { dphc::lambda_classical(-1.0, colored(1.0)); }) ==
        Status::invalid_argument);
  CHECK(status_of([] { dphc::lambda_classical(1.0, colored(1.0, -1e-9)); }) ==
        Status::invalid_argument);
  CHECK(status_of([] {
          ColoredNoiseParams p;
          p.gamma1 = 0.0;
          dphc::lambda_classical(1.0, p);
        }) == Status::invalid_argument);
}

TEST_CASE("quantum coefficient matches references") {
  OhmicBathParams p;
  p.s = 2.0;
  CHECK(std::abs(dphc::lambda_quantum(1.0, p) - 0.60653065971263342) < 1e-12);
  p.s = 1.0;
  CHECK(std::abs(dphc::lambda_quantum(1.0, p) - 0.70710678118654752) < 1e-12);
  p.s = 0.5;
  CHECK(std::abs(dphc::lambda_quantum(1.0, p) - 0.70481066404420195) < 1e-12);
  p.s = 1.5;
  CHECK(std::abs(dphc::lambda_quantum(3.0, p) - 0.38141423758645212) < 1e-12);
  p.s = 0.1;
  CHECK(std::abs(dphc::lambda_quantum(7.0, p) - 0.0012327807965942124) <
        1e-15);
  p.s = 3.0;
  CHECK(std::abs(dphc::lambda_quantum(7.0, p) - 0.36088353154637454) < 1e-12);
  p.s = 2.5;
  CHECK(std::abs(dphc::lambda_quantum(2.0, p) - 0.40251241814180933) < 1e-12);
}

TEST_CASE("quantum coefficient is continuous at s = 1 and 1 at t = 0") {
  OhmicBathParams p;
  p.s = 1.0;
  double at = dphc::lambda_quantum(2.5, p);
  for (double s : {1.0 - 1e-10, 1.0 + 1e-10}) {
    p.s = s;
    CHECK(std::abs(dphc::lambda_quantum(2.5, p) - at) < 1e-9);
  }
  for (double s : {0.1, 1.0, 2.4}) {
    p.s = s;
    CHECK(dphc::lambda_quantum(0.0, p) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("quantum coefficient rejects bad parameters") {
  OhmicBathParams p;
  CHECK(status_of([&] { dphc::lambda_quantum(-0.5, p); }) ==
        Status::invalid_argument);
  CHECK(status_of([&] {
          p.s = 0.0;
          dphc::lambda_quantum(1.0, p);
        }) == Status::invalid_argument);
  CHECK(status_of([&] {
          p.s = 1.0;
          p.omega_c = 0.0;
          dphc::lambda_quantum(1.0, p);
        }) == Status::invalid_argument);
}

TEST_CASE("density construction validates and round-trips") {
  DensityMatrix rho = dphc::make_density(0.7, 0.3, {0.2, -0.1});
  std::array<double, 3> b = rho.bloch();
  CHECK(b[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(b[1] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(b[2] == doctest::Approx(0.4).epsilon(1e-15));

  DensityMatrix back = dphc::density_from_bloch(b);
  CHECK(back.a00 == doctest::Approx(rho.a00).epsilon(1e-15));
  CHECK(back.a11 == doctest::Approx(rho.a11).epsilon(1e-15));
  CHECK(back.a01.real() == doctest::Approx(rho.a01.real()).epsilon(1e-15));
  CHECK(back.a01.imag() == doctest::Approx(rho.a01.imag()).epsilon(1e-15));

  // purity: pure pole state vs maximally mixed
  CHECK(dphc::density_from_bloch({0.0, 0.0, 1.0}).purity() ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dphc::density_from_bloch({0.0, 0.0, 0.0}).purity() ==
        doctest::Approx(0.5).epsilon(1e-15));

  // invalid states
  CHECK(status_of([] { dphc::make_density(0.8, 0.3, {0.0, 0.0}); }) ==
        Status::invalid_argument);  // trace != 1
  CHECK(status_of([] { dphc::make_density(1.2, -0.2, {0.0, 0.0}); }) ==
        Status::invalid_argument);  // negative population
  CHECK(status_of([] { dphc::make_density(0.5, 0.5, {0.6, 0.0}); }) ==
        Status::invalid_argument);  // coherence beyond positivity
  CHECK(status_of([] { dphc::density_from_bloch({0.8, 0.8, 0.8}); }) ==
        Status::invalid_argument);  // |b| > 1
}

TEST_CASE("dephasing scales the coherence and nothing else") {
  DensityMatrix rho = dphc::make_density(0.6, 0.4, {0.3, 0.2});
  DensityMatrix out = dphc::dephase(rho, -0.5);
  CHECK(out.a00 == rho.a00);
  CHECK(out.a11 == rho.a11);
  CHECK(out.a01.real() == doctest::Approx(-0.15).epsilon(1e-15));
  CHECK(out.a01.imag() == doctest::Approx(-0.10).epsilon(1e-15));

  DensityMatrix id = dphc::dephase(rho, 1.0);
  CHECK(id.a01 == rho.a01);

  CHECK(status_of([&] { dphc::dephase(rho, 1.5); }) ==
        Status::invalid_argument);
  CHECK(status_of([&] { dphc::dephase(rho, -1.5); }) ==
        Status::invalid_argument);
}
