#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "eulerlab/specfun.hpp"

using namespace eulerlab;
using std::numbers::pi;

namespace {

// I_n(z) = (1/pi) int_0^pi exp(z cos t) cos(n t) dt; the trapezoid rule is
// spectrally accurate for this periodic integrand.
Complex bessel_by_trapezoid(int n, Complex z) {
  const int m = 4000;
  Complex s = 0.5 * (std::exp(z) + std::exp(-z) * std::cos(n * pi));
  for (int k = 1; k < m; ++k) {
    const double t = pi * k / m;
    s += std::exp(z * std::cos(t)) * std::cos(n * t);
  }
  return s / double(m);
}

}  // namespace

TEST_CASE("real Bessel values agree with Boost") {
  for (int nu : {0, 1, 2})
    for (double x : {1e-8, 0.1, 1.0, 5.0, 19.9, 20.1, 50.0, 300.0}) {
      const double want = boost::math::cyl_bessel_i(nu, x);
      const double got = specfun::bessel_i(nu, x).real();
      CHECK(std::abs(got - want) <= 1e-13 * std::abs(want) + 1e-300);
    }
}

TEST_CASE("complex Bessel values agree with the integral representation") {
  for (int nu : {0, 1, 2})
    for (Complex z : {Complex(0.3, 0.2), Complex(2.0, -3.0), Complex(8.0, 7.0), Complex(25.0, 10.0),
                      Complex(0.0, 15.0)}) {
      const Complex want = bessel_by_trapezoid(nu, z);
      const Complex got = specfun::bessel_i(nu, z);
      CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("left half-plane follows the parity relation") {
  const Complex z(-4.0, 1.5);
  for (int nu : {0, 1, 2}) {
    const Complex want = bessel_by_trapezoid(nu, z);
    CHECK(std::abs(specfun::bessel_i(nu, z) - want) <= 1e-12 * std::abs(want));
  }
}

TEST_CASE("scaled Bessel stays finite where I overflows") {
  const double x = 2000.0;
  const double s = specfun::bessel_i_scaled(1, x).real();
  // leading Hankel terms: e^{-x} I_1(x) ~ (1 - 3/(8x) - 15/(128x^2)) / sqrt(2 pi x)
  const double want = (1 - 3 / (8 * x) - 15 / (128 * x * x)) / std::sqrt(2 * pi * x);
  CHECK(std::isfinite(s));
  CHECK(std::abs(s - want) <= 1e-9 * want);
}

TEST_CASE("G and its logarithm") {
  CHECK(specfun::big_g(0.0) == Complex(1.0, 0.0));
  for (double u : {0.01, 0.7, 3.0, 12.0}) {
    const double want = boost::math::cyl_bessel_i(1, 2 * u) / u;
    CHECK(std::abs(specfun::big_g(u).real() - want) <= 1e-13 * want);
    CHECK(std::abs(specfun::log_big_g(u).real() - std::log(want)) <= 1e-13 * std::max(1.0, std::log(want)));
  }
  // G(iy) = J_1(2y)/y
  for (double y : {0.5, 1.3, 2.7}) {
    const double want = boost::math::cyl_bessel_j(1, 2 * y) / y;
    CHECK(std::abs(specfun::big_g(Complex(0, y)).real() - want) <= 1e-13);
  }
}

TEST_CASE("first zero of G on the imaginary axis is j_{1,1}/2") {
  const double want = 0.5 * boost::math::cyl_bessel_j_zero(1.0, 1);
  CHECK(std::abs(specfun::first_imaginary_zero_of_g() - want) <= 1e-12);
  CHECK(specfun::kStatedFirstZero != doctest::Approx(want).epsilon(0.01));
}

TEST_CASE("derivatives of g against closed forms") {
  // g' = 2 I0(2u)/I1(2u) - 2/u, g'' from differentiating again
  for (double u : {0.05, 0.4, 1.0, 4.0, 15.0, 40.0}) {
    const double i0 = boost::math::cyl_bessel_i(0, 2 * u), i1 = boost::math::cyl_bessel_i(1, 2 * u);
    const double r = i0 / i1;
    const double g1 = 2 * r - 2 / u;
    // d/du (I0/I1) = 2 (I1/I1 - I0 (I0 - I1/(2u)) / I1^2) = 2 (1 - r^2 + r/(2u))
    const double g2 = 4 * (1 - r * r + r / (2 * u)) + 2 / (u * u);
    CHECK(specfun::g_deriv({u, 0, specfun::Variant::g}) == doctest::Approx(std::log(i1 / u)).epsilon(1e-13));
    CHECK(specfun::g_deriv({u, 1, specfun::Variant::g}) == doctest::Approx(g1).epsilon(1e-10));
    CHECK(specfun::g_deriv({u, 2, specfun::Variant::g}) == doctest::Approx(g2).epsilon(1e-9));
  }
}

TEST_CASE("g_star and h variants") {
  CHECK(specfun::g_deriv({0.5, 0, specfun::Variant::g_star}) ==
        doctest::Approx(specfun::g_deriv({0.5, 0, specfun::Variant::g})));
  CHECK(specfun::g_deriv({3.0, 0, specfun::Variant::g_star}) ==
        doctest::Approx(specfun::g_deriv({3.0, 0, specfun::Variant::g}) - 6.0));
  CHECK_THROWS_AS(specfun::g_deriv({1.0, 1, specfun::Variant::g_star}), DomainError);
  // h(u) = g(u/2)
  CHECK(specfun::g_deriv({3.0, 0, specfun::Variant::h}) ==
        doctest::Approx(specfun::g_deriv({1.5, 0, specfun::Variant::g})));
  CHECK(specfun::g_deriv({3.0, 1, specfun::Variant::h}) ==
        doctest::Approx(0.5 * specfun::g_deriv({1.5, 1, specfun::Variant::g})));
}

TEST_CASE("log1p keeps small arguments accurate") {
  const Complex w(1e-12, -3e-13);
  const Complex want = w - w * w / 2.0 + w * w * w / 3.0;
  CHECK(std::abs(specfun::log1p(w) - want) <= 1e-28);
  CHECK(std::abs(specfun::log1p(Complex(1.0, 1.0)) - std::log(Complex(2.0, 1.0))) <= 1e-15);
}

TEST_CASE("arguments beyond the supported range are rejected") {
  CHECK_THROWS_AS(specfun::bessel_i(0, Complex(2 * specfun::kMaxArgument, 0)), DomainError);
}
