#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "eulerlab/asymconst.hpp"
#include "eulerlab/density.hpp"
#include "eulerlab/saddle.hpp"

using namespace eulerlab;

namespace {

const double log4pi = std::log(4 * std::numbers::pi);

// Hankel: e^{-z} I_1(z) sqrt(2 pi z) = 1 - 3/(8z) - 15/(128 z^2) - 315/(3072 z^3) + ...
double hankel_log_s(double u) {
  const double z = 2 * u;
  return std::log1p(-0.375 / z - 0.1171875 / (z * z) - 0.1025390625 / (z * z * z));
}
double hankel_dlog_s(double u) {
  const double z = 2 * u;
  const double s = 1 - 0.375 / z - 0.1171875 / (z * z) - 0.1025390625 / (z * z * z);
  const double ds = 0.375 / (z * z) + 2 * 0.1171875 / (z * z * z) + 3 * 0.1025390625 / (z * z * z * z);
  return 2 * ds / s;
}

// g(u) = log(I_1(2u)/u)
double g(double u) {
  if (u < 1e-3) return u * u / 2 - u * u * u * u / 24;
  const long double i1 = boost::math::cyl_bessel_i(1, 2.0L * u);
  return double(std::log(i1 / u));
}
double g1(double u) {
  if (u < 1e-3) return u - u * u * u / 6;
  const long double z = 2.0L * u;
  return double(2 * boost::math::cyl_bessel_i(0, z) / boost::math::cyl_bessel_i(1, z) - 2 / (long double)u);
}
// g - (2u - 1.5 log u - log(4 pi)/2) and g' - (2 - 1.5/u) for u >= 1
double g_rem(double u) {
  if (u > 4000) return hankel_log_s(u);
  const long double z = 2.0L * u;
  return double(std::log(boost::math::cyl_bessel_i(1, z)) - z + 0.5L * std::log(u) + 0.5L * log4pi);
}
double g1_rem(double u) {
  if (u > 4000) return hankel_dlog_s(u);
  return g1(u) - 2 + 1.5 / u;
}

double integrate01(const std::function<double(double)>& f) {
  boost::math::quadrature::tanh_sinh<double> q;
  // the integrands are at worst O(u^{-2/3}) near 0, so (0, 1e-30) adds under 1e-10
  return q.integrate([&](double u) { return u < 1e-30 ? 0.0 : f(u); }, 0.0, 1.0);
}
double integrate1inf(const std::function<double(double)>& f) {
  boost::math::quadrature::exp_sinh<double> q;
  return q.integrate([&](double t) { return f(1 + t); });
}

// sigma < 1, a = 1/sigma
double oracle_g00(double sigma) {
  const double a = 1 / sigma;
  return integrate01([&](double u) { return g(u) * std::pow(u, -a - 1); }) +
         integrate1inf([&](double u) { return g_rem(u) * std::pow(u, -a - 1); }) + 2 / (a - 1) - 1.5 / (a * a) -
         0.5 * log4pi / a;
}
double oracle_g01(double sigma) {
  const double a = 1 / sigma;
  return integrate01([&](double u) { return g1(u) * std::pow(u, -a); }) +
         integrate1inf([&](double u) { return g1_rem(u) * std::pow(u, -a); }) + 2 / (a - 1) - 1.5 / a;
}
// sigma = 1 with g_* = g - 2u on u > 1
double oracle_g00_star() {
  return integrate01([](double u) { return g(u) / (u * u); }) +
         integrate1inf([](double u) { return g_rem(u) / (u * u); }) - 1.5 - 0.5 * log4pi;
}
double oracle_g01_star() {
  return integrate01([](double u) { return g1(u) / u; }) + integrate1inf([](double u) { return g1_rem(u) / u; }) -
         1.5;
}

}  // namespace

TEST_CASE("g integrals against an independent quadrature") {
  for (double sigma : {0.6, 0.75, 0.9}) {
    const auto& t = asymconst::expansion_constants(sigma);
    CHECK(t.g[0][0] == doctest::Approx(oracle_g00(sigma)).epsilon(1e-9));
    CHECK(t.g[0][1] == doctest::Approx(oracle_g01(sigma)).epsilon(1e-9));
    CHECK(t.g_err[0][0] <= 1e-9 * std::abs(t.g[0][0]));
  }
  const auto& one = asymconst::expansion_constants(1.0);
  CHECK(one.g[0][0] == doctest::Approx(oracle_g00_star()).epsilon(1e-9));
  CHECK(one.g[0][1] == doctest::Approx(oracle_g01_star()).epsilon(1e-9));
}

TEST_CASE("integration by parts relations") {
  for (double sigma : {0.6, 0.75, 0.9}) {
    const auto& t = asymconst::expansion_constants(sigma);
    // boundary terms vanish, so g00 = sigma g01 (and likewise with a log weight)
    CHECK(t.g[0][0] == doctest::Approx(sigma * t.g[0][1]).epsilon(1e-10));
    CHECK(t.g[0][0] != doctest::Approx(t.g[0][1] / sigma).epsilon(1e-3));
    // the y-route: u = y^{-sigma}
    CHECK(t.a0 == doctest::Approx(t.g[0][0] / sigma).epsilon(1e-10));
  }
  const auto& one = asymconst::expansion_constants(1.0);
  CHECK(one.g[0][1] == doctest::Approx(2 + one.g[0][0]).epsilon(1e-10));
  CHECK(one.a0 == doctest::Approx(one.g[0][0]).epsilon(1e-10));
}

TEST_CASE("sigma < 1 closed forms") {
  for (double sigma : {0.6, 0.75, 0.9}) {
    const auto& t = asymconst::expansion_constants(sigma);
    CHECK(t.X == doctest::Approx((1 - sigma) / sigma * t.g[0][1]));
    CHECK(t.B_sigma == doctest::Approx(std::pow(t.X, -sigma / (1 - sigma))));
    CHECK(t.A_sigma == doctest::Approx((1 - sigma) * t.B_sigma));
    CHECK(t.A1_slope == doctest::Approx(sigma / (1 - sigma)));
  }
}

TEST_CASE("sigma = 1 constants: two routes to A") {
  const auto& one = asymconst::expansion_constants(1.0);
  CHECK(one.A == doctest::Approx(one.A_closed).epsilon(1e-10));
  CHECK(one.a1_chain == doctest::Approx(one.a1_closed).epsilon(1e-10));
  const auto lam = asymconst::crosscheck_two_routes();
  CHECK(lam.a_via_g == doctest::Approx(lam.a_via_h).epsilon(1e-9));
  CHECK(lam.log2_piece == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK(lam.a_via_g == doctest::Approx(one.A).epsilon(1e-9));
}

TEST_CASE("corrected second-order intercept matches the saddle values at large tau") {
  // implied intercept: the value that makes the two-term expansion exact at tau;
  // it drifts as O((log log tau)^2 / log tau), so only large tau discriminates
  for (double sigma : {0.75, 0.8}) {
    const auto& t = asymconst::expansion_constants(sigma);
    for (double tau : {1e4, 1e5}) {
      const auto e = density::tail(saddle::config_for_tau(sigma, tau), tau, {density::Method::saddle});
      const double L = std::log(tau);
      const double r1 = e.log_phi_saddle / density::asymptotic_log_tail(sigma, tau, 1);
      const double implied = L * (r1 - 1) - t.A1_slope * std::log(L);
      CHECK(std::abs(implied - t.A1_intercept) < std::abs(implied - t.A1_intercept_printed));
    }
  }
}

TEST_CASE("sigma outside the supported range") {
  CHECK_THROWS_AS(asymconst::expansion_constants(0.5), DomainError);
  CHECK_THROWS_AS(asymconst::g_integral(0.8, 3, 0), DomainError);
}
