#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "eulerlab/euler.hpp"
#include "eulerlab/measures.hpp"
#include "eulerlab/primes.hpp"

using namespace eulerlab;
using std::numbers::pi;

namespace {

template <class T, class F>
T simpson(F&& f, int m = 100000) {
  const double h = pi / m;
  T s = f(0.0) + f(pi);
  for (int k = 1; k < m; ++k) s += double(k % 2 ? 4 : 2) * f(k * h);
  return s * (h / 3);
}

// E[exp(2 s lambda)] under the Plancherel measure, straight from the definitions.
Complex brute_mgf(double p, double sigma, Complex s) {
  const double x = std::pow(p, -sigma);
  return simpson<Complex>([&](double t) {
    const double two_lambda = -std::log(1 - 2 * x * std::cos(t) + x * x);
    return std::exp(s * two_lambda) * measures::plancherel_density(1 / p, t);
  });
}

euler::ModelConfig none_config(double sigma, std::uint64_t P) {
  euler::ModelConfig c;
  c.sigma = sigma;
  c.prime_cutoff = P;
  c.tail_mode = euler::TailMode::none;
  return c;
}

}  // namespace

TEST_CASE("lambda is minus half log |1 - x e^{i theta}|^2") {
  for (double t : {0.0, 1.0, 2.5}) {
    const double x = std::pow(3.0, -0.7);
    CHECK(2 * euler::lambda_theta(3.0, 0.7, t) == doctest::Approx(-std::log(1 - 2 * x * std::cos(t) + x * x)));
  }
}

TEST_CASE("local mgf against brute quadrature") {
  for (double p : {2.0, 5.0, 31.0})
    for (Complex s : {Complex(0.5, 0.0), Complex(3.0, 2.0), Complex(-0.3, 7.0), Complex(20.0, -15.0)}) {
      const Complex want = brute_mgf(p, 0.8, s);
      const Complex got = euler::local_mgf(p, 0.8, s).value();
      CHECK(std::abs(got - want) <= 1e-10 * std::abs(want));
    }
}

TEST_CASE("local cumulants against brute moments") {
  const double p = 7.0, sigma = 0.75, kappa = 3.0;
  const double x = std::pow(p, -sigma), q = 1 / p;
  auto two_lambda = [&](double t) { return 2 * euler::lambda_theta(p, sigma, t); };
  auto w = [&](double t) { return std::exp(kappa * two_lambda(t)) * measures::plancherel_density(q, t); };
  const double z = simpson<double>(w);
  const double m1 = simpson<double>([&](double t) { return two_lambda(t) * w(t); }) / z;
  const double m2 = simpson<double>([&](double t) { return std::pow(two_lambda(t) - m1, 2) * w(t); }) / z;
  const auto lm = euler::local_moments(x, q, kappa, 64);
  CHECK(lm.log_f == doctest::Approx(std::log(z)).epsilon(1e-12));
  CHECK(lm.k[1] == doctest::Approx(m1).epsilon(1e-11));
  CHECK(lm.k[2] == doctest::Approx(m2).epsilon(1e-10));
}

TEST_CASE("truncated model is the sum of local factors") {
  const auto cfg = none_config(0.8, 100);
  const auto t = primes::sieve(100);
  for (double kappa : {-4.0, 0.0, 2.0, 30.0}) {
    double want = 0;
    for (auto p : t.primes) want += std::log(brute_mgf(p, 0.8, kappa).real());
    CHECK(euler::cgf(cfg, kappa, 0).f(0) == doctest::Approx(want).epsilon(1e-11));
  }
  CHECK(euler::Model(cfg).exact_prime_count() == t.primes.size());
}

TEST_CASE("derivatives agree with finite differences") {
  for (auto mode : {euler::TailMode::none, euler::TailMode::analytic}) {
    euler::ModelConfig cfg;
    cfg.sigma = 0.8;
    cfg.tail_mode = mode;
    for (double kappa : {0.0, 1.0, 10.0, 100.0}) {
      const double h = 1e-3 * std::max(1.0, kappa);
      const auto r = euler::cgf(cfg, kappa, 2);
      const auto rp = euler::cgf(cfg, kappa + h, 2), rm = euler::cgf(cfg, kappa - h, 2);
      CHECK((rp.f(0) - rm.f(0)) / (2 * h) == doctest::Approx(r.f(1)).epsilon(1e-6));
      CHECK((rp.f(1) - rm.f(1)) / (2 * h) == doctest::Approx(r.f(2)).epsilon(1e-6));
      CHECK(r.f(2) > 0);
    }
    CHECK(std::abs(euler::cgf(cfg, 0.0, 0).f(0)) <= 1e-12);
  }
}

TEST_CASE("analytic tail reproduces the omitted primes") {
  auto cfg_small = [](std::uint64_t P) {
    euler::ModelConfig c;
    c.sigma = 0.8;
    c.prime_cutoff = P;
    return c;
  };
  for (double kappa : {2.0, 20.0}) {
    const auto a = euler::cgf(cfg_small(10000), kappa, 1);
    const auto b = euler::cgf(cfg_small(200000), kappa, 1);
    CHECK(std::abs(a.f(0) - b.f(0)) <= a.truncation_error_bound);
    CHECK(a.truncation_error_bound <= 1e-4 * std::abs(a.f(0)));
  }
}

TEST_CASE("smoothed tail agrees with an exact cutoff") {
  euler::ModelConfig exact;
  exact.sigma = 1.0;
  exact.prime_cutoff = 400000;
  euler::ModelConfig smooth;
  smooth.sigma = 1.0;
  smooth.prime_cutoff = 10000;
  smooth.tail_mode = euler::TailMode::smoothed;
  smooth.smooth_limit = 400000;
  for (double kappa : {100.0, 5000.0}) {
    const auto a = euler::cgf(exact, kappa, 2), b = euler::cgf(smooth, kappa, 2);
    CHECK(b.f(0) == doctest::Approx(a.f(0)).epsilon(1e-3));
    CHECK(b.f(1) == doctest::Approx(a.f(1)).epsilon(1e-3));
  }
}

TEST_CASE("characteristic ratio") {
  euler::ModelConfig cfg;
  cfg.sigma = 0.9;
  const auto model = euler::model_for(cfg);
  for (double kappa : {0.0, 5.0}) {
    CHECK(std::abs(model->mgf_ratio(kappa, 0.0) - Complex(1.0, 0.0)) <= 1e-14);
    for (double v : {0.3, 4.0, 40.0}) {
      const Complex r = model->mgf_ratio(kappa, v);
      CHECK(std::abs(r) <= 1.0 + 1e-14);
      CHECK(std::abs(model->mgf_ratio(kappa, -v) - std::conj(r)) <= 1e-13);
      const auto t = model->tilted(kappa);
      CHECK(t.log_ratio(v).log_modulus == doctest::Approx(model->log_mgf_ratio(kappa, v).log_modulus).epsilon(1e-10));
    }
  }
}

TEST_CASE("ratio of a small product against brute quadrature") {
  const auto cfg = none_config(0.7, 100);
  const double kappa = 2.0;
  for (double v : {0.5, 3.0, 9.0}) {
    Complex want = 1.0;
    for (auto p : primes::sieve(100).primes)
      want *= brute_mgf(p, 0.7, Complex(kappa, v)) / brute_mgf(p, 0.7, kappa);
    CHECK(std::abs(euler::mgf_ratio(cfg, kappa, v) - want) <= 1e-10 * std::max(1e-3, std::abs(want)));
  }
}

TEST_CASE("configuration checks") {
  euler::ModelConfig c;
  c.sigma = 0.8;
  CHECK_THROWS_AS(euler::cgf(c, 2 * c.s_limit(), 0), DomainError);
  c.sigma = 0.4;
  CHECK_THROWS_AS(c.validate(), DomainError);
  const auto big = euler::ModelConfig::for_range(1.0, 1e7);
  CHECK(big.tail_mode == euler::TailMode::smoothed);
  CHECK(big.s_limit() >= 1e7);
  const auto mid = euler::ModelConfig::for_range(0.8, 100.0);
  CHECK(mid.tail_mode == euler::TailMode::analytic);
  CHECK(mid.s_limit() >= 100.0);
  CHECK(euler::tail_mode_from_string(euler::to_string(euler::TailMode::smoothed)) == euler::TailMode::smoothed);
}
