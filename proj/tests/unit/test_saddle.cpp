#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "eulerlab/euler.hpp"
#include "eulerlab/saddle.hpp"

using namespace eulerlab;

namespace {

// Plain bisection on f' - tau; slow but independent of the solver.
double bisect_kappa(const euler::ModelConfig& cfg, double tau, double lo, double hi) {
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::abs(hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (euler::cgf(cfg, mid, 1).f(1) < tau ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

euler::ModelConfig config(double sigma) {
  euler::ModelConfig c;
  c.sigma = sigma;
  return c;
}

}  // namespace

TEST_CASE("t parametrisation") {
  for (double t : {0.5, 2.0, 6.0, 1e5}) CHECK(saddle::t_from_tau(saddle::tau_from_t(t)) == doctest::Approx(t));
  CHECK(saddle::tau_from_t(1.0) == doctest::Approx(2 * 0.5772156649015329));
}

TEST_CASE("round trip through f'") {
  for (double sigma : {0.6, 0.8, 1.0}) {
    const auto cfg = config(sigma);
    for (double k0 : {0.5, 5.0, 50.0}) {
      const double tau = euler::cgf(cfg, k0, 1).f(1);
      const auto s = saddle::solve_saddle(cfg, tau);
      CHECK(std::abs(euler::cgf(cfg, s.kappa, 1).f(1) - tau) <= 1e-9 * std::max(1.0, tau));
      CHECK(s.kappa == doctest::Approx(k0).epsilon(1e-8));
    }
  }
}

TEST_CASE("solver agrees with bisection") {
  for (double tau : {2.0, 6.0, 12.0}) {
    const auto cfg = saddle::config_for_tau(0.75, tau);
    const auto s = saddle::solve_saddle(cfg, tau);
    CHECK(s.kappa == doctest::Approx(bisect_kappa(cfg, tau, 1e-6, cfg.s_limit())).epsilon(1e-9));
    CHECK(s.residual <= 1e-9 * std::max(1.0, tau));
  }
}

TEST_CASE("levels below the mean give negative tilts") {
  const auto cfg = config(0.9);
  const double mean = euler::cgf(cfg, 0.0, 1).f(1);
  const auto s = saddle::solve_saddle(cfg, mean - 3.0);
  CHECK(s.kappa < 0);
  CHECK(s.kappa == doctest::Approx(bisect_kappa(cfg, mean - 3.0, -cfg.s_limit(), -1e-6)).epsilon(1e-9));
  const auto d = saddle::solve_saddle(cfg, mean);
  CHECK(d.kappa == 0.0);
  CHECK(d.guess_source == "degenerate");
}

TEST_CASE("trace stays inside a shrinking bracket") {
  const auto cfg = config(0.8);
  const auto s = saddle::solve_saddle(cfg, 8.0);
  REQUIRE(!s.trace.empty());
  double width = INFINITY;
  for (const auto& st : s.trace) {
    CHECK(st.lo <= st.kappa);
    CHECK(st.kappa <= st.hi);
    CHECK(st.hi - st.lo <= width * (1 + 1e-12));
    width = st.hi - st.lo;
  }
}

TEST_CASE("asymptotic guesses are within a factor 3 and improve with tau") {
  CHECK(saddle::guess_valid(0.75, 30.0));
  CHECK_FALSE(saddle::guess_valid(0.75, 2.0));
  const double k30 = saddle::solve_saddle(saddle::config_for_tau(0.75, 30.0), 30.0).kappa;
  const double g30 = saddle::saddle_guess(0.75, 30.0);
  CHECK(g30 / k30 <= 3.0);
  CHECK(k30 / g30 <= 3.0);
  const double tau6 = saddle::tau_from_t(6.0);
  const double k6 = saddle::solve_saddle(saddle::config_for_tau(1.0, tau6), tau6).kappa;
  const double g6 = saddle::saddle_guess(1.0, tau6);
  CHECK(std::max(g6 / k6, k6 / g6) <= 3.0);
  double prev = INFINITY;
  for (double tau : {20.0, 30.0, 60.0, 100.0}) {
    const double k = saddle::solve_saddle(saddle::config_for_tau(0.75, tau), tau).kappa;
    const double err = std::abs(std::log(saddle::saddle_guess(0.75, tau, 2) / k));
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("infeasible and invalid requests") {
  CHECK_THROWS_AS(saddle::config_for_tau(1.0, 20.0), NumericError);
  CHECK_THROWS_AS(saddle::saddle_guess(0.75, 1.0), DomainError);
  CHECK_THROWS_AS(saddle::saddle_guess(0.75, 30.0, 3), DomainError);
  euler::ModelConfig small;
  small.sigma = 0.8;
  small.prime_cutoff = 100;
  CHECK_THROWS_AS(saddle::solve_saddle(small, 40.0), NumericError);
}

TEST_CASE("automatic configuration covers the saddle") {
  for (double tau : {-5.0, 1.0, 10.0, 40.0}) {
    const auto cfg = saddle::config_for_tau(0.8, tau);
    const auto s = saddle::solve_saddle(cfg, tau);
    CHECK(std::abs(s.kappa) <= cfg.s_limit());
  }
}
