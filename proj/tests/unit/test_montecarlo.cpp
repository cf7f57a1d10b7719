#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "eulerlab/density.hpp"
#include "eulerlab/euler.hpp"
#include "eulerlab/montecarlo.hpp"
#include "eulerlab/primes.hpp"

using namespace eulerlab;

namespace {

euler::ModelConfig truncated(double sigma, std::uint64_t P) {
  euler::ModelConfig c;
  c.sigma = sigma;
  c.prime_cutoff = P;
  c.tail_mode = euler::TailMode::none;
  return c;
}

}  // namespace

TEST_CASE("draw budget") {
  const auto cfg = truncated(1.0, 1000);
  CHECK(montecarlo::max_samples(cfg) == std::size_t(1e8 / 168));
  CHECK_THROWS_AS(montecarlo::sample_log_l(cfg, 1, montecarlo::max_samples(cfg) + 1), DomainError);
}

TEST_CASE("plain samples reproduce the cumulants") {
  const auto cfg = truncated(0.8, 1000);
  const auto s = montecarlo::sample_log_l(cfg, 17, 400000);
  const auto r = euler::cgf(cfg, 0.0, 2);
  const auto m = montecarlo::sample_mean(s), v = montecarlo::sample_variance(s);
  CHECK(std::abs(m.value - r.f(1)) <= 4 * m.std_error);
  CHECK(std::abs(v.value - r.f(2)) <= 4 * v.std_error);
  for (double kappa : {0.5, 1.0}) {
    const auto e = montecarlo::moment_estimate(s, kappa);
    CHECK(std::abs(e.value - std::exp(euler::cgf(cfg, kappa, 0).f(0))) <= 4 * e.std_error);
  }
  CHECK(s.primes == 168);
}

TEST_CASE("tilted samples reproduce the tilted mean") {
  const auto cfg = truncated(0.8, 1000);
  const double kappa = 4.0;
  const auto s = montecarlo::sample_log_l(cfg, 5, 100000, kappa);
  const auto r = euler::cgf(cfg, kappa, 2);
  CHECK(s.log_normalizer == doctest::Approx(r.f(0)).epsilon(1e-12));
  const auto w = montecarlo::weighted_mean(s);
  CHECK(std::abs(w.value - r.f(1)) <= 4 * w.std_error);
  REQUIRE(s.log_weights.size() == s.n);
  double mean_w = 0;
  for (double l : s.log_weights) mean_w += std::exp(l);
  mean_w /= double(s.n);
  CHECK(mean_w == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("importance sampling matches the inversion tail") {
  const auto cfg = truncated(0.8, 1000);
  const double tau = 3.0;
  const auto ref = std::exp(density::tail(cfg, tau, {density::Method::integrate}).log_phi_integrated);
  const auto is = montecarlo::tilted_tail(cfg, tau, 3, 50000);
  CHECK(std::abs(is.phi() - ref) <= 4 * is.std_error());
  CHECK(is.relative_stderr < 0.05);
  CHECK(is.effective_sample_size > 1000);
  CHECK_THROWS_AS(montecarlo::tilted_tail(cfg, -1.0, 3, 1000), DomainError);
}

TEST_CASE("samples do not depend on the thread count") {
  const auto cfg = truncated(1.0, 1000);
  setenv("EULERLAB_THREADS", "1", 1);
  const auto a = montecarlo::sample_log_l(cfg, 99, 5000, 2.0);
  setenv("EULERLAB_THREADS", "7", 1);
  const auto b = montecarlo::sample_log_l(cfg, 99, 5000, 2.0);
  unsetenv("EULERLAB_THREADS");
  CHECK(a.values == b.values);
  CHECK(a.log_weights == b.log_weights);
  CHECK(montecarlo::sample_log_l(cfg, 100, 5000).values != montecarlo::sample_log_l(cfg, 99, 5000).values);
}

TEST_CASE("truncation summary") {
  const auto cfg = truncated(0.9, 1000);
  const auto s = montecarlo::sample_log_l(cfg, 1, 100);
  CHECK(std::isinf(s.truncation_bias_bound));
  const double a = primes::prime_power_tail(1.8, 1000), b = primes::prime_power_tail(2.8, 1000);
  CHECK(s.truncation_mean_shift == doctest::Approx(-0.5 * a + 0.5 * b));
  CHECK(s.truncation_rms >= std::sqrt(a));
}

TEST_CASE("Kolmogorov distance") {
  // a perfect uniform grid is 1/(2n) from the uniform cdf at best; this one sits on the left ends
  std::vector<double> u(100);
  for (int i = 0; i < 100; ++i) u[i] = i / 100.0;
  CHECK(montecarlo::ks_distance(u, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.01));
}

TEST_CASE("Esseen bound dominates the Kolmogorov distance") {
  const auto cfg = truncated(1.0, 1000);
  const auto s = montecarlo::sample_log_l(cfg, 8, 20000);
  const density::StitchedDistribution model(cfg, -4.0, 4.5, 1601);
  const auto model_cf = [&](double v) { return euler::mgf_ratio(cfg, 0.0, v); };
  const double bound = montecarlo::esseen_bound(montecarlo::empirical_cf(s), model_cf, model.max_cdf_slope(), 20.0, 64);
  auto sorted = s.values;
  std::sort(sorted.begin(), sorted.end());
  const double ks = montecarlo::ks_distance(sorted, [&](double y) {
    if (y <= model.lo()) return model.lower_tail_mass();
    if (y >= model.hi()) return 1 - model.upper_tail_mass();
    return model.cdf(y);
  });
  CHECK(ks <= bound);
  CHECK(ks <= 1.63 / std::sqrt(20000.0));
  CHECK_THROWS_AS(montecarlo::esseen_bound(model_cf, model_cf, 1.0, 0.0), DomainError);
}
