#include "eulerlab/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <memory>
#include <numbers>

#include "eulerlab/asymconst.hpp"
#include "eulerlab/density.hpp"
#include "eulerlab/euler.hpp"
#include "eulerlab/measures.hpp"
#include "eulerlab/montecarlo.hpp"
#include "eulerlab/saddle.hpp"
#include "eulerlab/specfun.hpp"

namespace eulerlab::verification {

namespace {

using euler::ModelConfig;
using euler::TailMode;

// Pinned tolerances.
constexpr double kBesselTol = 1e-10;      // relative to max(1, |I1(2u)/u|)
constexpr double kMomentTol = 1e-12;
constexpr double kPlancherelRate = 5.0;
constexpr double kFiniteDiffTol = 1e-6;
constexpr double kMcSigmas = 3.0;
constexpr std::size_t kMomentSamples = 1000000;
constexpr std::uint64_t kMomentCutoff = 541;  // 100 primes: 1e6 x 100 draws
constexpr double kRoundTripTol = 1e-9;
constexpr double kGuessFactor = 3.0;
constexpr double kInversionMomentTol = 1e-6;
constexpr double kTrendFactor = 10.0;
constexpr double kSaddleVsIntegrate = 0.5;
constexpr double kIdentityTol = 1e-8;
constexpr std::size_t kTailSamples = 100000;
constexpr std::uint64_t kTailCutoff = 1000;
constexpr std::size_t kEsseenSamples = 100000;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

ModelConfig truncated(double sigma, std::uint64_t cutoff) {
  ModelConfig c;
  c.sigma = sigma;
  c.prime_cutoff = cutoff;
  c.tail_mode = TailMode::none;
  return c;
}

ModelConfig standard(double sigma) {
  ModelConfig c;
  c.sigma = sigma;
  return c;
}

void check(CriterionResult& r, bool ok, const std::string& line) {
  r.details.push_back(std::string(ok ? "ok   " : "FAIL ") + line);
  if (!ok) r.pass = false;
}

void c1(CriterionResult& r) {
  const auto st = measures::AngleMeasure::sato_tate();
  for (double u : {0.1, 1.0, 5.0, 20.0}) {
    const double q = measures::expect(st, [u](double th) { return std::exp(2 * u * std::cos(th)); });
    const double b = specfun::bessel_i(1, 2 * u).real() / u;
    const double rel = std::abs(q - b) / std::max(1.0, std::abs(b));
    check(r, rel <= kBesselTol, fmt("u=%g quadrature=%.17g I1(2u)/u=%.17g rel=%.2e", u, q, b, rel));
  }
}

void c2(CriterionResult& r) {
  for (double p : {2.0, 5.0, 13.0, 101.0}) {
    const auto m = measures::AngleMeasure::plancherel(p);
    const double e1 = measures::expect(m, [](double th) { return std::cos(th); });
    const double e2 = measures::expect(m, [](double th) { return std::cos(th) * std::cos(th); });
    const double want = 0.25 * (1 + 1 / p);
    check(r, std::abs(e1) <= kMomentTol && std::abs(e2 - want) <= kMomentTol,
          fmt("p=%g E[cos]=%.3e E[cos^2]-(1+1/p)/4=%.3e", p, e1, e2 - want));
  }
}

void c3(CriterionResult& r) {
  for (double p : {11.0, 101.0, 1009.0, 10007.0}) {
    double worst = 0.0;
    const int n = 4000;
    for (int i = 0; i <= n; ++i) {
      const double th = std::numbers::pi * i / n;
      const double s2 = std::sin(th) * std::sin(th);
      const double q = 1 / p;
      // density ratio mu_p / mu_inf, defined by continuity at the endpoints
      const double ratio = (1 + q) / ((1 - q) * (1 - q) + 4 * q * s2);
      worst = std::max(worst, std::abs(ratio - 1));
    }
    check(r, p * worst <= kPlancherelRate, fmt("p=%g p*max|ratio-1|=%.6f", p, p * worst));
  }
}

void c4(CriterionResult& r) {
  const ModelConfig cfg = standard(1.0);
  for (double k : {0.0, 1.0, 10.0, 100.0}) {
    const double h = 1e-3 * std::max(1.0, k);
    const auto c = euler::cgf(cfg, k, 2);
    const double fp = (euler::cgf(cfg, k + h, 0).f(0) - euler::cgf(cfg, k - h, 0).f(0)) / (2 * h);
    const double fpp = (euler::cgf(cfg, k + h, 1).f(1) - euler::cgf(cfg, k - h, 1).f(1)) / (2 * h);
    const double e1 = std::abs(fp - c.f(1)) / std::abs(c.f(1));
    const double e2 = std::abs(fpp - c.f(2)) / std::abs(c.f(2));
    check(r, e1 <= kFiniteDiffTol && e2 <= kFiniteDiffTol && c.f(2) > 0,
          fmt("kappa=%g f''=%.6e rel fd err f'=%.2e f''=%.2e", k, c.f(2), e1, e2));
  }
  const ModelConfig mc = truncated(1.0, kMomentCutoff);
  const auto set = montecarlo::sample_log_l(mc, 20240401, kMomentSamples);
  for (double k : {0.5, 1.0, 2.0}) {
    const auto e = montecarlo::moment_estimate(set, k);
    const double F = std::exp(euler::cgf(mc, k, 0).f(0));
    const double z = (e.value - F) / e.std_error;
    check(r, std::abs(z) <= kMcSigmas,
          fmt("kappa=%g exp(f)=%.8f MC=%.8f se=%.2e z=%.2f (P=%llu, n=%zu)", k, F, e.value, e.std_error, z,
              (unsigned long long)kMomentCutoff, kMomentSamples));
  }
}

void c5(CriterionResult& r) {
  for (double sigma : {0.8, 1.0}) {
    const ModelConfig cfg = standard(sigma);
    for (double k0 : {0.5, 5.0, 50.0}) {
      const double tau = euler::cgf(cfg, k0, 1).f(1);
      const auto sol = saddle::solve_saddle(cfg, tau);
      const double res = std::abs(euler::cgf(cfg, sol.kappa, 1).f(1) - tau);
      check(r, res <= kRoundTripTol * std::max(1.0, tau),
            fmt("sigma=%g kappa0=%g kappa_hat=%.12g residual=%.2e", sigma, k0, sol.kappa, res));
    }
  }
  const double t6 = saddle::tau_from_t(6.0);
  for (auto [sigma, tau] : {std::pair{0.75, 30.0}, std::pair{1.0, t6}}) {
    const auto sol = saddle::solve_saddle(saddle::config_for_tau(sigma, tau), tau);
    const double g = saddle::saddle_guess(sigma, tau, 2);
    const double ratio = g / sol.kappa;
    check(r, ratio <= kGuessFactor && ratio >= 1 / kGuessFactor,
          fmt("sigma=%g tau=%.6g kappa_hat=%.6g guess(N=2)=%.6g ratio=%.4f", sigma, tau, sol.kappa, g, ratio));
  }
}

void c6(CriterionResult& r) {
  for (double sigma : {0.6, 0.8, 1.0})
    for (double tau : {5.0, 20.0}) {
      try {
        const density::Inversion inv(saddle::config_for_tau(sigma, tau), tau);
        const auto m = density::tilted_moments(inv);
        check(r, std::abs(m.mass - 1) <= kInversionMomentTol && std::abs(m.mean) <= kInversionMomentTol,
              fmt("sigma=%g tau=%g kappa=%.6g mass-1=%.2e mean=%.2e", sigma, tau, inv.kappa(), m.mass - 1, m.mean));
      } catch (const std::exception& e) {
        check(r, false, fmt("sigma=%g tau=%g: %s", sigma, tau, e.what()));
      }
    }
}

void c7(CriterionResult& r) {
  double prev = INFINITY;
  double last = 0.0, kappa = 0.0;
  for (double tau : {10.0, 20.0, 40.0}) {
    const density::Inversion inv(saddle::config_for_tau(0.8, tau), tau);
    const double dev = std::abs(inv.density(0.0) * std::sqrt(inv.variance()) - 1);
    check(r, dev < prev, fmt("tau=%g kappa=%.6g |N(0)sqrt(f'')-1|=%.4e", tau, inv.kappa(), dev));
    prev = dev;
    last = dev;
    kappa = inv.kappa();
  }
  const double scale = kTrendFactor * std::pow(kappa, -1 / (2 * 0.8)) * std::sqrt(std::log(kappa));
  check(r, last <= scale, fmt("tau=40 deviation %.4e <= 10 kappa^(-1/(2 sigma)) sqrt(log kappa) = %.4e", last, scale));
}

void c8(CriterionResult& r) {
  double d[2];
  int i = 0;
  for (double tau : {20.0, 40.0}) {
    const auto e = density::tail(saddle::config_for_tau(0.8, tau), tau,
                                 {density::Method::saddle, density::Method::integrate});
    d[i++] = std::abs(e.saddle_minus_integrated);
    check(r, std::isfinite(d[i - 1]),
          fmt("tau=%g log Phi saddle=%.17g integrate=%.17g |diff|=%.4e", tau, e.log_phi_saddle,
              e.log_phi_integrated, d[i - 1]));
  }
  check(r, d[0] <= kSaddleVsIntegrate, fmt("tau=20 |diff| %.4e <= 0.5", d[0]));
  check(r, d[1] < d[0], fmt("tau=40 |diff| %.4e < tau=20 |diff| %.4e", d[1], d[0]));
}

void c9(CriterionResult& r) {
  for (double sigma : {0.6, 0.75, 0.9}) {
    const auto& t = asymconst::expansion_constants(sigma);
    const double lhs = t.g[0][0], rhs = t.g[0][1] / sigma;
    check(r, std::abs(lhs - rhs) <= kIdentityTol,
          fmt("sigma=%g g00=%.12f g01/sigma=%.12f diff=%.3e (sigma*g01=%.12f)", sigma, lhs, rhs, lhs - rhs,
              sigma * t.g[0][1]));
  }
  const auto& one = asymconst::expansion_constants(1.0);
  check(r, std::abs(one.g[0][1] - 2 - one.g[0][0]) <= kIdentityTol,
        fmt("sigma=1 g01-(2+g00)=%.3e", one.g[0][1] - 2 - one.g[0][0]));
  const auto l = asymconst::crosscheck_two_routes();
  check(r, std::abs(l.a_via_g - l.a_via_h) <= kIdentityTol,
        fmt("A via g=%.15f via h=%.15f diff=%.3e", l.a_via_g, l.a_via_h, l.a_via_g - l.a_via_h));
}

// tau with log Phi_saddle = log(target) on the truncated model, by bisection.
double level_for(const ModelConfig& cfg, double target) {
  const double lt = std::log(target);
  double lo = euler::cgf(cfg, 0.0, 1).f(1) + 0.05, hi = lo + 1;
  auto lphi = [&](double tau) {
    return density::tail(cfg, tau, {density::Method::saddle}).log_phi_saddle;
  };
  while (lphi(hi) > lt) hi += 1;
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    (lphi(mid) > lt ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void c10(CriterionResult& r) {
  const ModelConfig cfg = truncated(0.8, kTailCutoff);
  {
    const double tau = level_for(cfg, 1e-6);
    const auto e = density::tail(cfg, tau, {density::Method::integrate});
    const double phi = std::exp(e.log_phi_integrated);
    const auto is = montecarlo::tilted_tail(cfg, tau, 977, kTailSamples);
    const double z = (is.phi() - phi) / is.std_error();
    check(r, std::abs(z) <= kMcSigmas,
          fmt("tau=%.6f Phi_integrate=%.6e tilted IS=%.6e se=%.2e z=%.2f (kappa=%.4g)", tau, phi, is.phi(),
              is.std_error(), z, is.kappa));
  }
  {
    const double tau = level_for(cfg, 1e-2);
    const auto e = density::tail(cfg, tau, {density::Method::integrate});
    const double phi = std::exp(e.log_phi_integrated);
    const auto set = montecarlo::sample_log_l(cfg, 983, kTailSamples);
    const auto p = montecarlo::empirical_tail(set, tau);
    const double z = (p.value - phi) / p.std_error;
    check(r, std::abs(z) <= kMcSigmas,
          fmt("tau=%.6f Phi_integrate=%.6e plain MC=%.6e se=%.2e z=%.2f", tau, phi, p.value, p.std_error, z));
  }
}

void c11(CriterionResult& r) {
  const ModelConfig cfg = truncated(1.0, kTailCutoff);
  const auto set = montecarlo::sample_log_l(cfg, 991, kEsseenSamples);
  const auto [mn, mx] = std::minmax_element(set.values.begin(), set.values.end());
  const density::StitchedDistribution model(cfg, *mn - 1, *mx + 1, 4001);
  const double ks = montecarlo::ks_distance(set.values, [&](double y) { return model.cdf(y); });
  const auto m = euler::model_for(cfg);
  auto tilt = std::make_shared<euler::Model::Tilted>(m->tilted(0.0));
  const montecarlo::CharFn model_cf = [tilt](double v) {
    return v == 0.0 ? Complex(1.0) : tilt->log_ratio(v).value();
  };
  const auto emp = montecarlo::empirical_cf(set);
  const double K = model.max_cdf_slope();
  double best = INFINITY, bestR = 0;
  for (double R : {10.0, 20.0, 40.0, 80.0}) {
    const double b = montecarlo::esseen_bound(emp, model_cf, K, R, 64);
    if (b < best) best = b, bestR = R;
  }
  check(r, ks <= best,
        fmt("sup|F_emp-F_model|=%.5f <= Esseen bound %.5f (K=%.4f, R=%g, n=%zu, model mass-1=%.1e)", ks, best, K,
            bestR, kEsseenSamples, model.mass() - 1));
}

}  // namespace

bool Report::all_pass() const {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
}

std::string title(int id) {
  static const char* t[] = {"",
                            "Bessel/Sato-Tate identity",
                            "Measure moments",
                            "Plancherel to Sato-Tate rate",
                            "CGF consistency",
                            "Saddle round-trip and guesses",
                            "Tilted density mass and mean",
                            "Gaussian approximation trend",
                            "Saddle closed form vs direct integration",
                            "Constants identities",
                            "Rare-tail validation",
                            "Esseen diagnostic",
                            "Full verify suite"};
  if (id < 1 || id > kCriteria) throw DomainError("unknown criterion");
  return t[id];
}

CriterionResult run_criterion(int id) {
  CriterionResult r;
  r.id = id;
  r.title = title(id);
  r.pass = true;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: c1(r); break;
      case 2: c2(r); break;
      case 3: c3(r); break;
      case 4: c4(r); break;
      case 5: c5(r); break;
      case 6: c6(r); break;
      case 7: c7(r); break;
      case 8: c8(r); break;
      case 9: c9(r); break;
      case 10: c10(r); break;
      case 11: c11(r); break;
      default: throw DomainError("criterion 12 is derived from a full run");
    }
  } catch (const std::exception& e) {
    check(r, false, std::string("error: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Report run_all(const std::function<void(const CriterionResult&)>& on_result) {
  Report rep;
  const auto t0 = std::chrono::steady_clock::now();
  for (int id = 1; id < kCriteria; ++id) {
    rep.results.push_back(run_criterion(id));
    if (on_result) on_result(rep.results.back());
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CriterionResult last;
  last.id = kCriteria;
  last.title = title(kCriteria);
  last.pass = true;
  int failed = 0;
  for (const auto& r : rep.results) failed += !r.pass;
  check(last, failed == 0, fmt("%d of %d criteria failed", failed, kCriteria - 1));
  check(last, rep.seconds <= kSuiteBudgetSeconds, fmt("wall time %.1f s (budget %.0f s)", rep.seconds, kSuiteBudgetSeconds));
  last.seconds = rep.seconds;
  rep.results.push_back(last);
  if (on_result) on_result(last);
  return rep;
}

std::string format_line(const CriterionResult& r) {
  return fmt("%s %2d %s (%.1f s)", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds);
}

}  // namespace eulerlab::verification
