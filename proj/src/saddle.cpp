#include "eulerlab/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "eulerlab/asymconst.hpp"

namespace eulerlab::saddle {

using euler::ModelConfig;

namespace {

constexpr double kContract = 1e-9;
constexpr double kTarget = 1e-11;
constexpr int kMaxIterations = 200;
// Largest smoothing limit accepted by ModelConfig::validate, with margin.
constexpr double kLogMaxLimit = 0.99 * 250 * 2.302585092994046;

double log_guess(double sigma, double tau, int N) {
  const auto& c = asymconst::expansion_constants(sigma);
  if (sigma < 1.0) {
    const double L = std::log(tau), LL = std::log(L);
    double g = std::log(c.B_sigma) + sigma / (1 - sigma) * std::log(tau * L);
    if (N >= 2) {
      const double corr = 1 + (c.B1_slope * LL + c.B1_intercept) / L;
      if (!(corr > 0)) throw DomainError("saddle_guess: second-order factor is not positive at this tau");
      g += std::log(corr);
    }
    return g;
  }
  const double t = t_from_tau(tau);
  double g = t - 0.5 * c.g[0][1];
  if (N >= 2) {
    if (!(1 + c.b1 / t > 0)) throw DomainError("saddle_guess: second-order factor is not positive at this t");
    g += std::log1p(c.b1 / t);
  }
  return g;
}

}  // namespace

double tau_from_t(double t) { return 2 * std::log(t) + 2 * kEulerGamma; }
double t_from_tau(double tau) { return std::exp(0.5 * tau - kEulerGamma); }

bool guess_valid(double sigma, double tau) {
  return sigma < 1.0 ? tau >= 3.0 : t_from_tau(tau) >= 2.0;
}

double saddle_guess(double sigma, double tau, int N) {
  if (N < 1 || N > 2) throw DomainError("saddle_guess: N must be 1 or 2");
  if (!(sigma > 0.5 && sigma <= 1.0)) throw DomainError("saddle_guess: sigma outside (1/2, 1]");
  if (!guess_valid(sigma, tau))
    throw DomainError(sigma < 1.0 ? "saddle_guess: requires tau >= 3" : "saddle_guess: requires t >= 2");
  return std::exp(log_guess(sigma, tau, N));
}

ModelConfig config_for_tau(double sigma, double tau) {
  double log_kappa;
  if (tau > 0 && guess_valid(sigma, tau)) {
    log_kappa = log_guess(sigma, tau, 1);
  } else {
    // Moderate levels: the Gaussian scale of a reference model bounds kappa.
    ModelConfig ref;
    ref.sigma = sigma;
    const auto r = euler::cgf(ref, 0.0, 2);
    log_kappa = std::log(std::max(1.0, std::abs(tau - r.f(1)) / r.f(2)));
    if (tau < 0) log_kappa += std::log(std::max(1.0, -tau));
  }
  const double log_s = log_kappa + std::log(10.0);
  if (std::log(4.0) + log_s > sigma * kLogMaxLimit)
    throw NumericError("saddle point near exp(" + std::to_string(log_kappa) +
                       ") is beyond any representable model cutoff");
  return ModelConfig::for_range(sigma, std::exp(log_s));
}

SaddleSolution solve_saddle(const ModelConfig& cfg, double tau) {
  if (!std::isfinite(tau)) throw DomainError("solve_saddle: tau must be finite");
  const auto model = euler::model_for(cfg);
  SaddleSolution out;
  out.tau = tau;

  const auto r0 = model->cgf(0.0, 2);
  const double f1_0 = r0.f(1);
  if (std::abs(tau - f1_0) <= 1e-12) {
    out.residual = std::abs(tau - f1_0);
    out.guess_source = "degenerate";
    return out;
  }
  const double dir = tau > f1_0 ? 1.0 : -1.0;
  const double limit = std::min(model->s_limit(), 1e300);
  const double tol = kTarget * std::max(1.0, std::abs(tau));

  double guess;
  if (dir > 0 && guess_valid(cfg.sigma, tau)) {
    try {
      guess = saddle_guess(cfg.sigma, tau, 2);
    } catch (const DomainError&) {
      guess = saddle_guess(cfg.sigma, tau, 1);
    }
    out.guess_source = "asymptotic";
  } else {
    guess = (tau - f1_0) / r0.f(2);
    out.guess_source = "gaussian";
  }
  guess = std::min(std::abs(guess), limit);
  out.guess_used = dir * guess;

  // g(m) = dir * (f'(dir m) - tau) is increasing in the magnitude m >= 0.
  auto eval = [&](double m) {
    const auto r = model->cgf(dir * m, 2);
    return std::pair{r.f(1), r.f(2)};
  };
  double lo = 0.0, hi = std::min(10 * guess, limit);
  double m = std::clamp(guess, guess / 10, hi);
  {
    const double a = guess / 10;
    auto [fa, _] = eval(a);
    if (dir * (fa - tau) < 0) lo = a;
    auto [fb, __] = eval(hi);
    while (dir * (fb - tau) < 0) {
      if (hi >= limit)
        throw NumericError("solve_saddle: bracketing failure, tau = " + std::to_string(tau) +
                           " is beyond f' on the model range |kappa| <= " + std::to_string(limit));
      lo = hi;
      hi = std::min(10 * hi, limit);
      std::tie(fb, std::ignore) = eval(hi);
    }
  }

  for (int it = 1; it <= kMaxIterations; ++it) {
    auto [f1, f2] = eval(m);
    out.iterations = it;
    const double res = f1 - tau;
    if (dir * res < 0) lo = std::max(lo, m);
    else hi = std::min(hi, m);
    TraceStep step{dir * m, f1, dir * lo, dir * hi, true};
    out.kappa = dir * m;
    out.residual = std::abs(res);
    if (std::abs(res) <= tol) {
      out.trace.push_back(step);
      break;
    }
    double next = m - res / (dir * f2);
    if (!(next > lo && next < hi) || !(f2 > 0)) {
      next = (lo > 0 && hi / lo > 4) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
      step.newton = false;
    }
    out.trace.push_back(step);
    if (next == m || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) break;
    m = next;
  }
  if (out.residual > kContract * std::max(1.0, std::abs(tau)))
    throw NumericError("solve_saddle: residual " + std::to_string(out.residual) + " above contract");
  return out;
}

}  // namespace eulerlab::saddle
