#include "eulerlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eulerlab/measures.hpp"
#include "eulerlab/parallel.hpp"
#include "eulerlab/primes.hpp"
#include "eulerlab/quadrature.hpp"
#include "eulerlab/rng.hpp"
#include "eulerlab/saddle.hpp"

namespace eulerlab::montecarlo {

using euler::ModelConfig;
using std::numbers::pi;

namespace {

std::size_t sampled_primes(const ModelConfig& cfg) {
  return primes::shared_table(cfg.prime_cutoff)->count_upto(cfg.prime_cutoff);
}

// cos(theta) under mu_p: semicircle draw by disk rejection, then the
// Plancherel factor by rejection against its maximum (1+q)/(1-q)^2.
double plancherel_cos(CounterRng& g, double q) {
  while (true) {
    double u, v;
    do {
      u = 2 * g.uniform() - 1;
      v = 2 * g.uniform() - 1;
    } while (u * u + v * v >= 1.0);
    if (q == 0.0) return u;
    const double s2 = 1 - u * u;
    const double a = (1 - q) * (1 - q);
    if (g.uniform() * (a + 4 * q * s2) <= a) return u;
  }
}

Estimate mean_of(const std::vector<double>& v) {
  quad::Sum s;
  for (double x : v) s += x;
  const double n = double(v.size());
  const double m = s.value() / n;
  quad::Sum d2;
  for (double x : v) d2 += (x - m) * (x - m);
  return {m, std::sqrt(d2.value() / (n - 1) / n)};
}

}  // namespace

std::size_t max_samples(const ModelConfig& cfg) {
  return std::size_t(kDrawBudget / double(std::max<std::size_t>(1, sampled_primes(cfg))));
}

SampleSet sample_log_l(const ModelConfig& cfg, std::uint64_t seed, std::size_t n, double kappa) {
  cfg.validate();
  if (n < 2) throw DomainError("sample_log_l: need at least two samples");
  if (!std::isfinite(kappa)) throw DomainError("sample_log_l: kappa must be finite");
  const auto table = primes::shared_table(cfg.prime_cutoff);
  const std::size_t np = table->count_upto(cfg.prime_cutoff);
  if (double(n) * double(np) > kDrawBudget)
    throw DomainError("sample_log_l: n * primes exceeds the 1e8 draw budget (n <= " +
                      std::to_string(max_samples(cfg)) + ")");
  const double sigma = cfg.sigma;

  SampleSet s;
  s.cfg = cfg;
  s.seed = seed;
  s.n = n;
  s.kappa = kappa;
  s.primes = np;
  s.values.resize(n);

  std::vector<double> x(np), q(np);
  for (std::size_t j = 0; j < np; ++j) {
    const double p = table->primes[j];
    x[j] = std::pow(p, -sigma);
    q[j] = 1.0 / p;
  }

  if (kappa == 0.0) {
    parallel_for(n, [&](std::size_t i) {
      quad::Sum acc;
      for (std::size_t j = 0; j < np; ++j) {
        CounterRng g(seed, j, i);
        const double c = plancherel_cos(g, q[j]);
        acc += -std::log1p(x[j] * (x[j] - 2 * c));
      }
      s.values[i] = acc.value();
    });
  } else {
    std::vector<measures::AngleMeasure> tilted;
    tilted.reserve(np);
    for (std::size_t j = 0; j < np; ++j)
      tilted.push_back(measures::AngleMeasure::plancherel(table->primes[j]).tilted(sigma, kappa));
    parallel_for(np, [&](std::size_t j) { (void)tilted[j].inverse_table(); });
    quad::Sum ln;
    for (const auto& m : tilted) ln += m.log_normalizer();
    s.log_normalizer = ln.value();
    s.log_weights.resize(n);
    parallel_for(n, [&](std::size_t i) {
      quad::Sum acc, lw;
      for (std::size_t j = 0; j < np; ++j) {
        CounterRng g(seed, j, i);
        double dt = 0.0;
        const double th = tilted[j].inverse_table().theta(g.uniform(), &dt);
        acc += -std::log1p(x[j] * (x[j] - 2 * std::cos(th)));
        // proposal density is 1/T'(u); target is the tilted density
        lw += tilted[j].log_density(th) + std::log(dt);
      }
      s.values[i] = acc.value();
      s.log_weights[i] = lw.value();
    });
  }

  const double P = double(cfg.prime_cutoff);
  s.truncation_bias_bound =
      sigma > 1.0 ? 2 * primes::prime_power_tail(sigma, cfg.prime_cutoff) / (1 - std::pow(P, -sigma))
                  : std::numeric_limits<double>::infinity();
  if (2 * sigma > 1.001) {
    const double a = primes::prime_power_tail(2 * sigma, cfg.prime_cutoff);
    const double b = primes::prime_power_tail(2 * sigma + 1, cfg.prime_cutoff);
    s.truncation_mean_shift = -0.5 * a + 0.5 * b;
    s.truncation_rms = std::sqrt(a + b + s.truncation_mean_shift * s.truncation_mean_shift);
  }
  return s;
}

Estimate sample_mean(const SampleSet& s) {
  if (s.kappa != 0.0) throw DomainError("sample_mean: plain set required");
  return mean_of(s.values);
}

Estimate sample_variance(const SampleSet& s) {
  if (s.kappa != 0.0) throw DomainError("sample_variance: plain set required");
  const double m = mean_of(s.values).value;
  const double n = double(s.values.size());
  quad::Sum m2, m4;
  for (double x : s.values) {
    const double d = (x - m) * (x - m);
    m2 += d;
    m4 += d * d;
  }
  const double var = m2.value() / (n - 1);
  const double mu4 = m4.value() / n;
  return {var, std::sqrt(std::max(0.0, mu4 - var * var * (n - 3) / (n - 1)) / n)};
}

Estimate weighted_mean(const SampleSet& s) {
  if (s.log_weights.empty()) return sample_mean(s);
  const double lmax = *std::max_element(s.log_weights.begin(), s.log_weights.end());
  quad::Sum sw, swx;
  std::vector<double> w(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    w[i] = std::exp(s.log_weights[i] - lmax);
    sw += w[i];
    swx += w[i] * s.values[i];
  }
  const double m = swx.value() / sw.value();
  quad::Sum r2;
  for (std::size_t i = 0; i < s.n; ++i) {
    const double r = w[i] * (s.values[i] - m);
    r2 += r * r;
  }
  return {m, std::sqrt(r2.value()) / sw.value()};
}

Estimate moment_estimate(const SampleSet& s, double kappa) {
  if (s.kappa != 0.0) throw DomainError("moment_estimate: plain set required");
  std::vector<double> e(s.n);
  for (std::size_t i = 0; i < s.n; ++i) e[i] = std::exp(kappa * s.values[i]);
  return mean_of(e);
}

Estimate empirical_tail(const SampleSet& s, double tau) {
  if (s.kappa != 0.0) throw DomainError("empirical_tail: plain set required");
  std::size_t k = 0;
  for (double x : s.values) k += x > tau;
  const double n = double(s.n);
  const double p = k / n;
  return {p, std::sqrt(p * (1 - p) / n)};
}

double TiltedTail::phi() const { return std::exp(log_phi); }
double TiltedTail::std_error() const { return phi() * relative_stderr; }

TiltedTail tilted_tail(const ModelConfig& cfg, double tau, std::uint64_t seed, std::size_t n) {
  const auto sol = saddle::solve_saddle(cfg, tau);
  if (sol.kappa <= 0.0) throw DomainError("tilted_tail: tau must exceed f'(0)");
  const SampleSet s = sample_log_l(cfg, seed, n, sol.kappa);
  // Phi = F(kappa) E_q[w exp(-kappa X) 1{X > tau}]
  std::vector<double> lt;
  lt.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (s.values[i] > tau) lt.push_back(s.log_weights[i] - sol.kappa * s.values[i]);
  TiltedTail t;
  t.kappa = sol.kappa;
  if (lt.empty()) {
    t.log_phi = -std::numeric_limits<double>::infinity();
    t.relative_stderr = std::numeric_limits<double>::infinity();
    return t;
  }
  const double lmax = *std::max_element(lt.begin(), lt.end());
  quad::Sum s1, s2;
  for (double l : lt) {
    const double e = std::exp(l - lmax);
    s1 += e;
    s2 += e * e;
  }
  const double nn = double(n);
  const double mean = s1.value() / nn;
  const double var = std::max(0.0, s2.value() / nn - mean * mean) * nn / (nn - 1);
  t.log_phi = s.log_normalizer + lmax + std::log(mean);
  t.relative_stderr = std::sqrt(var / nn) / mean;
  t.effective_sample_size = s1.value() * s1.value() / s2.value();
  return t;
}

CharFn empirical_cf(const SampleSet& s) {
  if (s.kappa != 0.0) throw DomainError("empirical_cf: plain set required");
  auto vals = std::make_shared<std::vector<double>>(s.values);
  return [vals](double v) {
    quad::Sum re, im;
    for (double x : *vals) {
      re += std::cos(v * x);
      im += std::sin(v * x);
    }
    const double n = double(vals->size());
    return std::complex<double>(re.value() / n, im.value() / n);
  };
}

double esseen_bound(const CharFn& phi, const CharFn& psi, double K, double R, int panels) {
  if (!(R > 0) || !(K >= 0) || panels < 1) throw DomainError("esseen_bound: need R > 0, K >= 0");
  const auto& rule = quad::gauss_legendre(16);
  std::vector<double> part(panels);
  parallel_for(std::size_t(panels), [&](std::size_t k) {
    const double a = R * k / panels, b = R * (k + 1) / panels;
    quad::Sum s;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i];
      s += 0.5 * (b - a) * rule.weights[i] * std::abs(phi(v) - psi(v)) / v;
    }
    part[k] = s.value();
  });
  quad::Sum total;
  for (double p : part) total += p;
  return 2 / pi * total.value() + 24 * K / (pi * R);
}

double ks_distance(std::vector<double> v, const std::function<double(double)>& model_cdf) {
  std::sort(v.begin(), v.end());
  const double n = double(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double F = model_cdf(v[i]);
    d = std::max({d, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
  }
  return d;
}

}  // namespace eulerlab::montecarlo
