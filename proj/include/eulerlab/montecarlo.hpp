#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "eulerlab/euler.hpp"

namespace eulerlab::montecarlo {

// n times the number of sampled primes may not exceed this.
inline constexpr double kDrawBudget = 1e8;

struct SampleSet {
  euler::ModelConfig cfg;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double kappa = 0.0;
  std::size_t primes = 0;  // exact primes sampled
  std::vector<double> values;       // sum over p <= P of 2 lambda_p(theta_p)
  std::vector<double> log_weights;  // tilted sets only: log(target/proposal)
  double log_normalizer = 0.0;      // sum of log F_p(kappa) over sampled primes
  // Truncation at P: worst case 2 sum_{p>P} max|lambda| (infinite for
  // sigma <= 1), plus the mean shift and rms of the omitted sum.
  double truncation_bias_bound = 0.0;
  double truncation_mean_shift = 0.0;
  double truncation_rms = 0.0;
};

std::size_t max_samples(const euler::ModelConfig& cfg);

SampleSet sample_log_l(const euler::ModelConfig& cfg, std::uint64_t seed, std::size_t n, double kappa = 0.0);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Plain sets: sample mean and variance with standard errors.
Estimate sample_mean(const SampleSet& s);
Estimate sample_variance(const SampleSet& s);
// Tilted sets: self-normalised weighted mean (delta-method standard error).
Estimate weighted_mean(const SampleSet& s);
// Plain sets: E[exp(kappa X)] with standard error.
Estimate moment_estimate(const SampleSet& s, double kappa);

Estimate empirical_tail(const SampleSet& s, double tau);

struct TiltedTail {
  double log_phi = 0.0;
  double relative_stderr = 0.0;
  double phi() const;
  double std_error() const;
  double kappa = 0.0;
  double effective_sample_size = 0.0;
};

TiltedTail tilted_tail(const euler::ModelConfig& cfg, double tau, std::uint64_t seed, std::size_t n);

using CharFn = std::function<std::complex<double>(double)>;

// (2/pi) int_0^R |phi - psi| / v dv + 24 K / (pi R), Gauss-Legendre panels.
double esseen_bound(const CharFn& empirical_cf, const CharFn& model_cf, double K, double R, int panels = 128);

CharFn empirical_cf(const SampleSet& s);

// sup over the sample of |empirical CDF - model CDF| (both one-sided limits).
double ks_distance(std::vector<double> sorted_values, const std::function<double(double)>& model_cdf);

}  // namespace eulerlab::montecarlo
