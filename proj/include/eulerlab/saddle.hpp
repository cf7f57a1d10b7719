#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "eulerlab/euler.hpp"

namespace eulerlab::saddle {

inline constexpr double kEulerGamma = std::numbers::egamma;

// sigma = 1 parametrisation tau = 2 log t + 2 gamma.
double tau_from_t(double t);
double t_from_tau(double tau);

// True when the asymptotic guess is defined: tau >= 3 (sigma < 1), t >= 2 (sigma = 1).
bool guess_valid(double sigma, double tau);

// Leading (N = 1) or corrected (N = 2) asymptotic saddle point.
double saddle_guess(double sigma, double tau, int N = 2);

struct TraceStep {
  double kappa = 0.0;
  double fprime = 0.0;
  double lo = 0.0, hi = 0.0;
  bool newton = true;
};

struct SaddleSolution {
  double kappa = 0.0;
  double tau = 0.0;
  double residual = 0.0;  // |f'(kappa) - tau|
  int iterations = 0;
  double guess_used = 0.0;
  std::string guess_source;  // "asymptotic", "gaussian" or "degenerate"
  std::vector<TraceStep> trace;
};

SaddleSolution solve_saddle(const euler::ModelConfig& cfg, double tau);

// Model configuration whose validity range covers ten times the expected
// saddle point for tau (either sign).
euler::ModelConfig config_for_tau(double sigma, double tau);

}  // namespace eulerlab::saddle
