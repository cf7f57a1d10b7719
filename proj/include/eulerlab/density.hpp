#pragma once

#include <complex>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "eulerlab/euler.hpp"
#include "eulerlab/saddle.hpp"

namespace eulerlab::density {

// Densities use the measure |dx| = dx / sqrt(2 pi).
inline constexpr double kDecayThreshold = 1e-12;
inline constexpr double kMaxV = 1e6;

// Fourier data of the tilted density N(x; tau) at the numerical saddle.
class Inversion {
 public:
  Inversion(const euler::ModelConfig& cfg, double tau, double x_max = 0.0);

  const euler::ModelConfig& config() const { return cfg_; }
  const saddle::SaddleSolution& solution() const { return sol_; }
  double kappa() const { return sol_.kappa; }
  double tau_requested() const { return sol_.tau; }
  double tau() const { return tau_; }  // f'(kappa)
  double f() const { return f_; }
  double variance() const { return f2_; }
  double V() const { return V_; }
  double dv() const { return dv_; }
  double x_max() const { return x_max_; }
  double estimated_error() const { return err_; }
  double decay_at_V() const { return decay_at_V_; }

  // N~(v; tau) = exp(-i tau v) F(kappa + iv) / F(kappa).
  Complex ntilde(double v) const;
  const std::vector<double>& nodes() const { return v_; }
  const std::vector<Complex>& values() const { return nt_; }

  double density(double x) const;
  // log M(tau + x) = f - kappa (tau + x) + log N(x); NaN where N <= 0.
  double log_m(double x) const;

  // int_delta^inf e^{-kappa x} N(x) |dx| (kappa > 0) or
  // int_-inf^delta e^{-kappa x} N(x) |dx| (kappa < 0), by Fourier pairing.
  double laplace_piece(double delta) const;

 private:
  euler::ModelConfig cfg_;
  saddle::SaddleSolution sol_;
  std::shared_ptr<const euler::Model> model_;
  euler::Model::Tilted tilt_;
  double tau_ = 0.0, f_ = 0.0, f2_ = 0.0;
  double V_ = 0.0, dv_ = 0.0, x_max_ = 0.0, err_ = 0.0, decay_at_V_ = 0.0;
  std::vector<double> v_;
  std::vector<Complex> nt_;
};

struct DensityPoint {
  double x = 0.0;
  double n_inversion = 0.0;
  double n_gaussian = 0.0;
  double log_m = 0.0;
};

struct DensityCurve {
  double sigma = 1.0;
  double tau = 0.0;  // f'(kappa)
  double kappa = 0.0;
  double variance = 0.0;
  std::vector<DensityPoint> grid;
  double truncation_V = 0.0;
  double estimated_inversion_error = 0.0;
};

DensityCurve tilted_density(const euler::ModelConfig& cfg, double tau, const std::vector<double>& x_grid);

// Standard grid: [-span, span] standard deviations, `points` points.
std::vector<double> standard_grid(double variance, double span = 8.0, int points = 161);

struct Moments {
  double mass = 0.0;
  double mean = 0.0;
  double second = 0.0;
  double x_extent = 0.0;  // integration range used, in x
  double h = 0.0;
};

// Trapezoid mass and mean of N over x, extended until the ends are negligible.
Moments tilted_moments(const Inversion& inv);

double m_function(const euler::ModelConfig& cfg, double tau, double x);

struct GaussianApprox {
  double log_main = 0.0;
  double error_scale = 0.0;
};

GaussianApprox gaussian_approx(const euler::ModelConfig& cfg, double tau, double x);

enum class Direction { upper, lower };
enum class Method { saddle, integrate, asymptotic };

std::string to_string(Direction d);
std::string to_string(Method m);
Direction direction_from_string(const std::string& s);
Method method_from_string(const std::string& s);

struct TailEstimate {
  double sigma = 1.0;
  double tau = 0.0;
  Direction direction = Direction::upper;
  double kappa = 0.0;
  double log_phi_saddle = std::numeric_limits<double>::quiet_NaN();
  double log_phi_integrated = std::numeric_limits<double>::quiet_NaN();
  double log_phi_asymptotic = std::numeric_limits<double>::quiet_NaN();
  int asymptotic_order = 0;
  double saddle_error_scale = std::numeric_limits<double>::quiet_NaN();
  double integrate_error = std::numeric_limits<double>::quiet_NaN();
  // saddle minus integrate, formed from the O(1) parts so it survives when log Phi is huge
  double saddle_minus_integrated = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> notes;  // methods skipped and why
};

// Upper: log P(log L > tau). Lower: log P(log L < -tau).
TailEstimate tail(const euler::ModelConfig& cfg, double tau, const std::vector<Method>& methods,
                  Direction direction = Direction::upper, int asymptotic_order = 2);

// Closed forms of the large-tau expansion, by themselves.
double asymptotic_log_tail(double sigma, double tau, int order);
bool asymptotic_valid(double sigma, double tau);

// Windows of tilted inversions stitched into a model distribution on [lo, hi].
class StitchedDistribution {
 public:
  StitchedDistribution(const euler::ModelConfig& cfg, double lo, double hi, int points = 2001);
  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }
  const std::vector<double>& abscissae() const { return x_; }
  const std::vector<double>& log_m() const { return log_m_; }
  double mass() const { return cdf_.back() + above_; }
  // P(log L <= y) on the grid range, linear between nodes of the cumulative table.
  double cdf(double y) const;
  // sup of dP/dy over the grid, i.e. max M / sqrt(2 pi).
  double max_cdf_slope() const;
  double lower_tail_mass() const { return below_; }
  double upper_tail_mass() const { return above_; }

 private:
  std::vector<double> x_, log_m_, cdf_;
  double below_ = 0.0, above_ = 0.0;
};

}  // namespace eulerlab::density
