#include "eulerlab/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "eulerlab/asymconst.hpp"
#include "eulerlab/parallel.hpp"
#include "eulerlab/quadrature.hpp"

namespace eulerlab::density {

using euler::ModelConfig;
using std::numbers::pi;

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2 * pi);

}  // namespace

Inversion::Inversion(const ModelConfig& cfg, double tau, double x_max)
    : cfg_(cfg), sol_(saddle::solve_saddle(cfg, tau)), model_(euler::model_for(cfg)) {
  const auto r = model_->cgf(sol_.kappa, 2);
  f_ = r.f(0);
  tau_ = r.f(1);
  f2_ = r.f(2);
  tilt_ = model_->tilted(sol_.kappa);
  const double sd = std::sqrt(f2_);
  x_max_ = x_max > 0 ? x_max : 12 * sd;

  auto small = [&](double v) { return std::abs(ntilde(v)) < kDecayThreshold; };
  V_ = std::sqrt(60.0 / f2_);
  while (!(small(V_) && small(1.1 * V_) && small(1.25 * V_))) {
    V_ *= 1.25;
    if (V_ > kMaxV) throw NumericError("inversion: |N~(v)| has not decayed below 1e-12 by v = 1e6");
  }
  dv_ = pi / (8 * x_max_);
  if (sol_.kappa != 0.0) dv_ = std::min(dv_, 2 * pi * std::abs(sol_.kappa) / 45);
  const std::size_t K = std::size_t(std::ceil(V_ / dv_));
  v_.resize(K);
  nt_.resize(K);
  parallel_for(K, [&](std::size_t k) {
    v_[k] = (k + 1) * dv_;
    nt_[k] = ntilde(v_[k]);
  });
  decay_at_V_ = std::max(std::abs(ntilde(V_)), std::abs(ntilde(V_ + dv_)));
  // Neglected nodes beyond V, bounded by a Gaussian tail from the last value.
  err_ = 2 * kInvSqrt2Pi * decay_at_V_ / (f2_ * V_) + 2 * kInvSqrt2Pi * dv_ * decay_at_V_;
}

Complex Inversion::ntilde(double v) const {
  const auto lr = tilt_.log_ratio(v);
  return std::polar(std::exp(lr.log_modulus), lr.phase - tau_ * v);
}

double Inversion::density(double x) const {
  quad::Sum s;
  s += 1.0;
  for (std::size_t k = 0; k < v_.size(); ++k) {
    const double a = x * v_[k];
    s += 2 * (nt_[k].real() * std::cos(a) + nt_[k].imag() * std::sin(a));
  }
  return kInvSqrt2Pi * dv_ * s.value();
}

double Inversion::log_m(double x) const {
  const double n = density(x);
  if (!(n > 0)) return std::numeric_limits<double>::quiet_NaN();
  return f_ - sol_.kappa * (tau_ + x) + std::log(n);
}

double Inversion::laplace_piece(double delta) const {
  const double k = sol_.kappa;
  if (k == 0.0) throw NumericError("laplace_piece: needs a nonzero tilt");
  const double sign = k > 0 ? 1.0 : -1.0;
  quad::Sum s;
  s += std::exp(-k * delta) / k;
  for (std::size_t i = 0; i < v_.size(); ++i) {
    const Complex z(k, v_[i]);
    s += 2 * (nt_[i] * std::exp(-z * delta) / z).real();
  }
  return sign * dv_ / (2 * pi) * s.value();
}

std::vector<double> standard_grid(double variance, double span, int points) {
  if (points < 2) throw DomainError("standard_grid: need at least two points");
  const double L = span * std::sqrt(variance);
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = -L + 2 * L * i / (points - 1);
  return g;
}

DensityCurve tilted_density(const ModelConfig& cfg, double tau, const std::vector<double>& x_grid) {
  double xm = 0.0;
  for (double x : x_grid) xm = std::max(xm, std::abs(x));
  // resolve at least 12 standard deviations even for narrow grids
  const auto r = euler::cgf(cfg, saddle::solve_saddle(cfg, tau).kappa, 2);
  const Inversion inv(cfg, tau, std::max(xm, 12 * std::sqrt(r.f(2))));
  DensityCurve c;
  c.sigma = cfg.sigma;
  c.tau = inv.tau();
  c.kappa = inv.kappa();
  c.variance = inv.variance();
  c.truncation_V = inv.V();
  c.estimated_inversion_error = inv.estimated_error();
  c.grid.resize(x_grid.size());
  parallel_for(x_grid.size(), [&](std::size_t i) {
    const double x = x_grid[i];
    DensityPoint& p = c.grid[i];
    p.x = x;
    p.n_inversion = inv.density(x);
    p.n_gaussian = std::exp(-x * x / (2 * inv.variance())) / std::sqrt(inv.variance());
    p.log_m = p.n_inversion > 0 ? inv.f() - inv.kappa() * (inv.tau() + x) + std::log(p.n_inversion)
                                : std::numeric_limits<double>::quiet_NaN();
  });
  return c;
}

Moments tilted_moments(const Inversion& inv) {
  const double sd = std::sqrt(inv.variance());
  const double n0 = inv.density(0.0);
  double L = 10 * sd;
  while (std::max(std::abs(inv.density(L)), std::abs(inv.density(-L))) > 1e-14 * n0 && L < 4 * inv.x_max())
    L *= 1.2;
  L = std::min(L, 4 * inv.x_max());
  double h = std::min(sd / 8, pi / inv.V());
  const int n = int(std::ceil(L / h));
  h = L / n;
  std::vector<double> d(2 * n + 1);
  parallel_for(d.size(), [&](std::size_t i) { d[i] = inv.density((long(i) - n) * h); });
  quad::Sum m0, m1, m2;
  for (int i = -n; i <= n; ++i) {
    const double w = (i == -n || i == n ? 0.5 : 1.0) * h * kInvSqrt2Pi;
    const double x = i * h, y = d[i + n];
    m0 += w * y;
    m1 += w * x * y;
    m2 += w * x * x * y;
  }
  return {m0.value(), m1.value(), m2.value(), L, h};
}

double m_function(const ModelConfig& cfg, double tau, double x) {
  const Inversion inv(cfg, tau);
  // evaluate at the absolute abscissa tau + x, measured from f'(kappa)
  const double xr = tau + x - inv.tau();
  const double n = inv.density(xr);
  if (!(n > 0)) throw NumericError("m_function: inverted density is not positive at this abscissa");
  return inv.f() - inv.kappa() * (tau + x) + std::log(n);
}

GaussianApprox gaussian_approx(const ModelConfig& cfg, double tau, double x) {
  const auto sol = saddle::solve_saddle(cfg, tau);
  const auto r = euler::cgf(cfg, sol.kappa, 2);
  GaussianApprox g;
  g.log_main = r.f(0) - sol.kappa * (tau + x) - 0.5 * std::log(r.f(2)) - x * x / (2 * r.f(2));
  const double k = std::abs(sol.kappa);
  g.error_scale = k > 1 ? std::pow(k, -1 / (2 * cfg.sigma)) * std::sqrt(std::log(k))
                        : std::numeric_limits<double>::quiet_NaN();
  return g;
}

std::string to_string(Direction d) { return d == Direction::upper ? "upper" : "lower"; }

std::string to_string(Method m) {
  switch (m) {
    case Method::saddle: return "saddle";
    case Method::integrate: return "integrate";
    case Method::asymptotic: return "asymptotic";
  }
  return "?";
}

Direction direction_from_string(const std::string& s) {
  if (s == "upper") return Direction::upper;
  if (s == "lower") return Direction::lower;
  throw DomainError("unknown direction '" + s + "'");
}

Method method_from_string(const std::string& s) {
  if (s == "saddle") return Method::saddle;
  if (s == "integrate") return Method::integrate;
  if (s == "asymptotic") return Method::asymptotic;
  throw DomainError("unknown tail method '" + s + "'");
}

bool asymptotic_valid(double sigma, double tau) { return saddle::guess_valid(sigma, tau); }

double asymptotic_log_tail(double sigma, double tau, int order) {
  if (order < 1 || order > 2) throw DomainError("asymptotic_log_tail: order must be 1 or 2");
  if (!asymptotic_valid(sigma, tau)) throw DomainError("asymptotic_log_tail: tau below the validity floor");
  const auto& c = asymconst::expansion_constants(sigma);
  if (sigma < 1.0) {
    const double L = std::log(tau);
    double series = 1.0;
    if (order >= 2) series += (c.A1_slope * std::log(L) + c.A1_intercept) / L;
    return -c.A_sigma * std::pow(tau, 1 / (1 - sigma)) * std::pow(L, sigma / (1 - sigma)) * series;
  }
  const double t = saddle::t_from_tau(tau);
  double series = 1.0;
  if (order >= 2) series += c.a1_closed / t;
  return -std::exp(t - c.A) / t * series;
}

TailEstimate tail(const ModelConfig& cfg, double tau, const std::vector<Method>& methods, Direction direction,
                  int asymptotic_order) {
  TailEstimate e;
  e.sigma = cfg.sigma;
  e.tau = tau;
  e.direction = direction;
  const bool upper = direction == Direction::upper;
  const double level = upper ? tau : -tau;
  auto wants = [&](Method m) { return std::find(methods.begin(), methods.end(), m) != methods.end(); };

  if (wants(Method::asymptotic)) {
    if (asymptotic_valid(cfg.sigma, tau)) {
      e.log_phi_asymptotic = asymptotic_log_tail(cfg.sigma, tau, asymptotic_order);
      e.asymptotic_order = asymptotic_order;
    } else {
      e.notes.push_back("asymptotic: tau below the validity floor");
    }
  }
  if (!wants(Method::saddle) && !wants(Method::integrate)) return e;

  const auto sol = saddle::solve_saddle(cfg, level);
  e.kappa = sol.kappa;
  const bool aligned = upper ? sol.kappa > 0 : sol.kappa < 0;
  double saddle_f = 0, saddle_small = 0;
  if (wants(Method::saddle)) {
    if (aligned) {
      const auto r = euler::cgf(cfg, sol.kappa, 2);
      const double k = std::abs(sol.kappa);
      saddle_f = r.f(0);
      saddle_small = -std::log(k * std::sqrt(2 * pi * r.f(2)));
      e.log_phi_saddle = r.f(0) - sol.kappa * level + saddle_small;
      e.saddle_error_scale = k > 1 ? std::pow(k, -1 / (2 * cfg.sigma)) * std::sqrt(std::log(k))
                                   : std::numeric_limits<double>::quiet_NaN();
    } else {
      e.notes.push_back("saddle: level is on the other side of the mean");
    }
  }
  if (wants(Method::integrate)) {
    if (sol.kappa == 0.0) {
      e.notes.push_back("integrate: level coincides with f'(0)");
    } else {
      const Inversion inv(cfg, level);
      const double piece = inv.laplace_piece(level - inv.tau());
      if (!(piece > 0)) throw NumericError("tail: nonpositive Laplace integral");
      const double log_side = inv.f() - inv.kappa() * inv.tau() + std::log(piece);
      // relative error of the Fourier pairing: neglected nodes past V
      const double rel = inv.decay_at_V() / (std::abs(inv.kappa()) * piece * 2 * pi) * 4 / (inv.variance() * inv.V());
      if (aligned) {
        e.log_phi_integrated = log_side;
        e.integrate_error = rel;
        if (std::isfinite(e.log_phi_saddle))
          e.saddle_minus_integrated = (saddle_f - inv.f()) + saddle_small - inv.kappa() * (level - inv.tau()) -
                                      std::log(piece) - (sol.kappa - inv.kappa()) * level;
      } else {
        // the tilt sits on the far side: take the complement
        const double p = std::exp(log_side);
        if (!(p < 1)) throw NumericError("tail: complement mass exceeds one");
        e.log_phi_integrated = std::log1p(-p);
        e.integrate_error = rel * p / (1 - p);
      }
    }
  }
  return e;
}

StitchedDistribution::StitchedDistribution(const ModelConfig& cfg, double lo, double hi, int points) {
  if (!(hi > lo) || points < 3) throw DomainError("StitchedDistribution: need lo < hi and points >= 3");
  // windows every two local standard deviations
  std::vector<Inversion> windows;
  double c = lo;
  while (true) {
    windows.emplace_back(cfg, c);
    if (c >= hi) break;
    c = std::min(hi, c + 2 * std::sqrt(windows.back().variance()));
  }
  x_.resize(points);
  log_m_.resize(points);
  for (int i = 0; i < points; ++i) x_[i] = lo + (hi - lo) * i / (points - 1);
  parallel_for(std::size_t(points), [&](std::size_t i) {
    const double y = x_[i];
    std::size_t best = 0;
    for (std::size_t w = 1; w < windows.size(); ++w)
      if (std::abs(windows[w].tau() - y) < std::abs(windows[best].tau() - y)) best = w;
    const Inversion& inv = windows[best];
    const double n = inv.density(y - inv.tau());
    log_m_[i] = n > 0 ? inv.f() - inv.kappa() * y + std::log(n) : -std::numeric_limits<double>::infinity();
  });
  auto side_mass = [](const Inversion& inv, double level, bool below) {
    const bool aligned = below ? inv.kappa() < 0 : inv.kappa() > 0;
    if (!aligned) return std::numeric_limits<double>::quiet_NaN();
    return std::exp(inv.f() - inv.kappa() * inv.tau()) * inv.laplace_piece(level - inv.tau());
  };
  below_ = side_mass(windows.front(), lo, true);
  above_ = side_mass(windows.back(), hi, false);
  if (!std::isfinite(below_) || !std::isfinite(above_))
    throw DomainError("StitchedDistribution: lo and hi must lie on opposite sides of the mean");
  cdf_.resize(points);
  cdf_[0] = below_;
  const double h = (hi - lo) / (points - 1);
  for (int i = 1; i < points; ++i)
    cdf_[i] = cdf_[i - 1] + 0.5 * h * kInvSqrt2Pi * (std::exp(log_m_[i - 1]) + std::exp(log_m_[i]));
}

double StitchedDistribution::cdf(double y) const {
  if (y <= x_.front()) return y == x_.front() ? cdf_.front() : std::numeric_limits<double>::quiet_NaN();
  if (y >= x_.back()) return y == x_.back() ? cdf_.back() : std::numeric_limits<double>::quiet_NaN();
  const double h = (x_.back() - x_.front()) / (x_.size() - 1);
  const std::size_t i = std::min(x_.size() - 2, std::size_t((y - x_.front()) / h));
  // exact trapezoid of the linear interpolant of M inside the cell
  const double d = y - x_[i];
  const double m0 = std::exp(log_m_[i]), m1 = std::exp(log_m_[i + 1]);
  const double mid = m0 + (m1 - m0) * d / h;
  return cdf_[i] + 0.5 * d * kInvSqrt2Pi * (m0 + mid);
}

double StitchedDistribution::max_cdf_slope() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double l : log_m_) m = std::max(m, l);
  return std::exp(m) * kInvSqrt2Pi;
}

}  // namespace eulerlab::density
