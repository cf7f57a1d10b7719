#include "eulerlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "eulerlab/quadrature.hpp"
#include "eulerlab/rng.hpp"
#include "eulerlab/specfun.hpp"

namespace eulerlab::measures {

using std::numbers::pi;

QuadratureRule gauss_legendre_rule(int order) {
  const quad::Rule& r = quad::gauss_legendre(order);
  QuadratureRule out;
  out.order = order;
  out.nodes.resize(order);
  out.weights.resize(order);
  for (int k = 0; k < order; ++k) {
    out.nodes[k] = 0.5 * pi * (1.0 + r.nodes[k]);
    out.weights[k] = 0.5 * pi * r.weights[k];
  }
  return out;
}

namespace {

void append_panel(QuadratureRule& rule, double a, double b, int n) {
  const quad::Rule& r = quad::gauss_legendre(n);
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  for (int k = 0; k < n; ++k) {
    rule.nodes.push_back(c + h * r.nodes[k]);
    rule.weights.push_back(h * r.weights[k]);
  }
}

struct Window {
  double lo = 0.0, hi = pi;
  bool peaked = false;
  double depth = 0.0;  // T
};

Window peak_window(double x, double re_s) {
  Window w;
  const double range = 2.0 * (std::log1p(x) - std::log1p(-x));
  if (std::abs(re_s) * range <= 16.0) return w;
  w.peaked = true;
  const double c = std::abs(re_s) * x / ((1 - x) * (1 - x));
  w.depth = 42.0 + 1.5 * std::log(std::max(1.0, c));
  const double e = w.depth / std::abs(re_s);
  if (re_s > 0) {
    const double s2 = std::expm1(e) * (1 - x) * (1 - x) / (4 * x);
    if (s2 < 1.0) w.hi = 2.0 * std::asin(std::sqrt(s2));
  } else {
    const double c2 = -std::expm1(-e) * (1 + x) * (1 + x) / (4 * x);
    if (c2 < 1.0) w.lo = 2.0 * std::acos(std::sqrt(c2));
  }
  return w;
}

}  // namespace

QuadratureRule concentrated_rule(double x, double re_s, double im_s, int order) {
  if (order < 16) order = 16;
  QuadratureRule rule;
  const Window w = peak_window(x, re_s);
  if (!w.peaked) {
    const double range = 2.0 * (std::log1p(x) - std::log1p(-x));
    int n = order;
    while (n < std::abs(im_s) * range + 32 && n < (1 << 15)) n *= 2;
    rule = gauss_legendre_rule(n);
    return rule;
  }
  const int panels = 6;
  int np = std::max(16, order / 4);
  const double span = std::abs(im_s) * w.depth / std::abs(re_s);
  while (panels * np < span + 32 && np < (1 << 12)) np *= 2;
  rule.order = panels * np;
  rule.nodes.reserve(rule.order);
  rule.weights.reserve(rule.order);
  const double h = (w.hi - w.lo) / panels;
  for (int i = 0; i < panels; ++i) append_panel(rule, w.lo + i * h, w.lo + (i + 1) * h, np);
  return rule;
}

double log_factor_peak(double x, bool peak_at_pi) {
  return peak_at_pi ? 2.0 * std::log1p(x) : 2.0 * std::log1p(-x);
}

double log_factor_gap(double x, double theta, bool peak_at_pi) {
  if (!peak_at_pi) {
    const double s = std::sin(0.5 * theta);
    return std::log1p(4.0 * x * s * s / ((1 - x) * (1 - x)));
  }
  const double c = std::cos(0.5 * theta);
  return std::log1p(-4.0 * x * c * c / ((1 + x) * (1 + x)));
}

double plancherel_density(double q, double theta) {
  const double s = std::sin(theta);
  const double s2 = s * s;
  if (q == 0.0) return 2.0 / pi * s2;
  return (1.0 + q) / ((1.0 - q) * (1.0 - q) + 4.0 * q * s2) * (2.0 / pi) * s2;
}

struct AngleMeasure::Cache {
  std::once_flag cdf_once, inv_once;
  std::vector<double> edges, cum;
  std::unique_ptr<InverseCdfTable> inverse;
};

AngleMeasure AngleMeasure::sato_tate() {
  AngleMeasure m;
  m.cache_ = std::make_shared<Cache>();
  return m;
}

AngleMeasure AngleMeasure::plancherel(double p) {
  if (!(p >= 2.0) || !std::isfinite(p)) throw DomainError("plancherel: p must be >= 2");
  AngleMeasure m;
  m.q_ = 1.0 / p;
  m.cache_ = std::make_shared<Cache>();
  return m;
}

AngleMeasure AngleMeasure::tilted(double sigma, double kappa) const {
  if (is_sato_tate()) throw DomainError("tilted: requires a Plancherel measure");
  if (!(sigma > 0.5 && sigma <= 1.0)) throw DomainError("tilted: sigma must lie in (1/2, 1]");
  if (!std::isfinite(kappa)) throw DomainError("tilted: kappa must be finite");
  AngleMeasure m;
  m.q_ = q_;
  m.tilt_ = Tilt{sigma, kappa};
  m.x_ = std::pow(p(), -sigma);
  const bool at_pi = kappa < 0;
  m.a_peak_ = log_factor_peak(m.x_, at_pi);
  const QuadratureRule rule = concentrated_rule(m.x_, kappa, 0.0, 128);
  quad::Sum s;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double th = rule.nodes[k];
    s += rule.weights[k] * std::exp(-kappa * log_factor_gap(m.x_, th, at_pi)) * plancherel_density(q_, th);
  }
  m.log_i_ = std::log(s.value());
  m.log_norm_ = -kappa * m.a_peak_ + m.log_i_;
  m.cache_ = std::make_shared<Cache>();
  return m;
}

double AngleMeasure::log_density(double theta) const {
  const double base = std::log(plancherel_density(q_, theta));
  if (!tilt_) return base;
  const double k = tilt_->kappa;
  return base - k * log_factor_gap(x_, theta, k < 0) - log_i_;
}

double AngleMeasure::density(double theta) const {
  if (!tilt_) return plancherel_density(q_, theta);
  const double k = tilt_->kappa;
  return plancherel_density(q_, theta) * std::exp(-k * log_factor_gap(x_, theta, k < 0) - log_i_);
}

QuadratureRule AngleMeasure::natural_rule(int order) const {
  if (!tilt_) return gauss_legendre_rule(order);
  return concentrated_rule(x_, tilt_->kappa, 0.0, order);
}

double AngleMeasure::cdf(double theta) const {
  if (theta <= 0) return 0.0;
  if (theta >= pi) return 1.0;
  if (is_sato_tate()) return (theta - std::sin(theta) * std::cos(theta)) / pi;
  std::call_once(cache_->cdf_once, [this] {
    auto& e = cache_->edges;
    Window w;
    if (tilt_) w = peak_window(x_, tilt_->kappa);
    if (w.peaked) {
      const int inner = 512, outer = 32;
      if (w.lo > 0)
        for (int i = 0; i < outer; ++i) e.push_back(w.lo * i / outer);
      for (int i = 0; i <= inner; ++i) e.push_back(w.lo + (w.hi - w.lo) * i / inner);
      if (w.hi < pi)
        for (int i = 1; i <= outer; ++i) e.push_back(w.hi + (pi - w.hi) * i / outer);
    } else {
      for (int i = 0; i <= 256; ++i) e.push_back(pi * i / 256);
    }
    auto& c = cache_->cum;
    c.assign(e.size(), 0.0);
    quad::Sum s;
    for (std::size_t i = 1; i < e.size(); ++i) {
      s += quad::integrate([this](double t) { return density(t); }, e[i - 1], e[i], 16);
      c[i] = s.value();
    }
    const double total = c.back();
    for (auto& v : c) v /= total;
  });
  const auto& e = cache_->edges;
  const auto& c = cache_->cum;
  const std::size_t i = std::upper_bound(e.begin(), e.end(), theta) - e.begin() - 1;
  const double v = c[i] + quad::integrate([this](double t) { return density(t); }, e[i], theta, 16);
  return std::clamp(v, 0.0, 1.0);
}

const InverseCdfTable& AngleMeasure::inverse_table() const {
  std::call_once(cache_->inv_once, [this] { cache_->inverse = std::make_unique<InverseCdfTable>(*this); });
  return *cache_->inverse;
}

InverseCdfTable::InverseCdfTable(const AngleMeasure& m) {
  const int n = kCells;
  t_.assign(n + 1, 0.0);
  t_[n] = pi;
  double lo = 0.0;
  for (int k = 1; k < n; ++k) {
    const double u = double(k) / n;
    double a = lo, b = pi;
    double th = 0.5 * (a + b);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      const double f = m.cdf(th) - u;
      if (f > 0)
        b = th;
      else
        a = th;
      const double d = m.density(th);
      double next = d > 0 ? th - f / d : 0.5 * (a + b);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      if (std::abs(next - th) < 1e-15) {
        th = next;
        break;
      }
      th = next;
    }
    t_[k] = th;
    lo = th;
  }
  // Fritsch-Carlson slopes in d theta / d u
  std::vector<double> delta(n);
  for (int k = 0; k < n; ++k) delta[k] = (t_[k + 1] - t_[k]) * n;
  m_.assign(n + 1, 0.0);
  m_[0] = delta[0];
  m_[n] = delta[n - 1];
  for (int k = 1; k < n; ++k) m_[k] = delta[k - 1] * delta[k] <= 0 ? 0.0 : 0.5 * (delta[k - 1] + delta[k]);
  for (int k = 0; k < n; ++k) {
    if (delta[k] == 0.0) {
      m_[k] = m_[k + 1] = 0.0;
      continue;
    }
    const double al = m_[k] / delta[k], be = m_[k + 1] / delta[k];
    const double r = al * al + be * be;
    if (r > 9.0) {
      const double tau = 3.0 / std::sqrt(r);
      m_[k] = tau * al * delta[k];
      m_[k + 1] = tau * be * delta[k];
    }
  }
}

double InverseCdfTable::theta(double u, double* dtheta_du) const {
  const int n = kCells;
  u = std::clamp(u, 0.0, 1.0);
  int k = std::min(n - 1, int(u * n));
  const double h = 1.0 / n;
  const double t = (u - k * h) * n;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const double y = h00 * t_[k] + h10 * h * m_[k] + h01 * t_[k + 1] + h11 * h * m_[k + 1];
  if (dtheta_du) {
    const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1, d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
    *dtheta_du = (d00 * t_[k] + d01 * t_[k + 1]) * n + d10 * m_[k] + d11 * m_[k + 1];
  }
  return std::clamp(y, 0.0, pi);
}

double expect(const AngleMeasure& m, const std::function<double(double)>& f, const QuadratureRule& rule) {
  auto eval = [&](const QuadratureRule& r, double* scale) {
    quad::Sum s;
    double sc = 0.0;
    for (std::size_t k = 0; k < r.nodes.size(); ++k) {
      const double v = r.weights[k] * m.density(r.nodes[k]) * f(r.nodes[k]);
      s += v;
      sc += std::abs(v);
    }
    if (scale) *scale = sc;
    return s.value();
  };
  double scale = 0.0;
  double prev = eval(rule, &scale);
  int order = std::max(rule.order, 16);
  for (int d = 0; d < 7; ++d) {
    order *= 2;
    const QuadratureRule next = m.tilt() ? m.natural_rule(order) : gauss_legendre_rule(order);
    const double cur = eval(next, &scale);
    if (std::abs(cur - prev) <= 1e-11 * std::max(std::abs(cur), 1e-3 * scale) || std::abs(cur - prev) < 1e-300)
      return cur;
    prev = cur;
  }
  throw DomainError("expect: no convergence after order doubling");
}

double expect(const AngleMeasure& m, const std::function<double(double)>& f) {
  return expect(m, f, m.natural_rule(64));
}

double cdf(const AngleMeasure& m, double theta) { return m.cdf(theta); }
double density(const AngleMeasure& m, double theta) { return m.density(theta); }

double sato_tate_quantile(double u) {
  if (u <= 0) return 0.0;
  if (u >= 1) return pi;
  if (u > 0.5) return pi - sato_tate_quantile(1.0 - u);
  // phi - sin(phi) = 2 pi u, theta = phi / 2
  const double M = 2.0 * pi * u;
  auto kepler = [](double phi) {
    if (phi < 0.05) {
      const double p2 = phi * phi;
      return phi * p2 / 6.0 * (1.0 - p2 / 20.0 * (1.0 - p2 / 42.0 * (1.0 - p2 / 72.0)));
    }
    return phi - std::sin(phi);
  };
  double phi = std::min(pi, std::cbrt(6.0 * M));
  double lo = 0.0, hi = pi;
  for (int it = 0; it < 60; ++it) {
    const double f = kepler(phi) - M;
    if (f > 0)
      hi = phi;
    else
      lo = phi;
    const double s = std::sin(0.5 * phi);
    const double d = 2.0 * s * s;
    double next = d > 0 ? phi - f / d : 0.5 * (lo + hi);
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - phi) <= 1e-16 * std::max(phi, 1e-300)) {
      phi = next;
      break;
    }
    phi = next;
  }
  return 0.5 * phi;
}

std::vector<double> sample(const AngleMeasure& m, std::uint64_t seed, std::size_t n) {
  std::vector<double> out(n);
  if (m.tilt()) {
    const InverseCdfTable& t = m.inverse_table();
    for (std::size_t i = 0; i < n; ++i) {
      CounterRng rng(seed, 0, i);
      out[i] = t.theta(rng.uniform());
    }
    return out;
  }
  const double q = m.q();
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(seed, 0, i);
    for (;;) {
      const double th = sato_tate_quantile(rng.uniform());
      if (q == 0.0) {
        out[i] = th;
        break;
      }
      const double s = std::sin(th);
      const double accept = (1 - q) * (1 - q) / ((1 - q) * (1 - q) + 4 * q * s * s);
      if (rng.uniform() < accept) {
        out[i] = th;
        break;
      }
    }
  }
  return out;
}

}  // namespace eulerlab::measures
