#include "eulerlab/asymconst.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "eulerlab/quadrature.hpp"
#include "eulerlab/specfun.hpp"

namespace eulerlab::asymconst {

namespace {

using std::numbers::pi;
using specfun::Variant;

constexpr double kEps = 0.5;   // series below
constexpr double kBig = 20.0;  // asymptotic expansion above

// log G(u) = sum_{k>=1} c[k] u^{2k}
const std::vector<double>& small_coeffs() {
  static const std::vector<double> c = [] {
    const int K = 40;
    std::vector<double> a(K + 1), c(K + 1, 0.0);
    double f = 1.0;
    for (int k = 0; k <= K; ++k) {
      a[k] = 1.0 / (f * f * (k + 1));  // 1/(k!(k+1)!)
      f *= (k + 1);
    }
    for (int k = 1; k <= K; ++k) {
      double s = 0.0;
      for (int i = 1; i < k; ++i) s += i * c[i] * a[k - i];
      c[k] = a[k] - s / k;
    }
    return c;
  }();
  return c;
}

// g(u) = 2u - 1.5 log u - 0.5 log(4 pi) + sum_{k>=1} d[k] u^{-k}
const std::vector<double>& large_coeffs() {
  static const std::vector<double> d = [] {
    const int K = 30;
    std::vector<double> s(K + 1), d(K + 1, 0.0);
    double a = 1.0;
    s[0] = 1.0;
    for (int k = 1; k <= K; ++k) {
      const double odd = 2.0 * k - 1.0;
      a *= (4.0 - odd * odd) / (8.0 * k);
      s[k] = (k % 2 ? -a : a) / std::pow(2.0, k);
    }
    for (int k = 1; k <= K; ++k) {
      double acc = 0.0;
      for (int i = 1; i < k; ++i) acc += i * d[i] * s[k - i];
      d[k] = s[k] - acc / k;
    }
    return d;
  }();
  return d;
}

int large_terms(double u) {
  const auto& d = large_coeffs();
  int K = 1;
  double last = INFINITY;
  for (int k = 1; k < int(d.size()); ++k) {
    const double t = std::abs(d[k]) * std::pow(u, -k);
    if (t > last) break;
    K = k;
    last = t;
    if (t < 1e-18) break;
  }
  return K;
}

// antiderivative of u^b log^n u
double F(double b, int n, double u) {
  const double L = std::log(u);
  double s = 0.0, fact = 1.0;
  for (int i = 0; i <= n; ++i) {
    s += (i % 2 ? -1.0 : 1.0) * fact * std::pow(L, n - i) / std::pow(b + 1, i + 1);
    fact *= (n - i);
  }
  return std::pow(u, b + 1) * s;
}

// int_0^e u^b log^n u, b > -1
double lower(double b, int n, double e) { return F(b, n, e); }
// int_e^inf u^b log^n u, b < -1
double upper(double b, int n, double e) { return -F(b, n, e); }

// Composite Gauss-Legendre in w on [w0, w1], panels of width <= h; returns
// value and |GL20 - GL40| as an error estimate.
IntegralValue panels(const std::function<double(double)>& f, double w0, double w1, double h) {
  const int np = std::max(1, int(std::ceil((w1 - w0) / h)));
  quad::Sum lo, hi;
  for (int i = 0; i < np; ++i) {
    const double a = w0 + (w1 - w0) * i / np, b = w0 + (w1 - w0) * (i + 1) / np;
    lo += quad::integrate(f, a, b, 20);
    hi += quad::integrate(f, a, b, 40);
  }
  return {hi.value(), std::abs(hi.value() - lo.value()) + 1e-16 * std::abs(hi.value())};
}

double g_j(double u, int j, bool star) {
  return specfun::g_deriv({u, j, star ? Variant::g_star : Variant::g});
}

void check_sigma(double sigma) {
  if (!(sigma >= kMinSigma && sigma <= 1.0)) throw DomainError("asymconst: sigma must lie in [0.55, 1]");
}

}  // namespace

IntegralValue g_integral(double sigma, int n, int j) {
  check_sigma(sigma);
  if (n < 0 || n > 2 || j < 0 || j > 2) throw DomainError("g_integral: (n, j) outside 0..2");
  const bool star = sigma == 1.0;
  const double beta = star ? j - 2.0 : j - 1.0 / sigma - 1.0;
  double value = 0.0, err = 0.0;

  // [0, eps]: termwise series
  {
    const auto& c = small_coeffs();
    double last = 0.0;
    for (int k = 1; k < int(c.size()); ++k) {
      if (2 * k < j) continue;
      double ff = 1.0;
      for (int i = 0; i < j; ++i) ff *= (2 * k - i);
      const double t = c[k] * ff * lower(2 * k - j + beta, n, kEps);
      value += t;
      last = std::abs(t);
    }
    err += last;
  }
  // [eps, 1] and [1, big] in w = log u
  for (auto [w0, w1] : {std::pair{std::log(kEps), 0.0}, std::pair{0.0, std::log(kBig)}}) {
    auto f = [&](double w) {
      const double u = std::exp(w);
      // the right piece starts at u = 1 from above for g_*
      const double uu = (star && w1 > 0 && u == 1.0) ? std::nextafter(1.0, 2.0) : u;
      return g_j(uu, j, star) * std::exp((beta + 1) * w) * std::pow(w, n);
    };
    const IntegralValue p = panels(f, w0, w1, 0.25);
    value += p.value;
    err += p.error;
  }
  // [big, inf): asymptotic expansion
  {
    const auto& d = large_coeffs();
    const int K = large_terms(kBig);
    const double c0 = -0.5 * std::log(4 * pi);
    double s = 0.0, tail = 0.0;
    if (j == 0) {
      if (!star) s += 2 * upper(beta + 1, n, kBig);
      s += -1.5 * upper(beta, n + 1, kBig) + c0 * upper(beta, n, kBig);
      for (int k = 1; k <= K; ++k) s += d[k] * upper(beta - k, n, kBig);
      tail = std::abs(d[K + 1] * upper(beta - K - 1, n, kBig));
    } else if (j == 1) {
      if (!star) s += 2 * upper(beta, n, kBig);
      s += -1.5 * upper(beta - 1, n, kBig);
      for (int k = 1; k <= K; ++k) s += -k * d[k] * upper(beta - k - 1, n, kBig);
      tail = std::abs((K + 1) * d[K + 1] * upper(beta - K - 2, n, kBig));
    } else {
      s += 1.5 * upper(beta - 2, n, kBig);
      for (int k = 1; k <= K; ++k) s += k * (k + 1.0) * d[k] * upper(beta - k - 2, n, kBig);
      tail = std::abs((K + 1) * (K + 2.0) * d[K + 1] * upper(beta - K - 3, n, kBig));
    }
    value += s;
    err += tail + 1e-16 * std::abs(s);
  }
  return {value, err};
}

IntegralValue a_integral(double sigma, int n) {
  check_sigma(sigma);
  if (n < 0 || n > 2) throw DomainError("a_integral: n outside 0..2");
  const bool star = sigma == 1.0;
  const double y1 = std::pow(kBig, -1.0 / sigma);  // u = y^{-sigma} >= big below y1
  const double y2 = std::pow(kEps, -1.0 / sigma);  // u <= eps above y2
  double value = 0.0, err = 0.0;
  // y < y1: g = 2 y^{-sigma} + 1.5 sigma log y - 0.5 log(4 pi) + sum d_k y^{k sigma}
  {
    const auto& d = large_coeffs();
    const int K = large_terms(kBig);
    double s = 0.0;
    if (!star) s += 2 * lower(-sigma, n, y1);
    s += 1.5 * sigma * lower(0.0, n + 1, y1) - 0.5 * std::log(4 * pi) * lower(0.0, n, y1);
    for (int k = 1; k <= K; ++k) s += d[k] * lower(k * sigma, n, y1);
    value += s;
    err += std::abs(d[K + 1] * lower((K + 1) * sigma, n, y1)) + 1e-16 * std::abs(s);
  }
  // y > y2: g = sum c_k y^{-2k sigma}
  {
    const auto& c = small_coeffs();
    double last = 0.0;
    for (int k = 1; k < int(c.size()); ++k) {
      const double t = c[k] * upper(-2.0 * k * sigma, n, y2);
      value += t;
      last = std::abs(t);
    }
    err += last;
  }
  // middle in t = log y, split at y = 1
  for (auto [t0, t1] : {std::pair{std::log(y1), 0.0}, std::pair{0.0, std::log(y2)}}) {
    auto f = [&](double t) {
      double u = std::exp(-sigma * t);
      if (star && t0 < 0 && t1 == 0.0 && u == 1.0) u = std::nextafter(1.0, 2.0);
      return g_j(u, 0, star) * std::exp(t) * std::pow(t, n);
    };
    const IntegralValue p = panels(f, t0, t1, 0.2);
    value += p.value;
    err += p.error;
  }
  return {value, err};
}

const ConstantsTable& expansion_constants(double sigma) {
  check_sigma(sigma);
  static std::mutex mu;
  static std::map<double, std::unique_ptr<ConstantsTable>> memo;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = memo.find(sigma);
    if (it != memo.end()) return *it->second;
  }
  auto t = std::make_unique<ConstantsTable>();
  t->sigma = sigma;
  t->sigma_one = sigma == 1.0;
  for (int n = 0; n <= 2; ++n)
    for (int j = 0; j <= 2; ++j) {
      const IntegralValue v = g_integral(sigma, n, j);
      t->g[n][j] = v.value;
      t->g_err[n][j] = v.error;
    }
  const IntegralValue a0 = a_integral(sigma, 0), a1 = a_integral(sigma, 1);
  t->a0 = a0.value;
  t->a0_err = a0.error;
  t->a1 = a1.value;
  t->a1_err = a1.error;
  const double g00 = t->g[0][0], g01 = t->g[0][1], g10 = t->g[1][0], g11 = t->g[1][1];
  if (!t->sigma_one) {
    const double r = sigma / (1 - sigma);
    t->X = (1 - sigma) / sigma * g01;
    t->B_sigma = std::pow(t->X, -r);
    t->A_sigma = (1 - sigma) * t->B_sigma;
    t->A1_slope = r;
    t->A1_intercept = -r * std::log(t->X) - g10 / (sigma * g01);
    t->A1_intercept_printed = r * (-std::log(t->X) + (1 - sigma) / sigma * t->a1 / t->a0);
    t->B1_slope = r;
    t->B1_intercept = std::log(t->B_sigma) - g11 / g01;
  } else {
    t->A = 0.5 * g01 - std::log(2.0);
    t->A_closed = 1 + 0.5 * t->a0 - std::log(2.0);
    t->b1 = -g01 * g01 / 8 - 0.5 * g11;
    t->a1_chain = t->b1 + 0.5 * g01 + 0.5 * (g11 - g10);
    t->a1_closed = -t->a0 * t->a0 / 8 + 0.5 * t->a1 + 0.5;
  }
  (void)g00;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = memo[sigma];
  if (!slot) slot = std::move(t);
  return *slot;
}

TwoRouteCheck crosscheck_two_routes() {
  TwoRouteCheck out;
  const IntegralValue g00 = g_integral(1.0, 0, 0);
  out.a_via_g = 1 + 0.5 * g00.value - std::log(2.0);
  // 1 + int_0^inf h_*(u)/u^2 du, h(u) = g(u/2), h_* = h - u for u >= 1
  double value = 0.0, err = g00.error;
  const double e = 2 * kEps, big = 2 * kBig;
  {
    const auto& c = small_coeffs();
    double last = 0.0;
    for (int k = 1; k < int(c.size()); ++k) {
      const double t = c[k] * std::pow(0.5, 2 * k) * lower(2 * k - 2.0, 0, e);
      value += t;
      last = std::abs(t);
    }
    err += last;
  }
  auto hstar = [](double u) {
    const double h = specfun::g_deriv({u, 0, Variant::h});
    return u < 1.0 ? h : h - u;
  };
  for (auto [w0, w1] : {std::pair{std::log(e), 0.0}, std::pair{0.0, std::log(big)}}) {
    auto f = [&](double w) {
      double u = std::exp(w);
      if (w1 > 0 && u < 1.0) u = 1.0;
      return hstar(u) * std::exp(-w);
    };
    const IntegralValue p = panels(f, w0, w1, 0.25);
    value += p.value;
    err += p.error;
  }
  {
    // h(u) - u = -1.5 log u + 1.5 log 2 - 0.5 log(4 pi) + sum d_k 2^k u^{-k}
    const auto& d = large_coeffs();
    const int K = large_terms(kBig);
    double s = -1.5 * upper(-2.0, 1, big) + (1.5 * std::log(2.0) - 0.5 * std::log(4 * pi)) * upper(-2.0, 0, big);
    for (int k = 1; k <= K; ++k) s += d[k] * std::pow(2.0, k) * upper(-2.0 - k, 0, big);
    value += s;
    err += std::abs(d[K + 1] * std::pow(2.0, K + 1) * upper(-3.0 - K, 0, big));
  }
  out.a_via_h = 1 + value;
  out.error = err;
  // 0.5 int_{1/2}^1 (h_*(2u) - g_*(u))/u^2 du
  out.log2_piece = 0.5 * quad::integrate(
                             [&](double u) {
                               const double gs = specfun::g_deriv({u, 0, Variant::g_star});
                               return (hstar(2 * u) - gs) / (u * u);
                             },
                             0.5, 1.0, 40);
  return out;
}

}  // namespace eulerlab::asymconst
