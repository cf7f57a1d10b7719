#include "eulerlab/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace eulerlab::specfun {

namespace {

using std::numbers::pi;
using quad_t = __float128;

struct Cq {
  quad_t re, im;
};

Cq mul(Cq a, Cq b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }

// Power series sum_{k >= k0} (z/2)^{2k+nu} / (k! (k+nu)!). Quad precision
// is used when the terms are much larger than the sum (near the imaginary
// axis), where double loses about (|z| - |Re z|)/ln 10 digits.
Complex series_i(int nu, Complex z, int k0 = 0) {
  const Complex w = 0.25 * z * z;
  const bool wide = std::abs(z) - std::abs(z.real()) > 4.0;
  if (!wide) {
    Complex t = std::pow(0.5 * z, nu);
    for (int j = 2; j <= nu; ++j) t /= double(j);
    Complex s = 0.0;
    for (int k = 0; k < 400; ++k) {
      if (k > 0) t *= w / (double(k) * double(k + nu));
      if (k >= k0) s += t;
      if (k > std::abs(w) && std::abs(t) <= 1e-18 * std::abs(s)) break;
      if (t == 0.0) break;
    }
    return s;
  }
  Cq half{quad_t(0.5) * quad_t(z.real()), quad_t(0.5) * quad_t(z.imag())};
  Cq ww = mul(half, half);
  Cq t{1, 0};
  for (int j = 0; j < nu; ++j) t = mul(t, half);
  for (int j = 2; j <= nu; ++j) t = {t.re / j, t.im / j};
  Cq s{0, 0};
  for (int k = 0; k < 400; ++k) {
    if (k > 0) {
      t = mul(t, ww);
      const quad_t d = quad_t(k) * quad_t(k + nu);
      t = {t.re / d, t.im / d};
    }
    if (k >= k0) s = {s.re + t.re, s.im + t.im};
    const double tm = std::hypot(double(t.re), double(t.im));
    const double sm = std::hypot(double(s.re), double(s.im));
    if (k > std::abs(w) && tm <= 1e-30 * sm) break;
    if (tm == 0.0) break;
  }
  return {double(s.re), double(s.im)};
}

// Asymptotic pieces for |z| > kSeriesCutoff, Re z >= 0:
// e^{-z} I_nu(z) = (S1 + c e^{-2z} S2) / sqrt(2 pi z), c = +-i e^{+-i nu pi}.
struct Asym {
  Complex s1, s2, c;
};

Asym asymptotic(int nu, Complex z) {
  const double mu = 4.0 * nu * nu;
  Complex s1 = 1.0, s2 = 1.0, term = 1.0;
  double last = 1.0;
  for (int k = 1; k < 80; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (8.0 * k) / z;
    const double m = std::abs(term);
    if (m > last) break;
    s1 += (k % 2 ? -1.0 : 1.0) * term;
    s2 += term;
    last = m;
    if (m < 1e-18) break;
  }
  Complex c = 0.0;
  if (z.imag() > 0)
    c = Complex(0, 1) * std::exp(Complex(0, nu * pi));
  else if (z.imag() < 0)
    c = Complex(0, -1) * std::exp(Complex(0, -nu * pi));
  return {s1, s2, c};
}

void check(int nu, Complex z) {
  if (nu < 0 || nu > 2) throw DomainError("bessel_i: order must be 0, 1 or 2");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("bessel_i: non-finite argument");
  if (std::abs(z) > kMaxArgument) throw DomainError("bessel_i: |z| beyond supported range");
}

// sum_{k>=1} z^{2k}/(k!(k+1)!) = G(z) - 1.
Complex g_minus_one(Complex z) { return series_i(1, 2.0 * z, 1) / z; }

Complex log_g_large(Complex z) {
  const Asym a = asymptotic(1, 2.0 * z);
  const Complex s = a.s1 + a.c * std::exp(-4.0 * z) * a.s2;
  return 2.0 * z - 0.5 * std::log(4.0 * pi) - 1.5 * std::log(z) + std::log(s);
}

double factorial(int j) {
  double f = 1.0;
  for (int i = 2; i <= j; ++i) f *= i;
  return f;
}

double g_real(double u) {
  if (2.0 * u <= kSeriesCutoff) return std::log1p(g_minus_one(Complex(u, 0)).real());
  return log_g_large(Complex(u, 0)).real();
}

double g_contour(double u, int j) {
  const double r = std::min(0.5 * u, 1.0);
  const int n = 64;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double phi = 2.0 * pi * k / n;
    const Complex e = std::polar(1.0, phi);
    acc += (log_big_g(u + r * e) * std::polar(1.0, -j * phi)).real();
  }
  return factorial(j) * acc / (n * std::pow(r, j));
}

double g_plain(double u, int j) { return j == 0 ? g_real(u) : g_contour(u, j); }

}  // namespace

Complex log1p(Complex w) {
  if (std::abs(w) < 0.1) {
    const Complex t = w / (2.0 + w), t2 = t * t;
    Complex s = 0.0, p = t;
    for (int k = 1; k < 60; k += 2) {
      const Complex term = p / double(k);
      s += term;
      if (std::abs(term) < 1e-18 * std::abs(s)) break;
      p *= t2;
    }
    return 2.0 * s;
  }
  return std::log(1.0 + w);
}

Complex bessel_i_scaled(int nu, Complex z) {
  check(nu, z);
  if (z.real() < 0) throw DomainError("bessel_i_scaled: requires Re z >= 0");
  if (std::abs(z) <= kSeriesCutoff) return std::exp(-z) * series_i(nu, z);
  const Asym a = asymptotic(nu, z);
  return (a.s1 + a.c * std::exp(-2.0 * z) * a.s2) / std::sqrt(2.0 * pi * z);
}

Complex bessel_i(int nu, Complex z) {
  check(nu, z);
  if (z.real() < 0) return (nu % 2 ? -1.0 : 1.0) * bessel_i(nu, -z);
  if (std::abs(z) <= kSeriesCutoff) return series_i(nu, z);
  const Asym a = asymptotic(nu, z);
  return (std::exp(z) * a.s1 + a.c * std::exp(-z) * a.s2) / std::sqrt(2.0 * pi * z);
}

Complex big_g(Complex z) {
  if (z == 0.0) return 1.0;
  check(1, 2.0 * z);
  if (2.0 * std::abs(z) <= kSeriesCutoff) return 1.0 + g_minus_one(z);
  return bessel_i(1, 2.0 * z) / z;
}

Complex log_big_g(Complex z) {
  if (z == 0.0) return 0.0;
  check(1, 2.0 * z);
  if (2.0 * std::abs(z) <= kSeriesCutoff) return log1p(g_minus_one(z));
  if (z.real() <= 0) throw DomainError("log_big_g: requires Re z > 0 beyond the series range");
  return log_g_large(z);
}

double g_deriv(const GDerivativeRequest& req) {
  const double u = req.u;
  const int j = req.order;
  if (!(u > 0) || !std::isfinite(u)) throw DomainError("g_deriv: u must be positive");
  if (j < 0 || j > 8) throw DomainError("g_deriv: order must be in 0..8");
  switch (req.variant) {
    case Variant::g:
      return g_plain(u, j);
    case Variant::h:
      return std::ldexp(g_plain(0.5 * u, j), -j);
    case Variant::g_star:
      if (j == 0) return u <= 1.0 ? g_real(u) : g_real(u) - 2.0 * u;
      if (u == 1.0) throw DomainError("g_deriv: g_star is not differentiable at u = 1");
      return g_plain(u, j) - (u > 1.0 && j == 1 ? 2.0 : 0.0);
  }
  return 0.0;
}

double first_imaginary_zero_of_g() {
  auto f = [](double y) { return big_g(Complex(0, y)).real(); };
  double a = 0.0, fa = f(a);
  double b = 0.0;
  for (;;) {
    b = a + 0.01;
    if (f(b) * fa <= 0) break;
    a = b;
  }
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    const double m = 0.5 * (a + b);
    if (f(m) * fa > 0)
      a = m;
    else
      b = m;
  }
  return 0.5 * (a + b);
}

}  // namespace eulerlab::specfun
