#pragma once

#include <complex>
#include <stdexcept>

namespace eulerlab {

using Complex = std::complex<double>;

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

namespace specfun {

inline constexpr double kMaxArgument = 1e4;
inline constexpr double kSeriesCutoff = 20.0;
// Published ordinate for the first zero of G(iy); kept for comparison only,
// see first_imaginary_zero_of_g.
inline constexpr double kStatedFirstZero = 7.66;

// I_nu(z), nu in {0,1,2}. Accurate on Re z >= 0; the left half-plane is
// reached by I_nu(-z) = (-1)^nu I_nu(z).
Complex bessel_i(int nu, Complex z);

// e^{-z} I_nu(z) for Re z >= 0, finite where I_nu overflows.
Complex bessel_i_scaled(int nu, Complex z);

// G(z) = I_1(2z)/z, G(0) = 1.
Complex big_g(Complex z);

// g(z) = log G(z) on a neighbourhood of the positive real axis (principal
// branch pieces; continuous on discs around u > 0 of radius min(u/2, 1)).
Complex log_big_g(Complex z);

enum class Variant { g, g_star, h };

struct GDerivativeRequest {
  double u = 1.0;
  int order = 0;
  Variant variant = Variant::g;
};

// j-th derivative of g, g_* or h at u > 0. Orders >= 1 use a 64-node
// trapezoid rule on the circle of radius min(u/2, 1).
double g_deriv(const GDerivativeRequest& req);

// Smallest y > 0 with G(iy) = 0, i.e. j_{1,1}/2.
double first_imaginary_zero_of_g();

// log(1 + w) without cancellation for small |w|.
Complex log1p(Complex w);

}  // namespace specfun
}  // namespace eulerlab
