#pragma once

namespace eulerlab::asymconst {

inline constexpr double kMinSigma = 0.55;

struct IntegralValue {
  double value = 0.0;
  double error = 0.0;
};

// int_0^inf g^{(j)}(u) u^{j-1/sigma-1} (log u)^n du for sigma < 1;
// int_0^inf g_*^{(j)}(u) u^{j-2} (log u)^n du for sigma == 1.
IntegralValue g_integral(double sigma, int n, int j);

// int_0^inf g(y^{-sigma}) (log y)^n dy (g_* when sigma == 1), evaluated in
// the y variable as an independent route.
IntegralValue a_integral(double sigma, int n);

struct ConstantsTable {
  double sigma = 1.0;
  bool sigma_one = true;
  double g[3][3] = {};
  double g_err[3][3] = {};
  // y-route integrals: a0 = int g(y^{-sigma}) dy, a1 = int g(y^{-sigma}) log y dy
  double a0 = 0.0, a1 = 0.0, a0_err = 0.0, a1_err = 0.0;

  // sigma < 1: X = (1-sigma)/sigma g01, A = (1-sigma) X^{-sigma/(1-sigma)},
  // B = X^{-sigma/(1-sigma)}, A_1(x) = A1_slope x + A1_intercept, same for B_1.
  double X = 0.0, A_sigma = 0.0, B_sigma = 0.0;
  double A1_slope = 0.0, A1_intercept = 0.0;
  double A1_intercept_printed = 0.0;  // the printed closed form, kept for comparison
  double B1_slope = 0.0, B1_intercept = 0.0;

  // sigma == 1
  double A = 0.0, A_closed = 0.0;  // chain value and 1 + a0/2 - log 2
  double b1 = 0.0, a1_chain = 0.0, a1_closed = 0.0;
};

const ConstantsTable& expansion_constants(double sigma);

// sigma = 1: A as 1 + g00/2 - log 2 and as 1 + int h_*(u)/u^2 du with
// h(u) = g(u/2); the substitution accounts for the -log 2.
struct TwoRouteCheck {
  double a_via_g = 0.0;
  double a_via_h = 0.0;
  double log2_piece = 0.0;
  double error = 0.0;
};

TwoRouteCheck crosscheck_two_routes();

}  // namespace eulerlab::asymconst
