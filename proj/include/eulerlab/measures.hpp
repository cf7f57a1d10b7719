#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace eulerlab::measures {

struct Tilt {
  double sigma = 1.0;
  double kappa = 0.0;
};

// Rule for integrals d(theta) over [0, pi].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;
};

QuadratureRule gauss_legendre_rule(int order);

// Rule on [0, pi] for integrands carrying exp(-re_s (a(theta) - a_peak)),
// a(theta) = log(1 - 2x cos(theta) + x^2), a_peak the minimum of re_s*a.
// For re_s*(a(pi) - a(0)) > 16 the nodes sit on the window where the
// exponent is above -T; |im_s| sets extra nodes for the oscillating phase.
QuadratureRule concentrated_rule(double x, double re_s, double im_s, int order);

// a(theta) - a_peak, evaluated without cancellation. peak_at_pi selects the
// maximum point (re_s < 0).
double log_factor_gap(double x, double theta, bool peak_at_pi);
double log_factor_peak(double x, bool peak_at_pi);

// (1+q)(1 - 2q cos 2theta + q^2)^{-1} (2/pi) sin^2 theta, q = 1/p; q = 0 is
// the Sato-Tate density.
double plancherel_density(double q, double theta);

class InverseCdfTable;

class AngleMeasure {
 public:
  static AngleMeasure sato_tate();
  // p >= 2; real p is accepted for the pseudo-prime buckets of the
  // smoothed tail mode.
  static AngleMeasure plancherel(double p);
  AngleMeasure tilted(double sigma, double kappa) const;

  bool is_sato_tate() const { return q_ == 0.0; }
  double p() const { return q_ == 0.0 ? 0.0 : 1.0 / q_; }
  double q() const { return q_; }
  const std::optional<Tilt>& tilt() const { return tilt_; }
  // log F_{sigma,p}(kappa) for a tilted measure, 0 otherwise.
  double log_normalizer() const { return log_norm_; }

  double density(double theta) const;
  double log_density(double theta) const;
  double cdf(double theta) const;
  // Peak-aware rule for expectations under this measure.
  QuadratureRule natural_rule(int order = 64) const;
  const InverseCdfTable& inverse_table() const;

 private:
  AngleMeasure() = default;
  struct Cache;
  double q_ = 0.0;
  std::optional<Tilt> tilt_;
  double x_ = 0.0;          // p^{-sigma}
  double a_peak_ = 0.0;     // a at the tilt peak
  double log_i_ = 0.0;      // log of the deflated normaliser
  double log_norm_ = 0.0;
  std::shared_ptr<Cache> cache_;
};

// Monotone cubic (Fritsch-Carlson) interpolant of theta(u) on 512 equal
// u-cells; the law of T(U), U uniform, has density 1/T'(u).
class InverseCdfTable {
 public:
  static constexpr int kCells = 512;
  explicit InverseCdfTable(const AngleMeasure& m);
  double theta(double u, double* dtheta_du = nullptr) const;

 private:
  std::vector<double> t_, m_;
};

double expect(const AngleMeasure& m, const std::function<double(double)>& f,
              const QuadratureRule& rule);
double expect(const AngleMeasure& m, const std::function<double(double)>& f);

double cdf(const AngleMeasure& m, double theta);
double density(const AngleMeasure& m, double theta);

std::vector<double> sample(const AngleMeasure& m, std::uint64_t seed, std::size_t n);

// One Sato-Tate draw by Newton inversion of (theta - sin theta cos theta)/pi.
double sato_tate_quantile(double u);

}  // namespace eulerlab::measures
