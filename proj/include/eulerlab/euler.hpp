#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "eulerlab/specfun.hpp"

namespace eulerlab {

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace euler {

enum class TailMode { none, analytic, smoothed };

std::string to_string(TailMode m);
TailMode tail_mode_from_string(const std::string& s);

struct ModelConfig {
  double sigma = 1.0;
  std::uint64_t prime_cutoff = 10000;
  int quadrature_order = 64;
  TailMode tail_mode = TailMode::analytic;
  // smoothed mode: pseudo-primes on (prime_cutoff, smooth_limit]
  double smooth_limit = 0.0;
  double bucket_width = 0.05;

  void validate() const;
  // Largest |s| for which the quadratic tail model is used inside its
  // regime |s| * cutoff^{-sigma} <= 1/4 (infinite for TailMode::none).
  double s_limit() const;
  // Analytic mode with the smallest cutoff (floor 1e4) covering s_max, or
  // smoothed mode when that cutoff would exceed max_exact.
  static ModelConfig for_range(double sigma, double s_max, std::uint64_t max_exact = 200000);

  bool operator==(const ModelConfig&) const = default;
};

// One local factor of the product; exact primes have multiplicity 1.
struct Component {
  double y = 2.0;
  double x = 0.0;  // y^{-sigma}
  double q = 0.0;  // 1/y
  double multiplicity = 1.0;
};

struct CgfReport {
  double kappa = 0.0;
  std::vector<double> values;  // f^{(j)}(kappa), j = 0..j_max
  double tail_correction = 0.0;
  double truncation_error_bound = 0.0;
  double f(int j = 0) const { return values.at(j); }
};

// log of a complex number kept as (log modulus, unwrapped phase).
struct LogComplex {
  double log_modulus = 0.0;
  double phase = 0.0;
  Complex value() const { return std::polar(std::exp(log_modulus), phase); }
};

// Cumulants of 2*lambda(Theta) under the kappa-tilted local law.
struct LocalMoments {
  double log_f = 0.0;
  double k[5] = {0, 0, 0, 0, 0};
};

double lambda_theta(double p, double sigma, double theta);

// F_{sigma,p}(s) = E[exp(2 s lambda_{p,sigma}(Theta_p))] in log scale.
LogComplex local_mgf(double p, double sigma, Complex s, int order = 64);

// Cumulants of one local factor at real kappa; x = p^{-sigma}, q = 1/p.
LocalMoments local_moments(double x, double q, double kappa, int order);

class Model {
 public:
  explicit Model(const ModelConfig& cfg);

  const ModelConfig& config() const { return cfg_; }
  const std::vector<Component>& components() const { return comps_; }
  std::size_t exact_prime_count() const { return n_exact_; }
  double s_limit() const { return cfg_.s_limit(); }

  // Tail beyond the modelled factors: log F_tail(s) = s t1 + s^2 t2 / 2.
  double tail_t1() const { return t1_; }
  double tail_t2() const { return t2_; }
  double tail_t4() const { return t4_; }

  CgfReport cgf(double kappa, int j_max = 2) const;
  LogComplex log_mgf_ratio(double kappa, double v) const;
  Complex mgf_ratio(double kappa, double v) const;

  // Frozen tilt for repeated evaluation of F(kappa+iv)/F(kappa).
  class Tilted {
   public:
    double kappa() const { return kappa_; }
    LogComplex log_ratio(double v) const;

   private:
    friend class Model;
    const Model* model_ = nullptr;
    double kappa_ = 0.0;
    struct Local {
      double a_peak = 0.0;
      double gap_range = 0.0;
      int capacity = 0;
      std::vector<double> gap, w;  // w normalised to sum 1
    };
    std::vector<Local> locals_;
  };
  Tilted tilted(double kappa) const;

 private:
  void check_range(double abs_s) const;
  ModelConfig cfg_;
  std::vector<Component> comps_;
  std::size_t n_exact_ = 0;
  double t1_ = 0.0, t2_ = 0.0, t4_ = 0.0;
  double none_t1_ = 0.0, none_t2_ = 0.0;
};

std::shared_ptr<const Model> model_for(const ModelConfig& cfg);

CgfReport cgf(const ModelConfig& cfg, double kappa, int j_max = 2);
Complex mgf_ratio(const ModelConfig& cfg, double kappa, double v);

}  // namespace euler
}  // namespace eulerlab
