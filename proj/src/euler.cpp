#include "eulerlab/euler.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <mutex>
#include <numbers>

#include "eulerlab/measures.hpp"
#include "eulerlab/parallel.hpp"
#include "eulerlab/primes.hpp"
#include "eulerlab/quadrature.hpp"

namespace eulerlab::euler {

using std::numbers::pi;
using measures::concentrated_rule;
using measures::log_factor_gap;
using measures::log_factor_peak;
using measures::plancherel_density;

std::string to_string(TailMode m) {
  switch (m) {
    case TailMode::none:
      return "none";
    case TailMode::analytic:
      return "analytic";
    case TailMode::smoothed:
      return "smoothed";
  }
  return "?";
}

TailMode tail_mode_from_string(const std::string& s) {
  if (s == "none") return TailMode::none;
  if (s == "analytic") return TailMode::analytic;
  if (s == "smoothed") return TailMode::smoothed;
  throw DomainError("unknown tail mode: " + s);
}

void ModelConfig::validate() const {
  if (!(sigma > 0.5 + 1e-6 && sigma <= 1.0)) throw DomainError("ModelConfig: sigma must lie in (0.5, 1]");
  if (prime_cutoff < 100) throw DomainError("ModelConfig: prime cutoff must be >= 100");
  if (prime_cutoff > primes::kMaxSieveLimit) throw DomainError("ModelConfig: prime cutoff beyond 1e8");
  if (quadrature_order < 32) throw DomainError("ModelConfig: quadrature order must be >= 32");
  if (tail_mode != TailMode::none && !(2.0 * sigma > 1.0 + 1e-3))
    throw DomainError("ModelConfig: sigma too close to 1/2 for prime tails");
  if (tail_mode == TailMode::smoothed) {
    if (!(smooth_limit > double(prime_cutoff))) throw DomainError("ModelConfig: smooth limit must exceed the cutoff");
    if (!(smooth_limit < 1e250)) throw DomainError("ModelConfig: smooth limit too large");
    if (!(bucket_width > 0 && bucket_width <= 1.0)) throw DomainError("ModelConfig: bucket width must lie in (0, 1]");
  }
}

double ModelConfig::s_limit() const {
  switch (tail_mode) {
    case TailMode::none:
      return INFINITY;
    case TailMode::analytic:
      return 0.25 * std::pow(double(prime_cutoff), sigma);
    case TailMode::smoothed:
      return 0.25 * std::pow(smooth_limit, sigma);
  }
  return 0.0;
}

ModelConfig ModelConfig::for_range(double sigma, double s_max, std::uint64_t max_exact) {
  ModelConfig c;
  c.sigma = sigma;
  const double need = std::pow(4.0 * std::max(s_max, 1.0), 1.0 / sigma);
  if (need <= 1e4) {
    c.prime_cutoff = 10000;
  } else if (need <= double(max_exact)) {
    c.prime_cutoff = std::uint64_t(std::ceil(need));
  } else {
    c.prime_cutoff = 10000;
    c.tail_mode = TailMode::smoothed;
    c.smooth_limit = std::max(need * 1.01, 2e4);
  }
  c.validate();
  return c;
}

double lambda_theta(double p, double sigma, double theta) {
  const double x = std::pow(p, -sigma);
  return -std::log1p(-x) - 0.5 * log_factor_gap(x, theta, false);
}

LogComplex local_mgf(double p, double sigma, Complex s, int order) {
  if (order < 32) throw DomainError("local_mgf: order must be >= 32");
  if (!(p >= 2.0)) throw DomainError("local_mgf: p must be >= 2");
  const double x = std::pow(p, -sigma), q = 1.0 / p;
  if (s.real() * x < -0.25) throw DomainError("local_mgf: Re(s) below -p^sigma/4");
  const bool at_pi = s.real() < 0;
  const double a_peak = log_factor_peak(x, at_pi);
  const auto rule = concentrated_rule(x, s.real(), s.imag(), order);
  Complex acc = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double th = rule.nodes[k];
    const double gap = log_factor_gap(x, th, at_pi);
    acc += rule.weights[k] * plancherel_density(q, th) * std::exp(-s * gap);
  }
  if (acc == 0.0) throw NumericError("local_mgf: underflow in deflated integral");
  return {-s.real() * a_peak + std::log(std::abs(acc)), -s.imag() * a_peak + std::arg(acc)};
}

LocalMoments local_moments(double x, double q, double kappa, int order) {
  const bool at_pi = kappa < 0;
  const auto rule = concentrated_rule(x, kappa, 0.0, order);
  const std::size_t n = rule.nodes.size();
  std::vector<double> gap(n), w(n);
  double I = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double th = rule.nodes[k];
    gap[k] = log_factor_gap(x, th, at_pi);
    w[k] = rule.weights[k] * plancherel_density(q, th) * std::exp(-kappa * gap[k]);
    I += w[k];
  }
  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) mean += w[k] * gap[k];
  mean /= I;
  double m2 = 0, m3 = 0, m4 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = gap[k] - mean, d2 = d * d;
    m2 += w[k] * d2;
    m3 += w[k] * d2 * d;
    m4 += w[k] * d2 * d2;
  }
  m2 /= I;
  m3 /= I;
  m4 /= I;
  LocalMoments out;
  const double a_peak = log_factor_peak(x, at_pi);
  out.log_f = -kappa * a_peak + std::log(I);
  // 2 lambda = -a = -(a_peak + gap)
  out.k[0] = out.log_f;
  out.k[1] = -a_peak - mean;
  out.k[2] = m2;
  out.k[3] = -m3;
  out.k[4] = m4 - 3 * m2 * m2;
  return out;
}

Model::Model(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const double sigma = cfg_.sigma;
  const auto table = primes::shared_table(cfg_.prime_cutoff);
  n_exact_ = table->count_upto(cfg_.prime_cutoff);
  comps_.reserve(n_exact_);
  for (std::size_t i = 0; i < n_exact_; ++i) {
    const double p = table->primes[i];
    comps_.push_back({p, std::pow(p, -sigma), 1.0 / p, 1.0});
  }
  double beyond = double(cfg_.prime_cutoff);
  if (cfg_.tail_mode == TailMode::smoothed) {
    const double w0 = std::log(double(cfg_.prime_cutoff)), w1 = std::log(cfg_.smooth_limit);
    const int nb = std::max(1, int(std::ceil((w1 - w0) / cfg_.bucket_width - 1e-9)));
    // Count offset so that the sum of 1/p over exact and pseudo-primes keeps
    // Mertens' constant: sum_{p<=x} 1/p = log log x + M + o(1).
    constexpr double kMertens = 0.26149721284764278375542683861;
    quad::Sum recip;
    for (std::size_t i = n_exact_; i-- > 0;) recip += 1.0 / table->primes[i];
    const double offset = kMertens + std::log(w0) - recip.value();
    double carry = offset * std::exp(w0 + 0.5 * (w1 - w0) / nb);
    double ei_prev = std::expint(w0);
    for (int b = 0; b < nb; ++b) {
      const double a = w0 + b * (w1 - w0) / nb, c = w0 + (b + 1) * (w1 - w0) / nb;
      const double ei = std::expint(c);
      const double carry_in = carry;
      const double count = ei - ei_prev + carry;
      ei_prev = ei;
      const double m = std::round(count);
      if (m <= 0) {
        carry = count;
        continue;
      }
      carry = count - m;
      // y^{-sigma} at the bucket's mean of y^{-sigma} under dli
      const double first = quad::integrate([&](double w) { return std::exp((1 - sigma) * w) / w; }, a, c, 8);
      const double x = first / (count - carry_in);
      const double y = std::pow(x, -1 / sigma);
      comps_.push_back({y, x, 1.0 / y, m});
    }
    beyond = cfg_.smooth_limit;
  }
  auto tail = [&](double s) {
    if (cfg_.tail_mode == TailMode::smoothed) return primes::smoothed_power_tail(s, beyond);
    const double v = primes::prime_power_tail(s, cfg_.prime_cutoff);
    return std::max(v, 0.0);
  };
  if (2.0 * sigma > 1.0 + 1e-3) {
    const double a = tail(2 * sigma), b = tail(2 * sigma + 1);
    t4_ = std::max(tail(4 * sigma), primes::smoothed_power_tail(4 * sigma, beyond));
    if (cfg_.tail_mode != TailMode::none) {
      t1_ = -0.5 * a + 0.5 * b;
      t2_ = a + b;
    } else {
      // kept only for the truncation bound
      t1_ = 0.0;
      t2_ = 0.0;
      none_t1_ = -0.5 * a + 0.5 * b;
      none_t2_ = a + b;
    }
  }
}

void Model::check_range(double abs_s) const {
  if (abs_s > s_limit() * (1 + 1e-12))
    throw DomainError("kappa+iv outside the tail regime |s| cutoff^{-sigma} <= 1/4; increase the cutoff");
}

CgfReport Model::cgf(double kappa, int j_max) const {
  if (j_max < 0 || j_max > 6) throw DomainError("cgf: j_max must be in 0..6");
  if (!std::isfinite(kappa)) throw DomainError("cgf: kappa must be finite");
  check_range(std::abs(kappa));
  const std::size_t n = comps_.size();
  const int order = cfg_.quadrature_order;
  std::vector<LocalMoments> loc(n);
  parallel_for(n, [&](std::size_t i) { loc[i] = local_moments(comps_[i].x, comps_[i].q, kappa, order); });
  CgfReport r;
  r.kappa = kappa;
  r.values.assign(j_max + 1, 0.0);
  for (int j = 0; j <= std::min(j_max, 4); ++j) {
    quad::Sum s;
    for (std::size_t i = n; i-- > 0;) s += comps_[i].multiplicity * loc[i].k[j];
    r.values[j] = s.value();
  }
  r.tail_correction = kappa * t1_ + 0.5 * kappa * kappa * t2_;
  r.values[0] += r.tail_correction;
  if (j_max >= 1) r.values[1] += t1_ + kappa * t2_;
  if (j_max >= 2) r.values[2] += t2_;
  const double a = std::abs(kappa);
  r.truncation_error_bound = 2.0 * (a + a * a + a * a * a + a * a * a * a) * t4_;
  if (cfg_.tail_mode == TailMode::none) r.truncation_error_bound += std::abs(kappa * none_t1_) + 0.5 * kappa * kappa * none_t2_;
  if (j_max >= 5) {
    // contour of sum_c m_c Log S_c(s) on |s - kappa| = r; the linear part
    // -s a_peak does not reach orders >= 2
    const double rad = std::abs(kappa) >= 1.0 ? 0.5 * std::abs(kappa) : 0.5;
    check_range(std::abs(kappa) + rad);
    const int N = 64;
    std::vector<Complex> node_sum(N, 0.0);
    std::vector<std::vector<Complex>> per(n);
    parallel_for(n, [&](std::size_t i) {
      const Component& c = comps_[i];
      const bool at_pi = kappa < 0;
      double re_eff = kappa > 0 ? kappa - rad : kappa + rad;
      if ((kappa > 0) != (re_eff > 0)) re_eff = 0.0;
      const auto rule = concentrated_rule(c.x, re_eff, rad, order);
      std::vector<Complex> vals(N);
      double prev = 0.0, shift = 0.0;
      for (int k = 0; k < N; ++k) {
        const Complex s = kappa + rad * std::polar(1.0, 2 * pi * k / N);
        Complex acc = 0.0;
        for (std::size_t m = 0; m < rule.nodes.size(); ++m) {
          const double th = rule.nodes[m];
          acc += rule.weights[m] * plancherel_density(c.q, th) * std::exp(-s * log_factor_gap(c.x, th, at_pi));
        }
        double ph = std::arg(acc);
        if (k > 0) {
          while (ph + shift - prev > pi) shift -= 2 * pi;
          while (ph + shift - prev < -pi) shift += 2 * pi;
        }
        prev = ph + shift;
        vals[k] = Complex(std::log(std::abs(acc)), prev);
      }
      if (std::abs(vals[N - 1].imag() - vals[0].imag()) > 0.5 * pi)
        throw NumericError("cgf: local factor winds around zero on the contour");
      per[i] = std::move(vals);
    });
    for (int k = 0; k < N; ++k) {
      quad::Sum re, im;
      for (std::size_t i = n; i-- > 0;) {
        re += comps_[i].multiplicity * per[i][k].real();
        im += comps_[i].multiplicity * per[i][k].imag();
      }
      node_sum[k] = Complex(re.value(), im.value());
    }
    for (int j = 5; j <= j_max; ++j) {
      Complex acc = 0.0;
      for (int k = 0; k < N; ++k) acc += node_sum[k] * std::polar(1.0, -2 * pi * j * k / N);
      double fact = 1.0;
      for (int i = 2; i <= j; ++i) fact *= i;
      r.values[j] = (acc.real() * fact) / (N * std::pow(rad, j));
    }
  }
  if (j_max >= 2 && !(r.values[2] > 0)) throw NumericError("cgf: convexity violation (f'' <= 0)");
  return r;
}

Model::Tilted Model::tilted(double kappa) const {
  check_range(std::abs(kappa));
  Tilted t;
  t.model_ = this;
  t.kappa_ = kappa;
  const std::size_t n = comps_.size();
  t.locals_.resize(n);
  const bool at_pi = kappa < 0;
  parallel_for(n, [&](std::size_t i) {
    const Component& c = comps_[i];
    const auto rule = concentrated_rule(c.x, kappa, 0.0, cfg_.quadrature_order);
    auto& L = t.locals_[i];
    L.a_peak = log_factor_peak(c.x, at_pi);
    L.capacity = int(rule.nodes.size());
    L.gap.resize(rule.nodes.size());
    L.w.resize(rule.nodes.size());
    double I = 0.0, gmin = INFINITY, gmax = -INFINITY;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double th = rule.nodes[k];
      L.gap[k] = log_factor_gap(c.x, th, at_pi);
      L.w[k] = rule.weights[k] * plancherel_density(c.q, th) * std::exp(-kappa * L.gap[k]);
      I += L.w[k];
      gmin = std::min(gmin, L.gap[k]);
      gmax = std::max(gmax, L.gap[k]);
    }
    for (auto& w : L.w) w /= I;
    // same span criterion as concentrated_rule: nodes >= |v| * range + 32
    const double range = std::abs(kappa) * 2.0 * (std::log1p(c.x) - std::log1p(-c.x)) <= 16.0
                             ? 2.0 * (std::log1p(c.x) - std::log1p(-c.x))
                             : std::max(gmax - gmin, 1e-300);
    L.gap_range = range;
  });
  return t;
}

LogComplex Model::Tilted::log_ratio(double v) const {
  const Model& m = *model_;
  m.check_range(std::hypot(kappa_, v));
  const std::size_t n = locals_.size();
  quad::Sum lm, ph;
  const bool at_pi = kappa_ < 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Local& L = locals_[i];
    const Component& c = m.comps_[i];
    // S = 1 + d + i im, with d = -2 sum w sin^2(a/2) kept free of cancellation
    double d = 0.0, im = 0.0;
    if (std::abs(v) * L.gap_range + 32 <= L.capacity) {
      for (std::size_t k = 0; k < L.gap.size(); ++k) {
        const double a = v * L.gap[k];
        const double h = std::sin(0.5 * a);
        d -= 2 * L.w[k] * h * h;
        im -= L.w[k] * std::sin(a);
      }
    } else {
      const auto rule = concentrated_rule(c.x, kappa_, v, m.cfg_.quadrature_order);
      double den = 0.0;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double th = rule.nodes[k];
        const double gap = log_factor_gap(c.x, th, at_pi);
        const double w = rule.weights[k] * plancherel_density(c.q, th) * std::exp(-kappa_ * gap);
        const double h = std::sin(0.5 * v * gap);
        den += w;
        d -= 2 * w * h * h;
        im -= w * std::sin(v * gap);
      }
      d /= den;
      im /= den;
    }
    const double mod2m1 = 2 * d + d * d + im * im;
    if (mod2m1 <= -1.0) return {-INFINITY, 0.0};
    const double log_mod = 0.5 * std::log1p(mod2m1);
    const double arg = std::atan2(im, 1 + d);
    lm += c.multiplicity * log_mod;
    ph += c.multiplicity * (-v * L.a_peak + arg);
  }
  lm += -0.5 * v * v * m.t2_;
  ph += v * (m.t1_ + kappa_ * m.t2_);
  return {lm.value(), ph.value()};
}

LogComplex Model::log_mgf_ratio(double kappa, double v) const {
  if (v == 0.0) return {0.0, 0.0};
  return tilted(kappa).log_ratio(v);
}

Complex Model::mgf_ratio(double kappa, double v) const {
  if (v == 0.0) return 1.0;
  return log_mgf_ratio(kappa, v).value();
}

std::shared_ptr<const Model> model_for(const ModelConfig& cfg) {
  static std::mutex mu;
  static std::list<std::shared_ptr<const Model>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    for (auto it = cache.begin(); it != cache.end(); ++it)
      if ((*it)->config() == cfg) {
        auto m = *it;
        cache.erase(it);
        cache.push_front(m);
        return m;
      }
  }
  auto m = std::make_shared<const Model>(cfg);
  std::lock_guard<std::mutex> lock(mu);
  cache.push_front(m);
  while (cache.size() > 8) cache.pop_back();
  return m;
}

CgfReport cgf(const ModelConfig& cfg, double kappa, int j_max) { return model_for(cfg)->cgf(kappa, j_max); }

Complex mgf_ratio(const ModelConfig& cfg, double kappa, double v) { return model_for(cfg)->mgf_ratio(kappa, v); }

}  // namespace eulerlab::euler
