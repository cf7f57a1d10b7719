#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace eulerlab::quad {

// Gauss-Legendre nodes and weights on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached; safe to call from several threads.
const Rule& gauss_legendre(int n);

template <class F>
double integrate(F&& f, double a, double b, int n) {
  const Rule& r = gauss_legendre(n);
  const double h = 0.5 * (b - a), c = 0.5 * (b + a);
  double s = 0.0;
  for (std::size_t k = 0; k < r.nodes.size(); ++k) s += r.weights[k] * f(c + h * r.nodes[k]);
  return s * h;
}

// Neumaier compensated summation.
class Sum {
 public:
  void add(double x) {
    const double t = s_ + x;
    if (std::abs(s_) >= std::abs(x))
      c_ += (s_ - t) + x;
    else
      c_ += (x - t) + s_;
    s_ = t;
  }
  Sum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

}  // namespace eulerlab::quad
