#include "eulerlab/primes.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "eulerlab/quadrature.hpp"
#include "eulerlab/specfun.hpp"

namespace eulerlab::primes {

std::size_t PrimeTable::count_upto(std::uint64_t x) const {
  return std::upper_bound(primes.begin(), primes.end(), x) - primes.begin();
}

PrimeTable sieve(std::uint64_t limit) {
  if (limit < 2 || limit > kMaxSieveLimit) throw DomainError("sieve: limit out of range");
  PrimeTable t;
  t.limit = limit;
  // odd-only: index i stands for 2i+1
  const std::uint64_t n = (limit - 1) / 2 + 1;
  std::vector<bool> composite(n, false);
  for (std::uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= limit; ++i) {
    if (composite[i]) continue;
    const std::uint64_t p = 2 * i + 1;
    for (std::uint64_t j = p * p / 2; j < n; j += p) composite[j] = true;
  }
  t.primes.reserve(limit < 100 ? 32 : std::size_t(1.2 * limit / std::log(double(limit))));
  t.primes.push_back(2);
  for (std::uint64_t i = 1; i < n; ++i)
    if (!composite[i] && 2 * i + 1 <= limit) t.primes.push_back(std::uint32_t(2 * i + 1));
  return t;
}

std::shared_ptr<const PrimeTable> shared_table(std::uint64_t limit) {
  static std::mutex mu;
  static std::shared_ptr<const PrimeTable> cached;
  std::lock_guard<std::mutex> lock(mu);
  if (!cached || cached->limit < limit) {
    const std::uint64_t want = std::max<std::uint64_t>(limit, cached ? std::min(kMaxSieveLimit, 2 * cached->limit) : 0);
    cached = std::make_shared<const PrimeTable>(sieve(std::max<std::uint64_t>(want, 1000)));
  }
  return cached;
}

double zeta(double s) {
  if (!(s > 1.0)) throw DomainError("zeta: requires s > 1");
  // B_{2k}/(2k)!
  static const double b[] = {1.0 / 12,
                             -1.0 / 720,
                             1.0 / 30240,
                             -1.0 / 1209600,
                             1.0 / 47900160,
                             -691.0 / 1307674368000.0,
                             1.0 / 74724249600.0,
                             -3617.0 / 10670622842880000.0,
                             43867.0 / 5109094217170944000.0,
                             -174611.0 / 802857662698291200000.0};
  const int N = 10;
  quad::Sum sum;
  for (int n = 1; n < N; ++n) sum += std::pow(double(n), -s);
  const double Ns = std::pow(double(N), -s);
  sum += N * Ns / (s - 1.0);
  sum += 0.5 * Ns;
  double rising = s;  // s (s+1) ... (s+2k-2)
  double pw = Ns / N;  // N^{-s-1}
  for (int k = 1; k <= 10; ++k) {
    sum += b[k - 1] * rising * pw;
    rising *= (s + 2 * k - 1) * (s + 2 * k);
    pw /= double(N) * N;
  }
  return sum.value();
}

namespace {

// zeta(x) - 1 without cancellation for large x.
double zeta_minus_one(double x) {
  if (x < 20.0) return zeta(x) - 1.0;
  double s = 0.0;
  for (int n = 2; n < 1000; ++n) {
    const double t = std::pow(double(n), -x);
    s += t;
    if (t < 1e-18 * s) break;
  }
  return s;
}

int mobius(int n) {
  int m = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    m = -m;
  }
  return n > 1 ? -m : m;
}

}  // namespace

double prime_zeta(double s) {
  if (!(s > 1.0 + 1e-3)) throw DomainError("prime_zeta: s too close to 1");
  quad::Sum sum;
  for (int n = 1; n < 2000; ++n) {
    const double ns = n * s;
    // log zeta(x) ~ 2^{-x}
    if (n > 1 && ns * std::log(2.0) > 60.0) break;
    const int mu = mobius(n);
    if (mu == 0) continue;
    sum += mu * std::log1p(zeta_minus_one(ns)) / n;
  }
  return sum.value();
}

double prime_power_sum(double s, std::uint64_t cutoff) {
  if (cutoff < 2) return 0.0;
  if (cutoff > kMaxSieveLimit) throw DomainError("prime_power_sum: cutoff beyond sieve range");
  const auto table = shared_table(cutoff);
  const std::size_t n = table->count_upto(cutoff);
  // smallest terms first
  quad::Sum sum;
  for (std::size_t i = n; i-- > 0;) sum += std::pow(double(table->primes[i]), -s);
  return sum.value();
}

double prime_power_tail(double s, std::uint64_t cutoff) {
  if (!(s > 1.0 + 1e-3)) throw DomainError("prime_power_tail: s too close to 1");
  if (cutoff < 2) throw DomainError("prime_power_tail: cutoff must be >= 2");
  return prime_zeta(s) - prime_power_sum(s, cutoff);
}

double li(double y) {
  if (!(y > 1.0)) throw DomainError("li: requires y > 1");
  return std::expint(std::log(y));
}

double smoothed_power_tail(double s, double y) {
  if (!(s > 1.0) || !(y > 1.0)) throw DomainError("smoothed_power_tail: requires s > 1, y > 1");
  return -std::expint(-(s - 1.0) * std::log(y));
}

}  // namespace eulerlab::primes
