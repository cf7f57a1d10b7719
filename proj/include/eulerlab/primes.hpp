#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace eulerlab::primes {

inline constexpr std::uint64_t kMaxSieveLimit = 100'000'000;

struct PrimeTable {
  std::uint64_t limit = 0;
  std::vector<std::uint32_t> primes;

  std::size_t count_upto(std::uint64_t x) const;
};

PrimeTable sieve(std::uint64_t limit);

// Shared read-only table covering at least `limit`; grows on demand.
std::shared_ptr<const PrimeTable> shared_table(std::uint64_t limit);

// Riemann zeta for real s > 1 (Euler-Maclaurin, N = 10, 10 correction terms).
double zeta(double s);

// P(s) = sum_p p^{-s} = sum_n mu(n)/n log zeta(ns).
double prime_zeta(double s);

// sum_{p > P} p^{-s}, P <= kMaxSieveLimit.
double prime_power_tail(double s, std::uint64_t cutoff);

// sum_{p <= P} p^{-s}, compensated.
double prime_power_sum(double s, std::uint64_t cutoff);

// li(y) = Ei(log y).
double li(double y);

// int_Y^inf t^{-s} dt / log t = E1((s-1) log Y): the prime-density smoothed
// counterpart of prime_power_tail, usable for Y beyond the sieve.
double smoothed_power_tail(double s, double y);

}  // namespace eulerlab::primes
