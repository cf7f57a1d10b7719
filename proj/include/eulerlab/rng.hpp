#pragma once

#include <cstdint>

namespace eulerlab {

// Counter-based generator: the stream for (seed, stream, index) is a pure
// function of those three values (splitmix64 mixing of a counter).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
      : key_(mix(mix(seed ^ 0x6a09e667f3bcc909ULL) ^ mix(stream + 0xbb67ae8584caa73bULL) ^
                 (index * 0x9e3779b97f4a7c15ULL + 0x3c6ef372fe94f82bULL))) {}

  std::uint64_t next() { return mix(key_ + (++ctr_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform on the open interval (0, 1).
  double uniform() { return (double(next() >> 11) + 0.5) * 0x1.0p-53; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace eulerlab
