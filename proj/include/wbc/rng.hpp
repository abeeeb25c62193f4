#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "wbc/bits.hpp"

namespace wbc {

// Named substreams derived from the master seed. Every random decision in the
// library draws from a stream addressed by (master, stream, path...) so runs
// are reproducible and independent of worker count.
enum class Stream : uint64_t {
  Keys = 1,
  Messages = 2,
  Randomizer = 3,
  CarrierFill = 4,
  PrefixFill = 5,
  ChannelNoise = 6,
  Trials = 7,
  Estimator = 8,
  Bootstrap = 9,
  Synthetic = 10,
  Filler = 11,
};

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t derive_seed(uint64_t master, std::initializer_list<uint64_t> path) {
  uint64_t s = master ^ 0x6a09e667f3bcc909ULL;
  uint64_t out = splitmix64(s);
  for (uint64_t p : path) {
    s ^= p * 0x9e3779b97f4a7c15ULL;
    out = splitmix64(s);
  }
  return out;
}

inline uint64_t derive_seed(uint64_t master, Stream stream, std::initializer_list<uint64_t> path = {}) {
  uint64_t s = derive_seed(master, {static_cast<uint64_t>(stream)});
  for (uint64_t p : path) s = derive_seed(s, {p});
  return s;
}

// Thin deterministic wrapper: bit/uniform draws are spelled out by hand because
// std::uniform_* distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t u64() { return eng_(); }

  int bit() { return static_cast<int>(eng_() & 1u); }

  // Uniform double in [0, 1), 53 random bits.
  double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform index in [0, m), rejection sampled (no modulo bias).
  size_t below(size_t m) {
    if (m == 0) throw DimensionMismatch("empty range");
    uint64_t limit = UINT64_MAX - UINT64_MAX % m;
    uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return static_cast<size_t>(v % m);
  }

  Bits bits(size_t k) {
    Bits out(k);
    for (auto& b : out) b = static_cast<uint8_t>(bit());
    return out;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace wbc
