#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>

namespace vorpoly {

namespace stream_tag {
// purpose tags so sub-streams of one replicate never collide
constexpr std::uint64_t points = 1;
constexpr std::uint64_t edges = 2;
constexpr std::uint64_t sites = 3;
constexpr std::uint64_t modified = 4;
constexpr std::uint64_t animal = 5;
constexpr std::uint64_t aux = 6;
}  // namespace stream_tag

// splitmix64 finalizer; also the generator used to key streams.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t key_chain(std::uint64_t acc, std::uint64_t w) {
  return mix64(acc + 0x9E3779B97F4A7C15ull * (w + 0x632BE59BD9B4E019ull));
}

inline std::uint64_t hash_key(std::initializer_list<std::uint64_t> words) {
  std::uint64_t acc = 0x8B72E4A6F3C1D590ull;
  for (auto w : words) acc = key_chain(acc, w);
  return acc;
}

// xoshiro256** keyed deterministically from (seed, replicate, purpose, ...).
// Every replicate gets its own stream, so replicate results never depend on
// scheduling or on how many workers ran before them.
struct Rng {
  std::uint64_t s[4];

  static Rng keyed(std::initializer_list<std::uint64_t> words) {
    Rng r;
    std::uint64_t k = hash_key(words);
    // expand the key with splitmix64 steps
    for (int i = 0; i < 4; ++i) {
      k += 0x9E3779B97F4A7C15ull;
      r.s[i] = mix64(k);
    }
    if ((r.s[0] | r.s[1] | r.s[2] | r.s[3]) == 0) r.s[0] = 1;
    return r;
  }

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t next() {
    std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }

  // uniform in [0,1), 53 random bits
  double u01() { return (double)(next() >> 11) * 0x1p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  bool bernoulli(double p) { return u01() < p; }

  std::uint64_t below(std::uint64_t n) {  // unbiased
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    std::uint64_t lim = (~0ull) - (~0ull) % n;
    std::uint64_t x;
    do { x = next(); } while (x >= lim);
    return x % n;
  }

  // Knuth multiplication method; only safe for small means.
  int poisson_small(double mean) {
    double l = std::exp(-mean), p = 1.0;
    int k = 0;
    do {
      ++k;
      p *= u01();
    } while (p > l);
    return k - 1;
  }

  // Exact for any mean: Poisson(a+b) = Poisson(a) (+) Poisson(b).
  int poisson(double mean) {
    if (!(mean >= 0)) throw std::invalid_argument("poisson: mean < 0");
    int k = 0;
    while (mean > 12.0) {
      k += poisson_small(12.0);
      mean -= 12.0;
    }
    return k + poisson_small(mean);
  }

  // Poisson(mean) conditioned on >= 1, by CDF inversion (exact, no rejection
  // loop, stable for tiny means).
  int poisson_geq1(double mean) {
    if (!(mean > 0)) throw std::invalid_argument("poisson_geq1: mean <= 0");
    double u = u01();
    double norm = -std::expm1(-mean);  // P(X >= 1)
    double pmf = mean * std::exp(-mean);
    double cum = pmf;
    int k = 1;
    while (u * norm > cum && k < 10000) {
      ++k;
      pmf *= mean / k;
      cum += pmf;
    }
    return k;
  }
};

}  // namespace vorpoly
