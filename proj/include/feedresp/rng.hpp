#pragma once

// Portable, reproducible random streams. Standard library distributions are
// implementation-defined, so every sampler used by the simulator is written
// here against a fixed bit generator.

#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <string_view>

namespace feedresp {

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a 64-bit hash.
constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Derives an independent stream key from a master seed and a key path,
/// e.g. (seed, user hash, post index).
constexpr std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = seed;
  std::uint64_t key = splitmix64(state);
  for (std::uint64_t k : path) {
    state = key ^ (k * 0xd1b54a32d192ed03ULL);
    key = splitmix64(state);
  }
  return key;
}

/// xoshiro256** 1.0 (Blackman & Vigna), seeded through splitmix64.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

 private:
  std::uint64_t s_[4];
};

/// A reproducible stream of variates.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}
  RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
      : gen_(derive_key(seed, path)) {}

  std::uint64_t bits() { return gen_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }

  /// Uniform integer on [0, bound) by modulo with rejection of the biased range.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = gen_();
      if (r >= threshold) return r % bound;
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  /// Standard normal via the Marsaglia polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  double lognormal(double location, double scale) {
    return std::exp(location + scale * normal());
  }

  /// Number of failures before the first success, success probability p.
  std::int64_t geometric_failures(double p) {
    if (p >= 1.0) return 0;
    return static_cast<std::int64_t>(std::floor(std::log(uniform_pos()) / std::log1p(-p)));
  }

  /// Gamma(shape, 1) by Marsaglia & Tsang.
  double gamma(double shape) {
    if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform_pos(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
  }

  /// Binomial(n, p) by skipping geometric gaps between successes; O(n min(p, 1-p)).
  std::int64_t binomial(std::int64_t n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - binomial(n, 1.0 - p);
    std::int64_t successes = 0;
    std::int64_t position = geometric_failures(p);
    while (position < n) {
      ++successes;
      position += 1 + geometric_failures(p);
    }
    return successes;
  }

  /// Poisson(mean), as a sum of multiplication-method draws over chunks of
  /// mean at most 500 to avoid underflow.
  std::int64_t poisson(double mean) {
    std::int64_t total = 0;
    while (mean > 0.0) {
      const double chunk = std::min(mean, 500.0);
      mean -= chunk;
      const double limit = std::exp(-chunk);
      double prod = uniform_pos();
      while (prod > limit) {
        ++total;
        prod *= uniform_pos();
      }
    }
    return total;
  }

 private:
  Xoshiro256 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace feedresp
