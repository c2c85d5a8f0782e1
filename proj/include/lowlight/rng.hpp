#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "lowlight/error.hpp"

namespace lowlight {

namespace detail {

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Stream-splitting rule: every random stream in the toolkit is derived from a
/// single root seed as
///
///   child = splitmix64(splitmix64(root ^ fnv1a64(purpose)) + index)
///
/// where `purpose` is a short label ("shuffle", "crop", "noise", "init", ...)
/// and `index` a purpose-local counter (epoch, step, layer, ...). Distinct
/// purposes and indices give statistically independent streams, and any stream
/// can be re-derived from (root, purpose, index) alone, which is what makes
/// checkpoint resume reproduce an uninterrupted run.
inline std::uint64_t derive_stream(std::uint64_t root, std::string_view purpose,
                                   std::uint64_t index = 0) {
  return detail::splitmix64(detail::splitmix64(root ^ detail::fnv1a64(purpose)) +
                            index);
}

/// Deterministic random stream. Built on std::mt19937_64 (bit-exact across
/// platforms by the standard) with hand-rolled variate transforms, since the
/// standard distribution objects are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw input_error("uniform_int: n must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x > limit);
    return x % n;
  }

  /// Standard normal via Box-Muller (two fresh uniforms per call).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  /// Poisson draw with rate lambda >= 0. Exact sampling: uniform-product
  /// inversion for small rates, Hormann's PTRS transformed rejection above.
  std::int64_t poisson(double lambda) {
    if (!std::isfinite(lambda) || lambda < 0.0)
      throw input_error("poisson: rate must be finite and non-negative");
    if (lambda == 0.0) return 0;
    if (lambda < 10.0) {
      const double limit = std::exp(-lambda);
      std::int64_t k = 0;
      double prod = uniform();
      while (prod > limit) {
        ++k;
        prod *= uniform();
      }
      return k;
    }
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::abs(u);
      const auto k = static_cast<std::int64_t>(
          std::floor((2.0 * a / us + b) * u + lambda + 0.43));
      if (us >= 0.07 && v <= vr) return k;
      if (k < 0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
          k * loglam - lambda - std::lgamma(static_cast<double>(k) + 1.0))
        return k;
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace lowlight
