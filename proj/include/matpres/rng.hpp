#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "matpres/complexval.hpp"
#include "matpres/exact.hpp"

namespace matpres {

/// Seed used by every randomized routine unless the caller overrides it.
constexpr std::uint64_t kDefaultSeed = 20240814;

/// Deterministic RNG: the standardized mt19937_64 stream plus hand-rolled
/// transforms, so identical seeds give identical draws on every platform
/// (std::uniform_real_distribution and friends make no such promise).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t u64() { return eng_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t int_range(std::int64_t lo, std::int64_t hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  /// Standard normal via Box–Muller (pairs cached).
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 == 0.0);
    u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  /// Random complex unit vector (Gaussian components, normalized).
  CVec<double> unit_vector(int m) {
    CVec<double> v(m);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (int i = 0; i < m; ++i) {
        v[i] = Cplx<double>(gaussian(), gaussian());
        norm2 += v[i].re * v[i].re + v[i].im * v[i].im;
      }
    } while (norm2 == 0.0);
    double s = 1.0 / std::sqrt(norm2);
    for (auto& z : v) z *= s;
    return v;
  }

  /// Small rational with numerator in [-num_max, num_max] and denominator in
  /// [1, den_max] — the exact-mode analogue of a uniform draw.
  Rational small_rational(int num_max = 4, int den_max = 3) {
    return Rational(int_range(-num_max, num_max), int_range(1, den_max));
  }

 private:
  std::mt19937_64 eng_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace matpres
