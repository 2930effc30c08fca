#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <string_view>

#include "sgm/types.hpp"

namespace sgm {

// splitmix64 finalizer: full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Key chaining: derive(k, w) folds one stream-id word into a key. Chains of
// derive() calls give statistically independent substreams, so every draw site
// can be keyed by (seed, ids...) and is independent of evaluation schedule.
constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t word) {
  return mix64(key ^ mix64(word ^ 0xA0761D6478BD642FULL));
}

inline std::uint64_t derive_str(std::uint64_t key, std::string_view tag) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a over the tag bytes
  for (unsigned char c : tag) h = (h ^ c) * 0x100000001B3ULL;
  return derive(key, h);
}

// Counter-based generator: the k-th output is mix64(key + k). Cheap to fork,
// reproducible regardless of how many variates other streams consumed.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<std::uint64_t>::max(); }
  result_type operator()() { return mix64(key_ + ++ctr_); }

  CounterRng fork(std::uint64_t word) const { return CounterRng(derive(key_, word)); }

  // uniform on (0,1): 53 mantissa bits, never exactly 0 or 1
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform_range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  std::uint64_t uniform_int(std::uint64_t n) {
    // multiply-shift; bias < 2^-64, irrelevant at simulation scale
    return static_cast<std::uint64_t>((static_cast<__uint128_t>((*this)()) * n) >> 64);
  }

  double normal() {
    if (have_spare_) { have_spare_ = false; return spare_; }
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline CounterRng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t k = mix64(seed ^ 0x8BB84B93962EACC9ULL);
  for (std::uint64_t w : path) k = derive(k, w);
  return CounterRng(k);
}

// Marsaglia–Tsang gamma sampler, unit scale. Handles shape < 1 via the
// G(a) = G(a+1) * U^{1/a} boost.
inline double draw_gamma(double shape, CounterRng& rng) {
  if (!(shape > 0.0)) fail("invalid_argument", "gamma shape must be positive");
  double boost = 1.0;
  if (shape < 1.0) {
    boost = std::pow(rng.uniform(), 1.0 / shape);
    shape += 1.0;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = rng.normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return boost * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return boost * d * v;
  }
}

inline double draw_gumbel(CounterRng& rng) { return -std::log(-std::log(rng.uniform())); }

// Standard Gumbel conditioned to be >= 0 (inverse CDF on u in [e^{-1}, 1)).
inline double draw_gumbel_positive(CounterRng& rng) {
  const double u = std::exp(-1.0) + (1.0 - std::exp(-1.0)) * rng.uniform();
  return -std::log(-std::log(u));
}

}  // namespace sgm
