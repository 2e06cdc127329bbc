#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace bart {

// SplitMix64 finalizer; used both for seed derivation and engine seeding.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Named sub-streams so that one user-facing seed expands into independent
// per-chain / per-replicate / per-fold seeds by a fixed, documented rule:
//   seed(stream, index) = mix64(mix64(master ^ mix64(stream)) ^ index)
enum class SeedStream : std::uint64_t {
  Chain = 1,
  Replicate = 2,
  Permutation = 3,
  Fold = 4,
  Noise = 5,
  Data = 6,
  Holdout = 7,
};

inline std::uint64_t derive_seed(std::uint64_t master, SeedStream stream,
                                 std::uint64_t index) {
  return mix64(mix64(master ^ mix64(static_cast<std::uint64_t>(stream))) ^ index);
}

// Deterministic random generator. All distribution transforms are implemented
// here (not via std:: distributions) so that a fixed seed yields the same
// stream on every compiler and platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n); n >= 1.
  std::size_t uniform_below(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  // Standard normal via the polar method; the spare deviate is cached.
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

  double normal(double mean, double sd) { return mean + sd * normal(); }

  double exponential() { return -std::log1p(-uniform()); }

  // Gamma(shape, 1) by Marsaglia-Tsang; shape < 1 handled by boosting.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi_squared(double df) { return 2.0 * gamma(0.5 * df); }

  // Standard normal truncated to [lower, +inf). Plain rejection for
  // lower <= 0; Robert's exponential proposal for the upper tail.
  double std_normal_lower_truncated(double lower) {
    if (lower <= 0.0) {
      double z;
      do {
        z = normal();
      } while (z < lower);
      return z;
    }
    const double rate = 0.5 * (lower + std::sqrt(lower * lower + 4.0));
    for (;;) {
      const double z = lower + exponential() / rate;
      const double d = z - rate;
      if (uniform() <= std::exp(-0.5 * d * d)) return z;
    }
  }

  // Normal(mean, 1) truncated to [0, +inf) or (-inf, 0].
  double normal_left_of_zero(double mean) {
    return mean - std_normal_lower_truncated(mean);
  }
  double normal_right_of_zero(double mean) {
    return mean + std_normal_lower_truncated(-mean);
  }

  // Fisher-Yates shuffle; depends only on this generator's stream.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_below(i)]);
    }
  }

  // Index draw from unnormalized nonnegative weights (at least one positive).
  std::size_t weighted_index(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bart
