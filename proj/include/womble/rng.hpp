#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace womble {

/// Seeded random source. All variate transforms live here so a given seed
/// reproduces the same stream regardless of the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// U(0,1), zero excluded.
  double uniform() {
    double u;
    do {
      u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    } while (u <= 0.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// N(0,1) by the Marsaglia polar method.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Gamma(shape, rate) by Marsaglia-Tsang.
  double gamma(double shape, double rate) {
    if (shape <= 0.0 || rate <= 0.0) {
      throw std::invalid_argument("gamma: shape and rate must be positive");
    }
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
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
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        return d * v / rate;
      }
    }
  }

  /// Beta(1, alpha) by inverse CDF.
  double beta1(double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("beta1: alpha must be positive");
    return 1.0 - std::pow(uniform(), 1.0 / alpha);
  }

  /// Exact Poisson draw; additivity keeps Knuth's product in range.
  long poisson(double mean) {
    if (mean < 0.0 || !std::isfinite(mean)) {
      throw std::invalid_argument("poisson: mean must be finite and non-negative");
    }
    long total = 0;
    while (mean > 30.0) {
      total += poisson_knuth(30.0);
      mean -= 30.0;
    }
    return total + poisson_knuth(mean);
  }

 private:
  long poisson_knuth(double mean) {
    const double limit = std::exp(-mean);
    long k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

}  // namespace womble
