#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "divsel/common.hpp"

namespace divsel {

// Deterministic sampler built on mt19937_64 (whose output sequence is fixed
// by the standard) with hand-rolled transforms, so identical seeds give
// identical streams on every platform and toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return (eng_() >> 11) * 0x1.0p-53;
  }

  double uniform_pos() {  // (0, 1)
    for (;;) {
      const double u = uniform();
      if (u > 0.0) return u;
    }
  }

  double normal() {  // Marsaglia polar
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
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  long long poisson(double mean) {
    require(mean >= 0.0, "poisson mean must be nonnegative");
    if (mean < 10.0) {  // inversion by sequential search
      const double l = std::exp(-mean);
      long long k = 0;
      double prod = uniform_pos();
      while (prod > l) {
        prod *= uniform_pos();
        ++k;
      }
      return k;
    }
    // PTRS transformed rejection (Hormann).
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::abs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          kf * std::log(mean) - mean - std::lgamma(kf + 1.0))
        return static_cast<long long>(kf);
    }
  }

  double gamma(double shape, double scale) {  // Marsaglia-Tsang
    require(shape > 0.0 && scale > 0.0, "gamma parameters must be positive");
    if (shape < 1.0)
      return gamma(shape + 1.0, scale) *
             std::pow(uniform_pos(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double cc = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      const double x = normal();
      const double t = 1.0 + cc * x;
      if (t <= 0.0) continue;
      const double v = t * t * t;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
        return d * v * scale;
    }
  }

  double invgauss(double mu, double lambda) {  // Michael-Schucany-Haas
    require(mu > 0.0 && lambda > 0.0, "invgauss parameters must be positive");
    const double nu = normal();
    const double y = nu * nu;
    const double x = mu + mu * mu * y / (2.0 * lambda) -
                     mu / (2.0 * lambda) *
                         std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
    if (uniform() <= mu / (mu + x)) return x;
    return mu * mu / x;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace divsel
