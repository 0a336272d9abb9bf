#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace divsel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Family parameters within this distance of a singular point (beta in {0,-1},
// alpha in {0,1}, gamma in {0,-1}, rho=1) are evaluated with the closed limit
// formula; the general expression loses all precision as 0/0 there.
inline constexpr double kLimitEps = 1e-4;

// Shared power helper: keeps beta<->alpha transformation identities bit-stable
// because every positive power in the library goes through the same exp/log.
inline double xpow(double x, double t) {
  if (t == 0.0) return 1.0;
  if (t == 1.0) return x;
  return std::exp(t * std::log(x));
}

inline double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double a : v)
    if (a > m) m = a;
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double a : v) s += std::exp(a - m);
  return m + std::log(s);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace divsel
