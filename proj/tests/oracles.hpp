#pragma once
// Shared reference implementations for the test suites: an adaptive-quadrature
// normalizer oracle that is independent of the Gauss-Laguerre code under test,
// plus small numeric helpers used across suites.

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

namespace testutil {

inline double rel_err(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

// Scalar beta divergence d(x || m), written out independently of the library
// (with explicit KL and Itakura-Saito limit branches).
inline double ref_beta_div_scalar(double x, double m, double beta) {
  if (std::abs(beta) < 1e-8)
    return (x > 0.0 ? x * std::log(x / m) : 0.0) - x + m;
  if (std::abs(beta + 1.0) < 1e-8) return x / m - std::log(x / m) - 1.0;
  return (std::pow(x, beta + 1.0) + beta * std::pow(m, beta + 1.0) -
          (beta + 1.0) * x * std::pow(m, beta)) /
         (beta * (beta + 1.0));
}

inline double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (!std::isfinite(a)) return a;
  return a + std::log1p(std::exp(b - a));
}

// ln of integral_0^inf x^c exp(-d(x||mu)/phi) dx by adaptive quadrature.
// Substituting x = e^t turns any x^c endpoint singularity into smooth
// exponential behavior; tanh-sinh integrates a window [t_cut, t_hi] around
// the peak.  Below x_cut = mu e^{-R} the divergence is constant to relative
// accuracy ~x_cut^{min(beta+1,1)}/phi (beta > -1) or the integrand is an
// explicit power (beta = -1) or vanishes superexponentially (beta < -1), so
// the left tail is completed in closed form instead of widening the window:
// for beta near -1 with large phi, the t-domain decay slope (beta+1)/2 or
// 1/phi is so shallow that the tail carries mass over thousands of log
// units, far beyond any practical quadrature window.
inline double ref_log_normalizer(double mu, double beta, double phi, double c) {
  auto g = [&](double t) {
    const double x = std::exp(t);
    return (c + 1.0) * t - ref_beta_div_scalar(x, mu, beta) / phi;
  };
  const double t0 = std::log(mu);

  // Left cutoff deep enough that the closed-form tail is accurate to ~1e-12.
  double R;
  double log_tail = -std::numeric_limits<double>::infinity();
  if (beta > -1.0 + 1e-8) {
    const double s = std::min(beta + 1.0, 1.0);
    R = (45.0 + std::abs(s * t0) + std::abs(std::log(phi))) / s;
    // d -> mu^{beta+1}/(beta+1) as x -> 0 (all beta > -1 including the KL
    // limit), so the tail is e^{-A/phi} x_cut^{c+1}/(c+1).
    const double a0 = std::pow(mu, beta + 1.0) / (beta + 1.0);
    const double q = c + 1.0;
    log_tail = -a0 / phi + q * (t0 - R) - std::log(q);
  } else if (beta > -1.0 - 1e-8) {
    R = 45.0 + std::abs(std::log(phi));
    // Exact expansion at beta = -1: integrand x^{c+1/phi} mu^{-1/phi}
    // e^{1/phi} e^{-x/(mu phi)}; drop the final factor below the cutoff.
    const double q = c + 1.0 / phi + 1.0;
    log_tail = 1.0 / phi - t0 / phi + q * (t0 - R) - std::log(q);
  } else {
    // x^{beta+1} explodes as x -> 0, so the integrand dies superexponentially.
    R = 45.0;
  }
  const double t_cut = t0 - R;

  const int scan_n = 4000;
  const double t_top = t0 + 80.0;
  auto t_of = [&](int i) {
    return t_cut + (t_top - t_cut) * i / static_cast<double>(scan_n);
  };
  double peak = -std::numeric_limits<double>::infinity();
  int peak_i = 0;
  for (int i = 0; i <= scan_n; ++i) {
    const double v = g(t_of(i));
    if (v > peak) {
      peak = v;
      peak_i = i;
    }
  }
  int lo_i = peak_i, hi_i = peak_i;
  while (lo_i > 0 && g(t_of(lo_i)) > peak - 760.0) --lo_i;
  while (hi_i < scan_n && g(t_of(hi_i)) > peak - 760.0) ++hi_i;
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto f = [&](double t) {
    const double v = g(t) - peak;
    return v > -745.0 ? std::exp(v) : 0.0;
  };
  // Split at the peak so the node clustering of tanh-sinh (densest at the
  // interval ends) resolves a narrow mode regardless of the window width.
  const double integral = integrator.integrate(f, t_of(lo_i), t_of(peak_i)) +
                          integrator.integrate(f, t_of(peak_i), t_of(hi_i));
  return log_add_exp(peak + std::log(integral), log_tail);
}

// Exact Poisson log pmf at integer k.
inline double ref_poisson_logpmf(long long k, double lambda) {
  return static_cast<double>(k) * std::log(lambda) - lambda -
         std::lgamma(static_cast<double>(k) + 1.0);
}

// Central finite differences for first and second derivatives.
template <typename F>
double fd_first(const F& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

template <typename F>
double fd_second(const F& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

}  // namespace testutil
