#include "divsel/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

namespace divsel {

namespace {

// Rescaled recursion up to degree m at z. Returns the scaled values of
// (L_m, L_{m-1}), the accumulated log scale, and the log of the largest
// intermediate magnitude (for the root-residual criterion).
struct ScaledPair {
  double lm;      // L_m(z) / exp(scale)
  double lm1;     // L_{m-1}(z) / exp(scale)
  double scale;   // ln of the common scale factor
  double logmax;  // ln max_k |L_k(z)|
};

ScaledPair laguerre_scaled(int m, double z) {
  double prev = 1.0, cur = 1.0 - z, scale = 0.0;
  double logmax = 0.0;
  if (m == 0) return {1.0, 0.0, 0.0, 0.0};
  for (int k = 1; k < m; ++k) {
    double next = ((2.0 * k + 1.0 - z) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
    const double mag = std::max(std::abs(cur), std::abs(prev));
    if (mag > 0.0) logmax = std::max(logmax, std::log(mag) + scale);
    if (mag > 1e150) {
      cur *= 1e-150;
      prev *= 1e-150;
      scale += 150.0 * std::log(10.0);
    }
  }
  return {cur, prev, scale, logmax};
}

// Compensated (double-double) arithmetic for the final refinement phase.
// The plain double recursion accumulates up to ~n^2 * eps relative error at
// small z for large n, which is what bounds both root placement and weight
// accuracy; the compensated pass removes that floor.
struct Dd {
  double hi, lo;
};

inline Dd two_sum(double a, double b) {
  const double s = a + b, bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

// Requires |a| >= |b| or a == 0.
inline Dd quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline Dd two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline Dd dd_add(Dd a, Dd b) {
  Dd s = two_sum(a.hi, b.hi);
  const Dd t = two_sum(a.lo, b.lo);
  Dd r = quick_two_sum(s.hi, s.lo + t.hi);
  return quick_two_sum(r.hi, r.lo + t.lo);
}

inline Dd dd_sub(Dd a, Dd b) { return dd_add(a, {-b.hi, -b.lo}); }

inline Dd dd_mul(Dd a, Dd b) {
  Dd p = two_prod(a.hi, b.hi);
  return quick_two_sum(p.hi, p.lo + (a.hi * b.lo + a.lo * b.hi));
}

inline Dd dd_mul_d(Dd a, double b) {
  Dd p = two_prod(a.hi, b);
  return quick_two_sum(p.hi, p.lo + a.lo * b);
}

inline Dd dd_div(Dd a, Dd b) {
  const double q1 = a.hi / b.hi;
  Dd r = dd_sub(a, dd_mul_d(b, q1));
  const double q2 = r.hi / b.hi;
  r = dd_sub(r, dd_mul_d(b, q2));
  const double q3 = r.hi / b.hi;
  Dd q = quick_two_sum(q1, q2);
  return dd_add(q, {q3, 0.0});
}

inline Dd dd_div_d(Dd a, double b) { return dd_div(a, {b, 0.0}); }

struct ScaledPairDd {
  Dd lm;          // L_m(z) / exp(scale)
  Dd lm1;         // L_{m-1}(z) / exp(scale)
  double scale;   // ln of the common scale factor
  double logmax;  // ln max_k |L_k(z)|
};

ScaledPairDd laguerre_scaled_dd(int m, Dd z) {
  Dd prev = {1.0, 0.0};
  Dd cur = dd_sub({1.0, 0.0}, z);
  double scale = 0.0, logmax = 0.0;
  if (m == 0) return {{1.0, 0.0}, {0.0, 0.0}, 0.0, 0.0};
  for (int k = 1; k < m; ++k) {
    const Dd coeff = dd_sub({2.0 * k + 1.0, 0.0}, z);
    const Dd next = dd_div_d(
        dd_sub(dd_mul(coeff, cur), dd_mul_d(prev, static_cast<double>(k))),
        k + 1.0);
    prev = cur;
    cur = next;
    const double mag = std::max(std::abs(cur.hi), std::abs(prev.hi));
    if (mag > 0.0) logmax = std::max(logmax, std::log(mag) + scale);
    if (mag > 1e150) {
      cur = dd_mul_d(cur, 1e-150);
      prev = dd_mul_d(prev, 1e-150);
      scale += 150.0 * std::log(10.0);
    }
  }
  return {cur, prev, scale, logmax};
}

// ln|x| for a double-double value.
inline double dd_log_abs(Dd x) {
  return std::log(std::abs(x.hi)) + std::log1p(x.lo / x.hi);
}

}  // namespace

std::pair<double, double> laguerre_eval(int n, double z) {
  require(n >= 0, "laguerre_eval requires n >= 0");
  if (n == 0) return {1.0, 0.0};
  double prev = 1.0, cur = 1.0 - z;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - z) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  // z L_n' = n (L_n - L_{n-1}); at z=0, L_n'(0) = -n.
  const double deriv = (z != 0.0) ? n * (cur - prev) / z : -static_cast<double>(n);
  return {cur, deriv};
}

QuadratureRule gauss_laguerre_rule(int n) {
  require(n >= 1 && n <= 10000, "gauss_laguerre_rule requires 1 <= n <= 10000");
  QuadratureRule rule;
  rule.order = n;
  rule.nodes.resize(n);
  rule.log_weights.resize(n);
  rule.weights.resize(n);

  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * n);
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * n);
    } else {
      const double ai = i - 1.0;
      z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - rule.nodes[i - 2]);
    }
    // Newton refinement, keeping the iterate with the smallest residual.
    // Near the root the residual hits the roundoff plateau of the recursion
    // (about n*eps*max|L_k|), so stop once it no longer improves.
    constexpr double kInf = std::numeric_limits<double>::infinity();
    double best_z = z, best_resid = kInf, best_logmax = 0.0;
    int stale = 0;
    bool final_eval = false;
    for (int it = 0; it < 60; ++it) {
      const ScaledPair p = laguerre_scaled(n, z);
      const double resid =
          (p.lm == 0.0) ? -kInf : std::log(std::abs(p.lm)) + p.scale;
      if (resid < best_resid) {
        best_resid = resid;
        best_z = z;
        best_logmax = p.logmax;
        stale = 0;
      } else {
        ++stale;
      }
      if (resid == -kInf || final_eval || stale >= 2) break;
      const double deriv = n * (p.lm - p.lm1) / z;  // same scale as p.lm
      if (deriv == 0.0)
        throw std::runtime_error("Laguerre Newton hit a zero derivative");
      const double step = p.lm / deriv;
      z -= step;
      // A negligible step means the next evaluation is final either way.
      if (std::abs(step) <= 1e-15 * std::abs(z)) final_eval = true;
    }
    // Polish with compensated arithmetic: a few more Newton steps whose
    // residuals are not limited by the double recursion's own roundoff.
    Dd zdd = {best_z, 0.0};
    double resid = kInf, resid_logmax = best_logmax;
    for (int it = 0; it < 4; ++it) {
      const ScaledPairDd p = laguerre_scaled_dd(n, zdd);
      resid = (p.lm.hi == 0.0) ? -kInf : dd_log_abs(p.lm) + p.scale;
      resid_logmax = p.logmax;
      if (resid == -kInf) break;
      const Dd deriv =
          dd_div(dd_mul_d(dd_sub(p.lm, p.lm1), static_cast<double>(n)), zdd);
      if (deriv.hi == 0.0)
        throw std::runtime_error("Laguerre Newton hit a zero derivative");
      const Dd step = dd_div(p.lm, deriv);
      zdd = dd_sub(zdd, step);
      if (std::abs(step.hi) <= 1e-28 * std::abs(zdd.hi)) break;
    }
    // Certify the root: |L_n| below 1e-14 * n * max_k |L_k|.
    if (!(resid < std::log(static_cast<double>(n)) + resid_logmax +
                      std::log(1e-14) ||
          resid == -kInf))
      throw std::runtime_error("Laguerre Newton refinement did not converge");
    z = zdd.hi;
    rule.nodes[i] = z;
    const ScaledPairDd q = laguerre_scaled_dd(n + 1, zdd);
    const double log_abs_lnp1 = dd_log_abs(q.lm) + q.scale;
    rule.log_weights[i] = dd_log_abs(zdd) -
                          2.0 * (std::log(n + 1.0) + log_abs_lnp1);
    rule.weights[i] = std::exp(rule.log_weights[i]);
    if (i > 0 && !(rule.nodes[i] > rule.nodes[i - 1]))
      throw std::runtime_error("Laguerre nodes out of order");
  }
  return rule;
}

const QuadratureRule& cached_rule(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, std::make_unique<QuadratureRule>(gauss_laguerre_rule(n)))
             .first;
  return *it->second;
}

double integrate_halfline(const std::function<double(double)>& log_f,
                          const QuadratureRule& rule) {
  const int n = rule.order;
  std::vector<double> terms(n);
  for (int i = 0; i < n; ++i)
    terms[i] = rule.log_weights[i] + rule.nodes[i] + log_f(rule.nodes[i]);
  return log_sum_exp(terms);
}

}  // namespace divsel
