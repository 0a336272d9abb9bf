#include "divsel/normalizer.hpp"

#include <numbers>

namespace divsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLaplaceT = -20.0;
constexpr double kPi = std::numbers::pi;

// D_beta(x || 1) with analytic branches at the removable singularities.
double d_unit(double x, double beta) {
  if (std::abs(beta) < 1e-12) return x * std::log(x) - x + 1.0;
  if (std::abs(beta + 1.0) < 1e-12) return x - std::log(x) - 1.0;
  return (std::exp((beta + 1.0) * std::log(x)) + beta - (beta + 1.0) * x) /
         (beta * (beta + 1.0));
}

// Near beta = -1 the unit integrand factors exactly as a Gamma kernel times a
// smooth correction:
//   x^c exp(-D_{q-1}(x||1)/phi)
//     = e^{1/pt} x^{s-1} e^{-x/pt} exp(h(ln x)),   q = beta+1, pt = (1-q)phi,
//   s = c + 1 + 1/pt,   h(L) = (expm1(qL) - qL) / (q pt).
// At q = 0 the correction vanishes and Z1 = e^{1/pt} Gamma(s) pt^s. For small
// |q| with large pt the x^{s-1} tail carries mass over hundreds of log-units,
// which no affinely-mapped rule can resolve; the three helpers below handle
// that regime analytically or semi-analytically.

// Exact beta = -1 limit.
double log_normalizer_gamma_limit(double pt, double c) {
  const double s = c + 1.0 + 1.0 / pt;
  require(s > 0.0, "log_normalizer_unit: integral diverges at beta = -1");
  return 1.0 / pt + s * std::log(pt) + std::lgamma(s);
}

// beta in (-1, 0): expand exp(A x^q) termwise against the pure-exponential
// factor. All terms are positive, the term sequence is log-concave in j with
// peak index ~ 1/(q(1-q)phi), and the series is entire in A.
double log_normalizer_series(double q, double phi, double c) {
  require(c > -1.0, "log_normalizer_unit: integral diverges (c <= -1)");
  const double la = -(std::log1p(-q) + std::log(q) + std::log(phi));
  const double lb = -(std::log1p(-q) + std::log(phi));
  double peak = -kInf, acc = 0.0;
  for (long j = 0;; ++j) {
    const double sj = c + 1.0 + q * static_cast<double>(j);
    const double t = static_cast<double>(j) * la - std::lgamma(j + 1.0) +
                     std::lgamma(sj) - sj * lb;
    if (t > peak) {
      acc = acc * std::exp(peak - t) + 1.0;
      peak = t;
    } else {
      acc += std::exp(t - peak);
      if (t < peak - 46.0) break;
    }
    require(j < 2000000, "log_normalizer_unit: series budget exceeded");
  }
  return -1.0 / (q * phi) + peak + std::log(acc);
}

// ln of the Gamma-times-correction residual factor exp(h(ln x)) at L = ln x.
double strip_corr(double q, double pt, double L) {
  const double u = q * L;
  if (u > 600.0) return q < 0.0 ? -kInf : kInf;  // q>0 case is gated out
  return (std::expm1(u) - u) / (q * pt);
}

// Gamma-factorized quadrature for the remaining near -1 band. J is split at
// v = 1: below, e^{-v} is expanded analytically so each term maps the rule's
// own weight onto the v^{s+m-1} power tail (node scale 1/(s+m)); above, an
// affine shift keeps the weight native. Handles s << 1 exactly where an
// affine map cannot.
double log_normalizer_strip(double q, double pt, double s,
                            const QuadratureRule& rule) {
  const int n = rule.order;
  const double lpt = std::log(pt);
  std::vector<double> terms(n);
  constexpr int kM = 21;
  double lo[kM];
  for (int m = 0; m < kM; ++m) {
    const double scale = s + static_cast<double>(m);
    for (int i = 0; i < n; ++i)
      terms[i] =
          rule.log_weights[i] + strip_corr(q, pt, lpt - rule.nodes[i] / scale);
    lo[m] = -std::log(scale) + log_sum_exp(terms);
  }
  for (int i = 0; i < n; ++i)
    terms[i] = rule.log_weights[i] +
               (s - 1.0) * std::log1p(rule.nodes[i]) +
               strip_corr(q, pt, lpt + std::log1p(rule.nodes[i]));
  const double lhi = -1.0 + log_sum_exp(terms);
  const double top = std::max(lo[0], lhi);
  double acc = std::exp(lhi - top), fact = 1.0;
  for (int m = 0; m < kM; ++m) {
    acc += (m % 2 == 0 ? 1.0 : -1.0) * std::exp(lo[m] - top) / fact;
    fact *= static_cast<double>(m + 1);
  }
  require(acc > 0.0 && std::isfinite(acc),
          "log_normalizer_unit: quadrature breakdown near beta = -1");
  return 1.0 / pt + s * lpt + top + std::log(acc);
}

// K(u) with u = x^p, so that Z1 = (1/|p|) int exp(K(u)) du. The power
// substitution turns a non-integrable-looking or plateaued origin factor into
// a bounded one; p < 0 (possible for beta < -1) flips the axis.
struct UnitIntegrand {
  double beta, phi, c, p, coeff;

  UnitIntegrand(double beta_, double phi_, double c_, int m = 2)
      : beta(beta_), phi(phi_), c(c_) {
    constexpr double tol = 1e-10;
    if (std::abs(beta + 1.0) <= tol) {
      const double sigma0 = c + 1.0 / phi;
      p = sigma0 < 0.0 ? (sigma0 + 1.0) / m : 1.0;
    } else if (beta > -1.0) {
      p = c < 0.0 ? (c + 1.0) / m : 1.0;
    } else {
      p = c + 1.0 < 0.0 ? (c + 1.0) / m : 1.0;
    }
    coeff = (c + 1.0) / p - 1.0;
  }

  double K(double u) const {
    if (!(u > 0.0)) return -kInf;
    const double lu = std::log(u);
    const double lx = lu / p;
    if (lx > 690.0) return -kInf;  // x huge: divergence term always wins
    if (lx < -690.0) {             // x -> 0: exact origin limits per case
      const double cl = coeff != 0.0 ? coeff * lu : 0.0;
      if (std::abs(beta + 1.0) <= 1e-10) return cl + (lx + 1.0) / phi;
      if (beta > -1.0) return cl - 1.0 / ((beta + 1.0) * phi);
      return -kInf;  // D diverges as x^(beta+1)
    }
    const double x = std::exp(lx);
    double v = -d_unit(x, beta) / phi;
    if (coeff != 0.0) v += coeff * lu;
    return std::isnan(v) ? -kInf : v;
  }
};

struct ModeBracket {
  double a, b;
};

ModeBracket mode_scan(const UnitIntegrand& ui) {
  constexpr double lo = -650.0, hi = 650.0;
  constexpr int n = 2601;
  int best = 0;
  double bestv = -kInf;
  for (int i = 0; i < n; ++i) {
    const double t = lo + (hi - lo) * i / (n - 1);
    const double v = ui.K(std::exp(t));
    if (v > bestv) {
      bestv = v;
      best = i;
    }
  }
  const double step = (hi - lo) / (n - 1);
  const double ta = lo + step * std::max(best - 1, 0);
  const double tb = lo + step * std::min(best + 1, n - 1);
  return {std::exp(ta), std::exp(tb)};
}

double golden(const UnitIntegrand& ui, double a, double b) {
  const double inv = (std::sqrt(5.0) - 1.0) / 2.0;
  double la = std::log(a), lb = std::log(b);
  double x1 = lb - inv * (lb - la), x2 = la + inv * (lb - la);
  double f1 = ui.K(std::exp(x1)), f2 = ui.K(std::exp(x2));
  for (int i = 0; i < 200; ++i) {
    if (f1 < f2) {
      la = x1;
      x1 = x2;
      f1 = f2;
      x2 = la + inv * (lb - la);
      f2 = ui.K(std::exp(x2));
    } else {
      lb = x2;
      x2 = x1;
      f2 = f1;
      x1 = lb - inv * (lb - la);
      f1 = ui.K(std::exp(x1));
    }
  }
  return std::exp(0.5 * (la + lb));
}

// Smallest d > 0 with K(u0 + sign d) <= k0 - drop (distance to a level set).
double cross(const UnitIntegrand& ui, double u0, double k0, double drop,
             double sign) {
  double d = std::max(u0, 1e-300) * 1e-9;
  for (;;) {
    const double u = u0 + sign * d;
    if ((sign < 0.0 && u <= 0.0) || ui.K(u) <= k0 - drop) break;
    d *= 2.0;
    if (d > 1e290) return d;
  }
  double lo = d / 2.0, hi = d;
  for (int i = 0; i < 120; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double u = u0 + sign * mid;
    if ((sign < 0.0 && u <= 0.0) || ui.K(u) <= k0 - drop)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double decay_len(const UnitIntegrand& ui, double u, double scale) {
  const double d =
      std::abs(ui.K(u + 0.01 * scale) - ui.K(u - 0.01 * scale)) / (0.02 * scale);
  if (!(d > 0.0) || !std::isfinite(d)) return kInf;
  return 1.0 / d;
}

double lse_rule_terms(const QuadratureRule& rule,
                      const std::function<double(double)>& kfn) {
  const int n = rule.order;
  std::vector<double> terms(n);
  for (int i = 0; i < n; ++i)
    terms[i] = rule.log_weights[i] + rule.nodes[i] + kfn(rule.nodes[i]);
  return log_sum_exp(terms);
}

// Laplace expansion around the mode x0 = 1 + delta, delta = O(c phi).
// D(x0)/phi evaluated directly cancels catastrophically, so D is expanded:
// D(1+d) = d^2/2 + (b-1) d^3/6 + (b-1)(b-2) d^4/24 + O(d^5).
double log_normalizer_unit_laplace(double beta, double phi, double c) {
  const double b1 = beta - 1.0, b2 = (beta - 1.0) * (beta - 2.0);
  double d = c * phi;
  for (int i = 0; i < 4; ++i)
    d = c * phi / (1.0 + d) - b1 * d * d / 2.0 - b2 * d * d * d / 6.0;
  const double x = 1.0 + d;
  const double dq = d * d / 2.0 + b1 * d * d * d / 6.0 + b2 * d * d * d * d / 24.0;
  const double a = std::pow(x, beta - 1.0) / phi + c / (x * x);
  const double f3 = b1 * std::pow(x, beta - 2.0) / phi - 2.0 * c / (x * x * x);
  const double f4 =
      b2 * std::pow(x, beta - 3.0) / phi + 6.0 * c / (x * x * x * x);
  const double corr = -f4 / (8.0 * a * a) + 5.0 * f3 * f3 / (24.0 * a * a * a);
  return c * std::log1p(d) - dq / phi + 0.5 * std::log(2.0 * kPi / a) +
         std::log1p(corr);
}

}  // namespace

double log_normalizer_unit(double beta, double phi, double c,
                           const QuadratureRule& rule) {
  require(phi > 0.0, "log_normalizer_unit requires phi > 0");
  if (std::log(phi) < kLaplaceT) return log_normalizer_unit_laplace(beta, phi, c);

  const double q = beta + 1.0;
  if (q > 1e-12 && q < 1.0 &&
      -(std::log(q) + std::log1p(-q) + std::log(phi)) <= std::log(1.0e5))
    return log_normalizer_series(q, phi, c);
  if (std::abs(q) <= 0.35) {
    const double pt = (1.0 - q) * phi;
    const double s = c + 1.0 + 1.0 / pt;
    if (std::abs(q) <= 1e-12) return log_normalizer_gamma_limit(pt, c);
    if (s > 1e-10 && s <= 3.0 && (q > 0.0 || -q * pt <= 0.2))
      return log_normalizer_strip(q, pt, s, rule);
  }

  const int n = rule.order;
  const double zmax = rule.nodes[n - 1];
  const UnitIntegrand ui(beta, phi, c);
  const ModeBracket br = mode_scan(ui);
  const double u0 = golden(ui, br.a, br.b);
  const double k0 = ui.K(u0);
  const double sig_r = cross(ui, u0, k0, 0.5, +1.0);
  const double sig_l = cross(ui, u0, k0, 0.5, -1.0);
  const double sigma = std::min(sig_l, sig_r);
  const double d_tail = cross(ui, u0, k0, 60.0, +1.0);
  const double d2r = cross(ui, u0, k0, 2.0, +1.0);
  const double d30r = cross(ui, u0, k0, 30.0, +1.0);
  const double ell_r2 = decay_len(ui, u0 + d2r, std::min(sig_r, d2r));
  const double ell_r30 = decay_len(ui, u0 + d30r, std::min(sig_r, d30r));
  const double d2l = cross(ui, u0, k0, 2.0, -1.0);
  const double d30l = cross(ui, u0, k0, 30.0, -1.0);
  const double ul2 = std::max(u0 - d2l, 0.0);
  const double ul30 = std::max(u0 - d30l, 0.0);
  const double ell_l2 = ul2 > 0.0 ? decay_len(ui, ul2, std::min(sig_l, d2l)) : kInf;
  const double ell_l30 =
      ul30 > 0.0 ? decay_len(ui, ul30, std::min(sig_l, d30l)) : kInf;
  const double lp = -std::log(std::abs(ui.p));
  const double span = u0 + d2r;  // reference length for left-mass relevance

  // Single affine rescaling s: cover the 60-nat right reach with the node
  // range while keeping enough nodes per local feature length (kappa).
  auto scheme_a = [&](double kappa, double* out) -> bool {
    const double s_min = (u0 + d_tail) / zmax;
    const double cap = n / (kPi * kPi * kappa * kappa);
    double s_max = kInf;
    if (u0 > 2.0 * sigma) s_max = std::min(s_max, cap * sigma * sigma / u0);
    const double ells[4] = {ell_r2, ell_r30, ell_l2, ell_l30};
    const double ats[4] = {u0 + d2r, u0 + d30r, ul2, ul30};
    const double rels[4] = {1.0, 1.0, ul2 / span, ul30 / span};
    for (int i = 0; i < 4; ++i)
      if (ats[i] > 0.0 && std::isfinite(ells[i]) && rels[i] > 1e-9)
        s_max = std::min(s_max, cap * ells[i] * ells[i] / ats[i]);
    if (s_min > s_max) return false;
    const double s = std::isfinite(s_max) ? std::sqrt(s_min * s_max)
                                          : std::sqrt(2.0) * s_min;
    *out = lp + std::log(s) +
           lse_rule_terms(rule, [&](double z) { return ui.K(s * z); });
    return true;
  };

  double result;
  for (double kappa : {3.0, 2.0, 1.4})
    if (scheme_a(kappa, &result)) return result;

  // Mode split: map the node range separately onto each flank of u0.
  const double cap = n / (kPi * kPi * 4.0);
  double s_r = std::max(sig_r, d_tail / zmax);
  if (std::isfinite(ell_r30)) {
    const double s_r_max = cap * ell_r30 * ell_r30 / std::max(d30r, 1e-300);
    if (s_r > s_r_max) s_r = std::sqrt((d_tail / zmax) * s_r_max);
  }
  const double right =
      std::log(s_r) +
      lse_rule_terms(rule, [&](double z) { return ui.K(u0 + s_r * z); });
  const double delta = k0 - ui.K(u0 * 1e-14);
  double left;
  if (sig_l / u0 < kPi * kPi * 1.4 * 1.4 / n ||
      (delta >= 46.0 && sig_l < 0.5 * u0)) {
    left = std::log(sig_l) + lse_rule_terms(rule, [&](double z) {
             const double u = u0 - sig_l * z;
             return u > 0.0 ? ui.K(u) : -kInf;
           });
  } else {
    left = std::log(u0) + lse_rule_terms(rule, [&](double z) {
             return ui.K(u0 * std::exp(-z)) - z;
           });
  }
  const double hi = std::max(left, right);
  return lp + hi + std::log1p(std::exp(std::min(left, right) - hi));
}

double eda_log_normalizer(double mu, double beta, double phi,
                          const QuadratureRule& rule) {
  require(mu > 0.0, "eda_log_normalizer requires mu > 0");
  require(phi > 0.0, "eda_log_normalizer requires phi > 0");
  const double c = 0.5 * (beta - 1.0);
  const double phip = phi * std::exp(-(beta + 1.0) * std::log(mu));
  return 0.5 * (beta + 1.0) * std::log(mu) + log_normalizer_unit(beta, phip, c, rule);
}

double ed_log_normalizer(double mu, double beta, const QuadratureRule& rule) {
  require(mu >= 0.0, "ed_log_normalizer requires mu >= 0");
  if (mu == 0.0) {
    // D(x||0) = x^{beta+1}/(beta(beta+1)) for beta > 0; substitute
    // y = x^{beta+1}/(beta(beta+1)) for a Gamma-integral closed form.
    require(beta > 0.0, "ed_log_normalizer at mu = 0 requires beta > 0");
    const double bp = beta + 1.0;
    return std::lgamma(1.0 / bp) + std::log(beta * bp) / bp - std::log(bp);
  }
  const double phip = std::exp(-(beta + 1.0) * std::log(mu));
  return std::log(mu) + log_normalizer_unit(beta, phip, 0.0, rule);
}

NormalizerTable::NormalizerTable(double beta, double c,
                                 const QuadratureRule& rule)
    : beta_(beta), c_(c), rule_(&rule), tmin_(-21.0), tmax_(23.0), dt_(0.125) {
  const int len = static_cast<int>(std::lround((tmax_ - tmin_) / dt_)) + 1;
  vals_.resize(len);
  slopes_.resize(len);
  for (int i = 0; i < len; ++i)
    vals_[i] = log_normalizer_unit(beta_, std::exp(tmin_ + dt_ * i), c_, rule);
  for (int i = 0; i < len; ++i) {
    if (i == 0)
      slopes_[i] = (vals_[1] - vals_[0]) / dt_;
    else if (i == len - 1)
      slopes_[i] = (vals_[len - 1] - vals_[len - 2]) / dt_;
    else
      slopes_[i] = (vals_[i + 1] - vals_[i - 1]) / (2.0 * dt_);
  }
}

double NormalizerTable::unit(double t) const {
  if (t < kLaplaceT) return log_normalizer_unit_laplace(beta_, std::exp(t), c_);
  const int len = static_cast<int>(vals_.size());
  if (t > tmax_ - 2.0 * dt_)
    return log_normalizer_unit(beta_, std::exp(t), c_, *rule_);
  int i = static_cast<int>((t - tmin_) / dt_);
  i = std::clamp(i, 1, len - 3);
  const double s = (t - (tmin_ + dt_ * i)) / dt_;
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);
  return h00 * vals_[i] + h10 * dt_ * slopes_[i] + h01 * vals_[i + 1] +
         h11 * dt_ * slopes_[i + 1];
}

double NormalizerTable::full(double mu, double phi) const {
  const double lmu = std::log(mu);
  return 0.5 * (beta_ + 1.0) * lmu + unit(std::log(phi) - (beta_ + 1.0) * lmu);
}

}  // namespace divsel
