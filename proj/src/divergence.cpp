#include "divsel/divergence.hpp"

namespace divsel {

namespace {

void check_pair(const Vector& x, const Vector& mu, bool need_pos_x) {
  require(x.size() == mu.size(), "x and mu lengths differ");
  require(x.size() > 0, "empty data");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    require(mu[i] > 0.0, "mu must be strictly positive");
    require(need_pos_x ? x[i] > 0.0 : x[i] >= 0.0,
            need_pos_x ? "x must be strictly positive here"
                       : "x must be nonnegative");
  }
}

// sum x ln(x/mu) - x + mu, with 0 ln 0 = 0.
double kl_unnormalized(const Vector& x, const Vector& mu) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) s += x[i] * std::log(x[i] / mu[i]) - x[i] + mu[i];
    else s += mu[i];
  }
  return s;
}

double kl_normalized(const Vector& x, const Vector& mu) {
  const double sx = x.sum(), sm = mu.sum();
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xt = x[i] / sx, mt = mu[i] / sm;
    if (xt > 0.0) s += xt * std::log(xt / mt);
  }
  return s;
}

}  // namespace

double beta_div(const Vector& x, const Vector& mu, double beta) {
  const bool is_branch = std::abs(beta + 1.0) < kLimitEps;
  check_pair(x, mu, /*need_pos_x=*/beta < -1.0 + kLimitEps);
  if (std::abs(beta) < kLimitEps) return kl_unnormalized(x, mu);
  if (is_branch) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double r = x[i] / mu[i];
      s += r - std::log(r) - 1.0;
    }
    return s;
  }
  const double b = beta;
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    s += (xpow(x[i], b + 1.0) + b * xpow(mu[i], b + 1.0) -
          (b + 1.0) * x[i] * xpow(mu[i], b)) /
         (b * (b + 1.0));
  return s;
}

double alpha_div(const Vector& x, const Vector& mu, double alpha) {
  check_pair(x, mu, /*need_pos_x=*/alpha < kLimitEps);
  if (std::abs(alpha - 1.0) < kLimitEps) return kl_unnormalized(x, mu);
  if (std::abs(alpha) < kLimitEps) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      s += mu[i] * std::log(mu[i] / x[i]) - mu[i] + x[i];
    return s;
  }
  const double a = alpha;
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    s += (xpow(x[i], a) * xpow(mu[i], 1.0 - a) - a * x[i] + (a - 1.0) * mu[i]) /
         (a * (a - 1.0));
  return s;
}

double gamma_div(const Vector& x, const Vector& mu, double gamma) {
  check_pair(x, mu, /*need_pos_x=*/true);
  if (std::abs(gamma) < kLimitEps) return kl_normalized(x, mu);
  if (std::abs(gamma + 1.0) < kLimitEps) {
    // lim_{g->-1}: ln(mean of x/mu) - mean of ln(x/mu).
    const double m = static_cast<double>(x.size());
    double sr = 0.0, sl = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double r = x[i] / mu[i];
      sr += r;
      sl += std::log(r);
    }
    return std::log(sr / m) - sl / m;
  }
  const double g = gamma;
  double sx = 0.0, sm = 0.0, sxm = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sx += xpow(x[i], g + 1.0);
    sm += xpow(mu[i], g + 1.0);
    sxm += x[i] * xpow(mu[i], g);
  }
  return (std::log(sx) + g * std::log(sm) - (g + 1.0) * std::log(sxm)) /
         (g * (g + 1.0));
}

double renyi_div(const Vector& x, const Vector& mu, double rho) {
  require(rho > 0.0, "renyi_div requires rho > 0");
  check_pair(x, mu, /*need_pos_x=*/true);
  if (std::abs(rho - 1.0) < kLimitEps) return kl_normalized(x, mu);
  const double sx = x.sum(), sm = mu.sum();
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    s += xpow(x[i] / sx, rho) * xpow(mu[i] / sm, 1.0 - rho);
  return std::log(s) / (rho - 1.0);
}

Vector beta_div_grad_mu(const Vector& x, const Vector& mu, double beta) {
  check_pair(x, mu, /*need_pos_x=*/false);
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    g[i] = xpow(mu[i], beta - 1.0) * (mu[i] - x[i]);
  return g;
}

double connecting_scalar_beta(const Vector& x, const Vector& mu, double beta) {
  check_pair(x, mu, /*need_pos_x=*/false);
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    num += x[i] * xpow(mu[i], beta);
    den += xpow(mu[i], beta + 1.0);
  }
  return num / den;
}

double connecting_scalar_alpha(const Vector& x, const Vector& mu, double alpha) {
  check_pair(x, mu, /*need_pos_x=*/true);
  if (std::abs(alpha) < kLimitEps) {
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      num += mu[i] * std::log(mu[i] / x[i]);
      den += mu[i];
    }
    return std::exp(-num / den);
  }
  double num = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    num += xpow(x[i], alpha) * xpow(mu[i], 1.0 - alpha);
  return xpow(num / mu.sum(), 1.0 / alpha);
}

double scalar_mean_fit(const Vector& x, double /*beta*/) {
  require(x.size() > 0, "empty data");
  for (Eigen::Index i = 0; i < x.size(); ++i)
    require(x[i] > 0.0, "x must be strictly positive");
  return x.mean();
}

}  // namespace divsel
