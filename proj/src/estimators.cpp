#include "divsel/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "divsel/densities.hpp"
#include "divsel/divergence.hpp"

namespace divsel {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int worker_count(int n_points) {
  int w = static_cast<int>(std::thread::hardware_concurrency());
  if (w <= 0) w = 1;
  if (const char* env = std::getenv("DIVSEL_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) w = v;
  }
  return std::clamp(w, 1, n_points);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int w = worker_count(n);
  if (w <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (int t = 0; t < w; ++t) {
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct PointEval {
  double profile = kNegInf;
  double phi = std::numeric_limits<double>::quiet_NaN();
  bool failed = false;
};

void validate_inputs(const Vector& x, const SelectionGrid& grid) {
  require(x.size() > 0, "empty data vector");
  require((x.array() > 0.0).all(), "data entries must be positive");
  require(grid.param_values.size() > 0, "empty parameter grid");
  require(grid.phi_values.size() > 0, "empty phi grid");
  for (Eigen::Index i = 1; i < grid.param_values.size(); ++i)
    require(grid.param_values[i] > grid.param_values[i - 1],
            "parameter grid must be increasing");
  require((grid.phi_values.array() > 0.0).all(),
          "phi grid values must be positive");
}

// Runs the per-point evaluator over the grid (grid points are independent;
// DIVSEL_THREADS caps the worker count) and assembles the result with
// lowest-index tie-breaking, so the outcome is schedule-independent.
SelectionResult scan(const SelectionGrid& grid, const std::string& name,
                     const std::function<PointEval(int)>& eval_point) {
  const int n = static_cast<int>(grid.param_values.size());
  std::vector<PointEval> points(n);
  std::mutex err_mutex;
  std::string first_error;
  parallel_for(n, [&](int i) {
    try {
      points[i] = eval_point(i);
    } catch (const std::exception& e) {
      points[i].failed = true;
      points[i].profile = kNegInf;
      std::lock_guard<std::mutex> lock(err_mutex);
      if (first_error.empty()) first_error = e.what();
    }
  });

  SelectionResult result;
  result.param_values = grid.param_values;
  result.profile_loglik.resize(n);
  result.per_point_phi.resize(n);
  int best = -1;
  int failures = 0;
  for (int i = 0; i < n; ++i) {
    result.profile_loglik[i] = points[i].profile;
    result.per_point_phi[i] = points[i].phi;
    if (points[i].failed) ++failures;
    if (std::isfinite(points[i].profile) &&
        (best < 0 || points[i].profile > result.profile_loglik[best]))
      best = i;
  }
  if (best < 0)
    throw std::runtime_error("selection failed at every grid point: " +
                             (first_error.empty() ? name : first_error));
  result.best_param = result.param_values[best];
  result.best_phi = result.per_point_phi[best];
  result.diagnostics["estimator"] = name;
  result.diagnostics["fitter_failures"] = std::to_string(failures);
  if (!first_error.empty()) result.diagnostics["first_error"] = first_error;
  return result;
}

Vector fit_mu(const ModelFitter& fitter, const Vector& x, double param) {
  Vector mu = fitter(x, param);
  require(mu.size() == x.size(), "fitter returned wrong-sized mu");
  require((mu.array() > 0.0).all(), "fitter returned nonpositive mu");
  return mu;
}

struct Transformed {
  Vector y, m;
  double beta;
  double correction;  // change-of-variables term added to the log likelihood
};

// y_i = x_i^a / a^{2a}, m likewise, with a^{2a} read as (a^2)^a so negative
// a stays real; then D_beta(y||m) with beta = 1/a - 1 equals D_alpha(x||mu).
Transformed alpha_transform(const Vector& x, const Vector& mu, double alpha) {
  Transformed t;
  t.beta = 1.0 / alpha - 1.0;
  const double scale = xpow(alpha * alpha, -alpha);
  const auto n = x.size();
  t.y.resize(n);
  t.m.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    t.y[i] = xpow(x[i], alpha) * scale;
    t.m[i] = xpow(mu[i], alpha) * scale;
  }
  t.correction = -t.beta * t.y.array().log().sum() -
                 static_cast<double>(n) * std::log(std::abs(alpha));
  return t;
}

PointEval profile_over_phi(const Vector& x, const Vector& mu, double beta,
                           const Vector& phis, const QuadratureRule& rule,
                           double correction) {
  PointEval p;
  for (Eigen::Index j = 0; j < phis.size(); ++j) {
    const double ll = eda_logpdf(x, EdaModel{mu, beta, phis[j]}, rule);
    if (ll > p.profile || j == 0) {
      p.profile = ll;
      p.phi = phis[j];
    }
  }
  p.profile += correction;
  return p;
}

PointEval sm_over_phi(const Vector& x, const Vector& mu, double beta,
                      const Vector& phis) {
  PointEval p;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < phis.size(); ++j) {
    const double obj = sm_objective_eda(x, mu, beta, phis[j]);
    if (obj < best || j == 0) {
      best = obj;
      p.phi = phis[j];
    }
  }
  p.profile = -best;
  return p;
}

double moment_matched_phi(const Vector& x, const Vector& mu, double beta) {
  const double d = beta_div(x, mu, beta);
  return std::max(2.0 * d / static_cast<double>(x.size()), 1e-12);
}

}  // namespace

SelectionGrid default_grid() {
  return SelectionGrid{linear_grid(-2.0, 0.05, 2.0), log_spaced(1e-4, 1e2, 40)};
}

Vector linear_grid(double lo, double step, double hi) {
  require(step > 0.0 && hi >= lo, "need step > 0 and hi >= lo");
  // Includes hi when it sits on the lattice (within rounding slack).
  const auto n =
      static_cast<Eigen::Index>(std::floor((hi - lo) / step + 1e-9));
  Vector v(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) v[i] = lo + static_cast<double>(i) * step;
  return v;
}

Vector log_spaced(double lo, double hi, int count) {
  require(lo > 0.0 && hi > lo && count >= 2, "need 0 < lo < hi, count >= 2");
  Vector v(count);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    v[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
  return v;
}

ModelFitter scalar_fitter() {
  return [](const Vector& x, double param) {
    return Vector::Constant(x.size(), scalar_mean_fit(x, param));
  };
}

ModelFitter precomputed_fitter(Vector mu) {
  return [mu = std::move(mu)](const Vector& x, double) {
    require(mu.size() == x.size(), "precomputed mu has wrong length");
    return mu;
  };
}

SelectionResult medal_select_beta(const Vector& x, const ModelFitter& fitter,
                                  const SelectionGrid& grid,
                                  const QuadratureRule& rule) {
  validate_inputs(x, grid);
  return scan(grid, "medal_beta", [&](int i) {
    const double beta = grid.param_values[i];
    const Vector mu = fit_mu(fitter, x, beta);
    return profile_over_phi(x, mu, beta, grid.phi_values, rule, 0.0);
  });
}

SelectionResult medal_select_alpha(const Vector& x, const ModelFitter& fitter,
                                   const SelectionGrid& grid,
                                   const QuadratureRule& rule) {
  validate_inputs(x, grid);
  require((grid.param_values.array() != 0.0).all(),
          "alpha grid must exclude 0");
  return scan(grid, "medal_alpha", [&](int i) {
    const double alpha = grid.param_values[i];
    const Vector mu = fit_mu(fitter, x, alpha);
    const Transformed t = alpha_transform(x, mu, alpha);
    return profile_over_phi(t.y, t.m, t.beta, grid.phi_values, rule,
                            t.correction);
  });
}

SelectionResult select_gamma(const Vector& x, const ModelFitter& fitter,
                             const SelectionGrid& grid,
                             const QuadratureRule& rule) {
  validate_inputs(x, grid);
  return scan(grid, "medal_gamma", [&](int i) {
    const double gamma = grid.param_values[i];
    const Vector mu = fit_mu(fitter, x, gamma);
    const Vector scaled = connecting_scalar_beta(x, mu, gamma) * mu;
    return profile_over_phi(x, scaled, gamma, grid.phi_values, rule, 0.0);
  });
}

SelectionResult select_renyi(const Vector& x, const ModelFitter& fitter,
                             const SelectionGrid& grid,
                             const QuadratureRule& rule) {
  validate_inputs(x, grid);
  require((grid.param_values.array() > 0.0).all(),
          "Renyi order grid must be positive");
  return scan(grid, "medal_renyi", [&](int i) {
    const double rho = grid.param_values[i];
    const Vector mu = fit_mu(fitter, x, rho);
    const Vector scaled = connecting_scalar_alpha(x, mu, rho) * mu;
    const Transformed t = alpha_transform(x, scaled, rho);
    return profile_over_phi(t.y, t.m, t.beta, grid.phi_values, rule,
                            t.correction);
  });
}

double sm_objective_eda(const Vector& x, const Vector& mu, double beta,
                        double phi) {
  require(x.size() > 0 && x.size() == mu.size(),
          "x and mu must be nonempty and equal length");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const Score s = eda_score(x[i], mu[i], beta, phi);
    acc += 2.0 * x[i] * s.psi + x[i] * x[i] * s.psi_prime +
           0.5 * x[i] * x[i] * s.psi * s.psi;
  }
  return acc / static_cast<double>(x.size());
}

SelectionResult sm_select_beta(const Vector& x, const ModelFitter& fitter,
                               const SelectionGrid& grid) {
  validate_inputs(x, grid);
  return scan(grid, "sm_beta", [&](int i) {
    const double beta = grid.param_values[i];
    const Vector mu = fit_mu(fitter, x, beta);
    return sm_over_phi(x, mu, beta, grid.phi_values);
  });
}

SelectionResult sm_select_alpha(const Vector& x, const ModelFitter& fitter,
                                const SelectionGrid& grid) {
  validate_inputs(x, grid);
  require((grid.param_values.array() != 0.0).all(),
          "alpha grid must exclude 0");
  return scan(grid, "sm_alpha", [&](int i) {
    const double alpha = grid.param_values[i];
    const Vector mu = fit_mu(fitter, x, alpha);
    const Transformed t = alpha_transform(x, mu, alpha);
    return sm_over_phi(t.y, t.m, t.beta, grid.phi_values);
  });
}

SelectionResult sm_select_gamma(const Vector& x, const ModelFitter& fitter,
                                const SelectionGrid& grid) {
  validate_inputs(x, grid);
  return scan(grid, "sm_gamma", [&](int i) {
    const double gamma = grid.param_values[i];
    const Vector mu = fit_mu(fitter, x, gamma);
    const Vector scaled = connecting_scalar_beta(x, mu, gamma) * mu;
    PointEval p;
    p.phi = moment_matched_phi(x, scaled, gamma);
    p.profile = -sm_objective_eda(x, scaled, gamma, p.phi);
    return p;
  });
}

SelectionResult sm_select_renyi(const Vector& x, const ModelFitter& fitter,
                                const SelectionGrid& grid) {
  validate_inputs(x, grid);
  require((grid.param_values.array() > 0.0).all(),
          "Renyi order grid must be positive");
  return scan(grid, "sm_renyi", [&](int i) {
    const double rho = grid.param_values[i];
    const Vector mu = fit_mu(fitter, x, rho);
    const Vector scaled = connecting_scalar_alpha(x, mu, rho) * mu;
    const Transformed t = alpha_transform(x, scaled, rho);
    PointEval p;
    p.phi = moment_matched_phi(t.y, t.m, t.beta);
    p.profile = -sm_objective_eda(t.y, t.m, t.beta, p.phi);
    return p;
  });
}

}  // namespace divsel
