#pragma once

#include <functional>
#include <map>
#include <string>

#include "divsel/common.hpp"
#include "divsel/quadrature.hpp"

namespace divsel {

struct SelectionGrid {
  Vector param_values;  // increasing beta / alpha / gamma / rho grid
  Vector phi_values;    // positive dispersion grid (log-spaced by default)
};

// Default grids: parameter in [-2, 2] step 0.05; 40 log-spaced phi values
// in [1e-4, 1e2].
SelectionGrid default_grid();
Vector linear_grid(double lo, double step, double hi);
Vector log_spaced(double lo, double hi, int count);

struct SelectionResult {
  Vector param_values;
  Vector profile_loglik;  // max over phi at each grid point (or negated
                          // score-matching objective, so higher is better)
  double best_param = 0.0;
  double best_phi = 0.0;
  Vector per_point_phi;
  std::map<std::string, std::string> diagnostics;
};

// Produces the fitted approximation mu = argmin_eta D(x || eta) for the
// given family parameter; must return a strictly positive vector of the
// same length as the data.  Throwing marks that grid point as failed
// (-inf) without aborting the scan.
using ModelFitter = std::function<Vector(const Vector&, double)>;

// Scalar-mean fitter: constant vector at mean(x) for every parameter.
ModelFitter scalar_fitter();

// Fixed precomputed approximation, reused at every grid point.
ModelFitter precomputed_fitter(Vector mu);

// Profile likelihood scan over the beta grid: for each beta, fit mu, then
// maximize the augmented-density log likelihood over the phi grid.
SelectionResult medal_select_beta(const Vector& x, const ModelFitter& fitter,
                                  const SelectionGrid& grid,
                                  const QuadratureRule& rule);

// Alpha selection through the power transform y = x^alpha / alpha^{2 alpha}
// mapping alpha to beta = 1/alpha - 1, with the change-of-variables
// correction - beta * sum(log y) + N * log|beta + 1|.
SelectionResult medal_select_alpha(const Vector& x, const ModelFitter& fitter,
                                   const SelectionGrid& grid,
                                   const QuadratureRule& rule);

// Gamma selection: fit mu per gamma, rescale by the closed-form optimal
// scalar c* = argmin_c D_beta(x || c mu) with beta = gamma, then evaluate
// the beta profile likelihood at (x, c* mu).
SelectionResult select_gamma(const Vector& x, const ModelFitter& fitter,
                             const SelectionGrid& grid,
                             const QuadratureRule& rule);

// Renyi selection: scalar rescaling c* = argmin_c D_alpha(x || c mu) with
// alpha = rho, then the alpha-selection machinery at (x, c* mu).
SelectionResult select_renyi(const Vector& x, const ModelFitter& fitter,
                             const SelectionGrid& grid,
                             const QuadratureRule& rule);

// Nonnegative-support score-matching objective
//   J = (1/N) sum_i [ 2 x_i psi_i + x_i^2 psi_i' + 0.5 x_i^2 psi_i^2 ]
// built from the score of the augmented density; lower is better.
double sm_objective_eda(const Vector& x, const Vector& mu, double beta,
                        double phi);

// Score-matching analogue of medal_select_beta: minimizes J jointly over
// the (beta, phi) grid; the stored curve is -J so higher is better.
SelectionResult sm_select_beta(const Vector& x, const ModelFitter& fitter,
                               const SelectionGrid& grid);

// Score-matching selection on transformed data for the alpha family.
SelectionResult sm_select_alpha(const Vector& x, const ModelFitter& fitter,
                                const SelectionGrid& grid);

// Score-matching gamma/Renyi selection.  After the c* rescaling the
// dispersion is set by moment matching, phi_hat = 2 D_beta(x || c* mu)/N
// (a quadratic expansion of the divergence makes E[D] ~ N phi / 2), and J
// is evaluated at (gamma, phi_hat); the phi grid is not scanned.  A joint
// (gamma, phi) minimum is degenerate here: scale-invariant fits let J
// drift along the phi direction.
SelectionResult sm_select_gamma(const Vector& x, const ModelFitter& fitter,
                                const SelectionGrid& grid);
SelectionResult sm_select_renyi(const Vector& x, const ModelFitter& fitter,
                                const SelectionGrid& grid);

}  // namespace divsel
