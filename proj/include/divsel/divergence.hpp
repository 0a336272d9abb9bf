#pragma once

#include "divsel/common.hpp"

namespace divsel {

enum class Family { Beta, Alpha, Gamma, Renyi };

struct DivergenceSpec {
  Family family = Family::Beta;
  double param = 0.0;
};

// x: observed data (>= 0, strictly positive where a log or negative power is
// taken); mu: strictly positive approximation; equal lengths.
double beta_div(const Vector& x, const Vector& mu, double beta);
double alpha_div(const Vector& x, const Vector& mu, double alpha);
double gamma_div(const Vector& x, const Vector& mu, double gamma);
double renyi_div(const Vector& x, const Vector& mu, double rho);

// Elementwise d/dmu_i of beta_div: mu^{beta-1} (mu - x).
Vector beta_div_grad_mu(const Vector& x, const Vector& mu, double beta);

// argmin_c D_beta(x || c mu) = sum x mu^beta / sum mu^{beta+1}; continuous in
// beta (the beta->0 and beta->-1 cases of the closed form coincide with it).
double connecting_scalar_beta(const Vector& x, const Vector& mu, double beta);
// argmin_c D_alpha(x || c mu) = (sum x^alpha mu^{1-alpha} / sum mu)^{1/alpha},
// with the exponential limit formula near alpha=0.
double connecting_scalar_alpha(const Vector& x, const Vector& mu, double alpha);

// argmin_m sum_i D_beta(x_i || m): the arithmetic mean for every beta, since
// the gradient is m^{beta-1} sum_i (m - x_i).
double scalar_mean_fit(const Vector& x, double beta);

}  // namespace divsel
