#pragma once

#include "divsel/common.hpp"
#include "divsel/quadrature.hpp"

namespace divsel {

// Augmented exponential-divergence density on (0, inf)^N:
//   ln p(x) = sum_i [ c*ln(x_i) - D_beta(x_i || mu_i)/phi ] - sum_i ln Z(mu_i)
// with augmentation exponent c = (beta - 1)/2.
struct EdaModel {
  Vector mu;
  double beta = 1.0;
  double phi = 1.0;
};

// Log density of x under the model.  Normalizers are evaluated by
// Gauss-Laguerre quadrature; when mu has many distinct entries a cubic
// Hermite table over log(phi * mu^-(beta+1)) replaces per-entry quadrature.
double eda_logpdf(const Vector& x, const EdaModel& model,
                  const QuadratureRule& rule);

// Unaugmented density exp(-D_beta(x || mu)) with unit dispersion.  Entries
// mu_i = 0 are admitted for beta > 0, where the normalizer has a closed form.
double ed_logpdf(const Vector& x, const Vector& mu, double beta,
                 const QuadratureRule& rule);

enum class ClosedFormCase {
  kGaussian,        // beta = 1
  kPoisson,         // beta = 0 (phi scaling via x/phi at mean mu/phi)
  kGamma,           // beta = -1
  kInverseGaussian  // beta = -2
};

// Exact log density of the four classical dispersion models at one point.
double closed_form_logpdf(double x, double mu, double phi, ClosedFormCase which);

struct Score {
  double psi;        // d/dx ln p(x)
  double psi_prime;  // d^2/dx^2 ln p(x)
};

// First and second derivative of the scalar log density in x (the
// normalizer does not depend on x so it drops out).
Score eda_score(double x, double mu, double beta, double phi);

}  // namespace divsel
