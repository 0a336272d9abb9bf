#pragma once

#include <vector>

#include "divsel/quadrature.hpp"

namespace divsel {

// ln of integral_0^inf exp{c ln x - D_beta(x||1)/phi} dx.
// Finite for every real beta (the divergence term dominates both tails).
// Below ln phi = -20 a Laplace expansion around the mode is used; otherwise
// the integrand is rescaled (and for steep origin behavior power-substituted)
// so the Gauss-Laguerre nodes resolve it, then fed to integrate_halfline.
double log_normalizer_unit(double beta, double phi, double c,
                           const QuadratureRule& rule);

// ln Z(mu, beta, phi) of the EDA density (augmentation exponent
// c = (beta-1)/2), reduced to the unit integral by scaling x = mu u:
// ln Z = (beta+1)/2 ln mu + lnZ1(beta, phi mu^-(beta+1), c).
double eda_log_normalizer(double mu, double beta, double phi,
                          const QuadratureRule& rule);

// Normalizer of the augmentation-free ED density (phi = 1, c = 0).
// mu = 0 is allowed for beta > 0, where the integral has a closed form.
double ed_log_normalizer(double mu, double beta, const QuadratureRule& rule);

// Cubic-Hermite table of t -> lnZ1(beta, e^t, c), for batched evaluation
// over many distinct mu (one quadrature per grid knot instead of per entry).
// Interpolation error is ~1e-5 at dt=1/8; outside the table the direct
// evaluation is used.
class NormalizerTable {
 public:
  NormalizerTable(double beta, double c, const QuadratureRule& rule);
  double unit(double t) const;                     // lnZ1(beta, e^t, c)
  double full(double mu, double phi) const;        // with the mu-scaling identity
  double beta() const { return beta_; }
  double c() const { return c_; }

 private:
  double beta_, c_;
  const QuadratureRule* rule_;
  double tmin_, tmax_, dt_;
  std::vector<double> vals_, slopes_;
};

}  // namespace divsel
