#pragma once

#include <cstdint>

#include "divsel/common.hpp"

namespace divsel {

struct TweedieModel {
  double mu = 1.0;
  double phi = 1.0;
  double power = 1.5;  // variance exponent p in Var[X] = phi * mu^p
};

// True for powers where a density evaluation path exists: closed forms at
// p in {0, 1, 2} and the series on (1, 2) and (2, inf).  Powers in (0, 1)
// correspond to no distribution at all.
bool tweedie_pdf_available(double power);

// Log density (or log point mass at x = 0 when 1 < p < 2) via the Wright
// series summed in the log domain.  Rejects p in {0, 1, 2} and p < 1:
// the closed-form cases are handled by closed_form_logpdf.
double tweedie_series_logpdf(double x, const TweedieModel& model);

// Draws `count` samples: Gaussian (p=0), scaled Poisson (p=1), compound
// Poisson-Gamma (1<p<2), Gamma (p=2), inverse Gaussian (p=3).
Vector tweedie_sample(const TweedieModel& model, int count,
                      std::uint64_t seed);

}  // namespace divsel
