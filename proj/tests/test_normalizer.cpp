#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "divsel/normalizer.hpp"
#include "doctest.h"
#include "oracles.hpp"

using divsel::cached_rule;
using divsel::QuadratureRule;
using testutil::rel_err;

TEST_CASE("normalizer matches frozen high-precision reference values") {
  const QuadratureRule& r = cached_rule(200);
  struct Case {
    double mu, beta, phi, want;
  };
  // ln Z(mu, beta, phi) with the augmentation exponent c = (beta-1)/2,
  // references computed with 50-digit adaptive quadrature.
  const Case cases[] = {
      {2.0, 0.37, 0.1, -0.22980351618011514261},
      {10.0, 2.0, 1e-3, -2.5349392729535623539},
      {0.1, -2.0, 10.0, 2.0702310797016955948},
      {1.0, 0.0, 1.0, 0.91627973008618612827},
      {10.0, -0.5, 1e-3, -2.5349094552443023885},
      {0.1, 1.5, 10.0, 1.473541135184644476},
      {10.0, 1.0, 1.0, 0.91893853320467267451},
  };
  const QuadratureRule& r_fine = cached_rule(1000);
  for (const Case& c : cases) {
    CAPTURE(c.mu);
    CAPTURE(c.beta);
    CAPTURE(c.phi);
    // Quadrature truncation shrinks with the rule order.
    CHECK(rel_err(divsel::eda_log_normalizer(c.mu, c.beta, c.phi, r), c.want) <
          1e-6);
    CHECK(rel_err(divsel::eda_log_normalizer(c.mu, c.beta, c.phi, r_fine),
                  c.want) < 3e-8);
  }
}

TEST_CASE("unit normalizer uses the series expansion at tiny dispersion") {
  const QuadratureRule& r = cached_rule(200);
  // At ln(phi) far below the quadrature regime the value follows the
  // Gaussian-limit expansion ~ 0.5 ln(2 pi phi / (beta+1)) + corrections.
  CHECK(rel_err(divsel::log_normalizer_unit(0.7, std::exp(-26.0), -0.15, r),
                -12.081061466795155468) < 1e-12);
  CHECK(rel_err(divsel::log_normalizer_unit(3.0, std::exp(-30.0), 1.0, r),
                -14.081061466795366854) < 1e-12);
  CHECK(rel_err(divsel::log_normalizer_unit(-1.0, std::exp(-25.0), -1.0, r),
                -11.58106146679416993) < 1e-12);
}

TEST_CASE("normalizer agrees with an adaptive-quadrature oracle") {
  const QuadratureRule& r = cached_rule(1000);
  for (double beta : {-2.5, -1.0, 0.0, 0.8, 2.0}) {
    for (double mu : {0.3, 1.0, 8.0}) {
      for (double phi : {1e-2, 0.5, 20.0}) {
        const double c = (beta - 1.0) / 2.0;
        const double want = testutil::ref_log_normalizer(mu, beta, phi, c);
        const double got = divsel::eda_log_normalizer(mu, beta, phi, r);
        CAPTURE(beta);
        CAPTURE(mu);
        CAPTURE(phi);
        CHECK(rel_err(got, want) < 1e-6);
      }
    }
  }
}

TEST_CASE("heavy-tail band matches 40-digit reference values at the "
          "production rule order") {
  // Large dispersion just around beta = -1 is the hardest regime: the
  // integrand develops a plateau spanning ~1/|beta+1| log-units.  References
  // from 40-digit adaptive quadrature; mu = 1 throughout.
  const QuadratureRule& r = cached_rule(5000);
  struct Case {
    double beta, phi, c, want;
  };
  const Case cases[] = {
      // Augmentation exponent c = (beta-1)/2.
      {-2.5, 10.0, -1.75, 1.9985083248221097481},
      {-2.5, 20.0, -1.75, 2.3379289583396861938},
      {-2.0, 10.0, -1.5, 2.0702310797016955838},
      {-1.5, 20.0, -1.25, 2.5559500118288165808},
      {-1.4, 31.6, -1.2, 2.8475240389560549356},
      {-1.2, 100.0, -1.1, 3.6565271573291075108},
      {-1.1, 100.0, -1.05, 3.8566375642753723605},
      {-1.05, 31.6, -1.025, 3.274776740819752636},
      {-1.01, 100.0, -1.005, 4.3980122830910204334},
      {-1.001, 100.0, -1.0005, 4.6133112242516730127},
      {-0.999, 100.0, -0.9995, 4.7112526764791852785},
      {-0.99, 10.0, -0.995, 2.6249295445888407069},
      {-0.95, 31.6, -0.975, 3.4117015291289984935},
      {-0.9, 100.0, -0.95, 3.1508327632743486184},
      {-0.7, 31.6, -0.85, 2.3148799443744633578},
      {-0.5, 10.0, -0.75, 1.8575403905620350783},
      {-0.3, 100.0, -0.65, 2.3415337094686473813},
      {-0.05, 10.0, -0.525, 1.6574706602965301657},
      // Unaugmented exponent c = 0.
      {-1.2, 10.0, 0.0, 2.693706264301226181},
      {-1.05, 10.0, 0.0, 2.611053228319263864},
      {-0.95, 10.0, 0.0, 2.5546678241490807649},
      {-0.5, 10.0, 0.0, 2.2956894849006857094},
  };
  for (const Case& c : cases) {
    CAPTURE(c.beta);
    CAPTURE(c.phi);
    CAPTURE(c.c);
    CHECK(rel_err(divsel::log_normalizer_unit(c.beta, c.phi, c.c, r), c.want) <
          1e-6);
  }
}

TEST_CASE("evaluation-strategy boundaries introduce no jumps") {
  const QuadratureRule& r = cached_rule(5000);
  const auto jump = [&](double beta_lo, double phi_lo, double beta_hi,
                        double phi_hi) {
    const double c = (beta_lo - 1.0) / 2.0;
    const double lo = divsel::log_normalizer_unit(beta_lo, phi_lo, c, r);
    const double hi = divsel::log_normalizer_unit(beta_hi, phi_hi, c, r);
    return std::abs(lo - hi) / (1.0 + std::abs(hi));
  };
  // Gamma closed form at beta = -1 vs. its neighbourhood.
  CHECK(jump(-1.0, 10.0, -1.0 + 2e-12, 10.0) < 1e-6);
  CHECK(jump(-1.0, 10.0, -1.0 - 2e-12, 10.0) < 1e-6);
  // Series / plain-quadrature handover (peak-position gate) at beta = -0.5.
  CHECK(jump(-0.5, 4e-5 * (1.0 - 1e-9), -0.5, 4e-5 * (1.0 + 1e-9)) < 1e-6);
  // Plateau-width gate below beta = -1.
  const double phi_gate = 0.2 / (0.02 * 1.02);
  CHECK(jump(-1.02, phi_gate * (1.0 - 1e-9), -1.02, phi_gate * (1.0 + 1e-9)) <
        1e-6);
}

TEST_CASE("normalizer is continuous across the series/quadrature boundary") {
  const QuadratureRule& r = cached_rule(200);
  for (double beta : {0.7, -0.3, 2.0}) {
    const double c = (beta - 1.0) / 2.0;
    const double below =
        divsel::log_normalizer_unit(beta, std::exp(-20.0 - 1e-6), c, r);
    const double above =
        divsel::log_normalizer_unit(beta, std::exp(-20.0 + 1e-6), c, r);
    CAPTURE(beta);
    CHECK(std::abs(below - above) < 1e-6 * (1.0 + std::abs(above)));
  }
}

TEST_CASE("normalizer stays finite far outside the classical range") {
  const QuadratureRule& r = cached_rule(200);
  for (double beta : {-6.0, -3.3, 3.3, 6.0}) {
    for (double phi : {1e-4, 1.0, 1e4}) {
      const double v = divsel::eda_log_normalizer(1.7, beta, phi, r);
      CAPTURE(beta);
      CAPTURE(phi);
      CHECK(std::isfinite(v));
    }
  }
}

TEST_CASE("plain exponential-divergence normalizer handles the zero-mean "
          "closed form") {
  const QuadratureRule& r = cached_rule(200);
  // At mu = 0, beta > 0: ln Z = lgamma(1/(b+1)) + ln(b(b+1))/(b+1) - ln(b+1).
  CHECK(rel_err(divsel::ed_log_normalizer(0.0, 1.0, r),
                0.22579135264472743236) < 1e-12);
  for (double beta : {0.5, 2.0}) {
    const double b = beta;
    const double closed = std::lgamma(1.0 / (b + 1.0)) +
                          std::log(b * (b + 1.0)) / (b + 1.0) -
                          std::log(b + 1.0);
    CHECK(rel_err(divsel::ed_log_normalizer(0.0, beta, r), closed) < 1e-12);
  }
  CHECK_THROWS_AS(divsel::ed_log_normalizer(0.0, -0.5, r),
                  std::invalid_argument);
  // Positive mu agrees with the oracle at phi = 1, c = 0.
  for (double beta : {1.0, -1.2}) {
    const double want = testutil::ref_log_normalizer(2.5, beta, 1.0, 0.0);
    CHECK(rel_err(divsel::ed_log_normalizer(2.5, beta, r), want) < 1e-6);
  }
}

TEST_CASE("interpolation table tracks the direct evaluation") {
  const QuadratureRule& r = cached_rule(200);
  for (double beta : {1.0, -0.6, -2.0}) {
    const double c = (beta - 1.0) / 2.0;
    const divsel::NormalizerTable table(beta, c, r);
    CHECK(table.beta() == beta);
    // Off-knot arguments inside the table range.
    for (double t : {-15.3, -3.77, 0.013, 7.519, 20.99}) {
      const double direct = divsel::log_normalizer_unit(beta, std::exp(t), c, r);
      CAPTURE(beta);
      CAPTURE(t);
      CHECK(std::abs(table.unit(t) - direct) < 2e-5 * (1.0 + std::abs(direct)));
    }
    // Far outside the tabulated range it falls back to direct evaluation.
    for (double t : {-40.0, 30.0}) {
      const double direct = divsel::log_normalizer_unit(beta, std::exp(t), c, r);
      CHECK(table.unit(t) == direct);
    }
    // The full form applies the mu-scaling identity on top.
    for (double mu : {0.2, 3.0}) {
      const double direct = divsel::eda_log_normalizer(mu, beta, 0.9, r);
      CHECK(std::abs(table.full(mu, 0.9) - direct) <
            2e-5 * (1.0 + std::abs(direct)));
    }
  }
}
