#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "divsel/divergence.hpp"
#include "doctest.h"
#include "oracles.hpp"

using divsel::Vector;
using testutil::rel_err;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) out[i++] = a;
  return out;
}

}  // namespace

TEST_CASE("beta divergence matches an independently computed reference") {
  const Vector x = vec({3.0, 1.0});
  const Vector mu = vec({2.0, 2.0});
  CHECK(rel_err(divsel::beta_div(x, mu, 0.37), 0.66124975321259111726) < 1e-13);
}

TEST_CASE("beta divergence special members reduce to their textbook forms") {
  const Vector x = vec({2.5, 0.3, 7.0, 1.2});
  const Vector mu = vec({2.0, 0.5, 6.0, 1.4});

  // beta = 1: half squared Euclidean distance.
  CHECK(rel_err(divsel::beta_div(x, mu, 1.0),
                0.5 * (x - mu).squaredNorm()) < 1e-14);

  // beta = 0: generalized Kullback-Leibler.
  double kl = 0.0;
  for (int i = 0; i < 4; ++i)
    kl += x[i] * std::log(x[i] / mu[i]) - x[i] + mu[i];
  CHECK(rel_err(divsel::beta_div(x, mu, 0.0), kl) < 1e-14);

  // beta = -1: Itakura-Saito.
  double is = 0.0;
  for (int i = 0; i < 4; ++i)
    is += x[i] / mu[i] - std::log(x[i] / mu[i]) - 1.0;
  CHECK(rel_err(divsel::beta_div(x, mu, -1.0), is) < 1e-14);

  // Single-point value at beta = -1 with x=1, mu=2: 1/2 - ln(1/2) - 1.
  CHECK(rel_err(divsel::beta_div(vec({1.0}), vec({2.0}), -1.0),
                std::log(2.0) - 0.5) < 1e-14);
}

TEST_CASE("beta divergence is continuous across the limit switch points") {
  const Vector x = vec({2.5, 0.3, 7.0});
  const Vector mu = vec({2.0, 0.5, 6.0});
  for (double center : {0.0, -1.0}) {
    const double inside = divsel::beta_div(x, mu, center + 0.9e-4);
    const double outside = divsel::beta_div(x, mu, center + 1.1e-4);
    const double at = divsel::beta_div(x, mu, center);
    CHECK(std::abs(inside - at) < 1e-3 * (1.0 + std::abs(at)));
    CHECK(std::abs(outside - inside) < 1e-3 * (1.0 + std::abs(at)));
  }
}

TEST_CASE("beta divergence zero data entries allowed exactly when no log or "
          "negative power of x appears") {
  const Vector x = vec({0.0, 2.0});
  const Vector mu = vec({1.0, 2.0});
  // Fine: x^2 (beta=1), 0 ln 0 := 0 (beta=0), x^1.5 (beta=0.5).
  CHECK(std::isfinite(divsel::beta_div(x, mu, 1.0)));
  CHECK(divsel::beta_div(x, mu, 0.0) == doctest::Approx(1.0));  // 0 - 0 + mu0
  CHECK(std::isfinite(divsel::beta_div(x, mu, 0.5)));
  // Needs ln x (beta=-1) or x^{-0.5} (beta=-1.5) or x^{-1} (beta=-2).
  CHECK_THROWS_AS(divsel::beta_div(x, mu, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(divsel::beta_div(x, mu, -1.5), std::invalid_argument);
  CHECK_THROWS_AS(divsel::beta_div(x, mu, -2.0), std::invalid_argument);
}

TEST_CASE("beta divergence validates inputs") {
  CHECK_THROWS_AS(divsel::beta_div(vec({1.0}), vec({1.0, 2.0}), 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(divsel::beta_div(vec({1.0}), vec({0.0}), 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(divsel::beta_div(vec({-1.0}), vec({1.0}), 1.0),
                  std::invalid_argument);
}

TEST_CASE("alpha divergence matches reference values and its KL endpoints") {
  const Vector x = vec({2.0, 3.0});
  const Vector mu = vec({1.0, 2.0});
  CHECK(rel_err(divsel::alpha_div(x, mu, 0.3), 0.5245795987684419648) < 1e-13);

  // alpha -> 1 is KL(x||mu); alpha -> 0 is KL(mu||x).
  const double kl_x_mu = divsel::beta_div(x, mu, 0.0);
  const double kl_mu_x = divsel::beta_div(mu, x, 0.0);
  CHECK(rel_err(divsel::alpha_div(x, mu, 1.0), kl_x_mu) < 1e-12);
  CHECK(rel_err(divsel::alpha_div(x, mu, 0.0), kl_mu_x) < 1e-12);
  CHECK(rel_err(divsel::alpha_div(x, mu, 1.0 + 0.5e-4), kl_x_mu) < 1e-4);
  CHECK(rel_err(divsel::alpha_div(x, mu, 0.5e-4), kl_mu_x) < 1e-4);
}

TEST_CASE("alpha divergence duality swaps arguments") {
  const Vector x = vec({2.5, 0.3, 7.0});
  const Vector mu = vec({2.0, 0.5, 6.0});
  for (double alpha : {-0.7, 0.25, 0.5, 1.6}) {
    CHECK(rel_err(divsel::alpha_div(x, mu, alpha),
                  divsel::alpha_div(mu, x, 1.0 - alpha)) < 1e-12);
  }
  // alpha = 1/2 point value: sum 2 (sqrt(x) - sqrt(mu))^2 at x=4, mu=1.
  CHECK(rel_err(divsel::alpha_div(vec({4.0}), vec({1.0}), 0.5), 2.0) < 1e-14);
}

TEST_CASE("gamma divergence is scale invariant in both arguments") {
  const Vector x = vec({2.5, 0.3, 7.0, 1.2});
  const Vector mu = vec({2.0, 0.5, 6.0, 1.4});
  for (double g : {0.8, -0.5, 0.0, -1.0, 1.5}) {
    const double base = divsel::gamma_div(x, mu, g);
    CHECK(rel_err(divsel::gamma_div(x, 7.3 * mu, g), base) < 1e-10);
    CHECK(rel_err(divsel::gamma_div(0.11 * x, mu, g), base) < 1e-10);
    CHECK(base >= -1e-12);  // nonnegative
    // Zero at proportional arguments.
    CHECK(std::abs(divsel::gamma_div(x, 3.0 * x, g)) < 1e-12);
  }
}

TEST_CASE("gamma divergence limit members match reference values") {
  const Vector x = vec({1.0, 2.0});
  const Vector mu = vec({2.0, 1.0});
  // gamma -> 0: KL between the normalized vectors.
  CHECK(rel_err(divsel::gamma_div(x, mu, 0.0), 0.23104906018664842) < 1e-13);
  // gamma -> -1: ln(mean(x/mu)) - mean(ln(x/mu)).
  CHECK(rel_err(divsel::gamma_div(x, mu, -1.0), 0.22314355131420975577) <
        1e-13);
  // Continuity into the limits.
  CHECK(std::abs(divsel::gamma_div(x, mu, 0.5e-4) -
                 divsel::gamma_div(x, mu, 0.0)) < 1e-4);
  CHECK(std::abs(divsel::gamma_div(x, mu, -1.0 + 0.5e-4) -
                 divsel::gamma_div(x, mu, -1.0)) < 1e-4);
}

TEST_CASE("Renyi divergence matches its closed values and normalizes inputs") {
  const Vector x = vec({1.0, 2.0});
  const Vector mu = vec({2.0, 1.0});
  // rho = 2 on (1/3,2/3) vs (2/3,1/3): ln(sum p^2/q).
  CHECK(rel_err(divsel::renyi_div(x, mu, 2.0), 0.4054651081081644) < 1e-13);
  // rho -> 1: KL of the normalized vectors (same as the gamma -> 0 member).
  CHECK(rel_err(divsel::renyi_div(x, mu, 1.0), 0.23104906018664842) < 1e-13);
  CHECK(rel_err(divsel::renyi_div(x, mu, 1.0 + 0.5e-4), 0.23104906018664842) <
        1e-3);
  // Scale invariance in both arguments.
  CHECK(rel_err(divsel::renyi_div(2.0 * x, 0.3 * mu, 2.0),
                divsel::renyi_div(x, mu, 2.0)) < 1e-12);
  // Defined for rho > 0 only.
  CHECK_THROWS_AS(divsel::renyi_div(x, mu, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(divsel::renyi_div(x, mu, -0.5), std::invalid_argument);
}

TEST_CASE("connecting scalar minimizes the beta divergence over rescalings") {
  const Vector x = vec({2.5, 0.3, 7.0, 1.2});
  const Vector mu = vec({2.0, 0.5, 6.0, 1.4});
  for (double beta : {1.0, 0.4, 0.0, -0.6, -1.0, -1.7}) {
    const double c = divsel::connecting_scalar_beta(x, mu, beta);
    CHECK(c > 0.0);
    const double at = divsel::beta_div(x, c * mu, beta);
    for (double eps : {-1e-3, 1e-3}) {
      CHECK(divsel::beta_div(x, (c * (1.0 + eps)) * mu, beta) >= at);
    }
    // Closed form: sum x mu^beta / sum mu^{beta+1}.
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 4; ++i) {
      num += x[i] * std::pow(mu[i], beta);
      den += std::pow(mu[i], beta + 1.0);
    }
    CHECK(rel_err(c, num / den) < 1e-13);
  }
}

TEST_CASE("connecting scalar minimizes the alpha divergence over rescalings") {
  const Vector x = vec({2.5, 0.3, 7.0, 1.2});
  const Vector mu = vec({2.0, 0.5, 6.0, 1.4});
  for (double alpha : {1.0, 0.5, 0.3e-4, -0.8, 1.9}) {
    const double c = divsel::connecting_scalar_alpha(x, mu, alpha);
    CHECK(c > 0.0);
    const double at = divsel::alpha_div(x, c * mu, alpha);
    for (double eps : {-1e-3, 1e-3}) {
      CHECK(divsel::alpha_div(x, (c * (1.0 + eps)) * mu, alpha) >= at);
    }
  }
  // The small-alpha branch joins the general formula continuously.
  const double inside = divsel::connecting_scalar_alpha(x, mu, 0.9e-4);
  const double outside = divsel::connecting_scalar_alpha(x, mu, 1.1e-4);
  CHECK(rel_err(inside, outside) < 1e-4);
}

TEST_CASE("scalar mean fit returns the arithmetic mean for every beta") {
  const Vector x = vec({2.5, 0.3, 7.0, 1.2});
  const double mean = x.mean();
  for (double beta : {1.0, 0.0, -1.0, -2.0, 0.37}) {
    CHECK(rel_err(divsel::scalar_mean_fit(x, beta), mean) < 1e-15);
    // It is a stationary point: constant fits slightly off the mean do worse.
    const Vector at = Vector::Constant(4, mean);
    const Vector up = Vector::Constant(4, mean * 1.001);
    const Vector dn = Vector::Constant(4, mean * 0.999);
    CHECK(divsel::beta_div(x, up, beta) >= divsel::beta_div(x, at, beta));
    CHECK(divsel::beta_div(x, dn, beta) >= divsel::beta_div(x, at, beta));
  }
}

TEST_CASE("beta divergence gradient in mu matches finite differences") {
  const Vector x = vec({2.5, 0.3, 7.0});
  const Vector mu = vec({2.0, 0.5, 6.0});
  for (double beta : {1.0, 0.3, 0.0, -1.0, -1.6}) {
    const Vector g = divsel::beta_div_grad_mu(x, mu, beta);
    REQUIRE(g.size() == 3);
    for (int i = 0; i < 3; ++i) {
      auto f = [&](double m) {
        Vector mm = mu;
        mm[i] = m;
        return divsel::beta_div(x, mm, beta);
      };
      const double fd = testutil::fd_first(f, mu[i], 1e-6 * mu[i]);
      CHECK(rel_err(g[i], fd) < 1e-5);
    }
  }
}
