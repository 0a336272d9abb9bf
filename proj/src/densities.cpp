#include "divsel/densities.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "divsel/divergence.hpp"
#include "divsel/normalizer.hpp"

namespace divsel {
namespace {

// Above this many distinct mu values, per-entry quadrature is replaced by a
// per-beta interpolation table in t = log(phi * mu^-(beta+1)).
constexpr int kDistinctDirect = 64;

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

struct NormKey {
  std::uint64_t mu, beta, phi;
  int order;
  bool operator==(const NormKey&) const = default;
};

struct NormKeyHash {
  std::size_t operator()(const NormKey& k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::uint64_t v : {k.mu, k.beta, k.phi,
                            static_cast<std::uint64_t>(k.order)}) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

double memo_eda_normalizer(double mu, double beta, double phi,
                           const QuadratureRule& rule) {
  static std::mutex m;
  static std::unordered_map<NormKey, double, NormKeyHash> cache;
  const NormKey key{bits(mu), bits(beta), bits(phi), rule.order};
  {
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double val = eda_log_normalizer(mu, beta, phi, rule);
  std::lock_guard<std::mutex> lock(m);
  cache.emplace(key, val);
  return val;
}

double memo_ed_normalizer(double mu, double beta, const QuadratureRule& rule) {
  static std::mutex m;
  static std::unordered_map<NormKey, double, NormKeyHash> cache;
  const NormKey key{bits(mu), bits(beta), 0, rule.order};
  {
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double val = ed_log_normalizer(mu, beta, rule);
  std::lock_guard<std::mutex> lock(m);
  cache.emplace(key, val);
  return val;
}

const NormalizerTable& table_for(double beta, const QuadratureRule& rule) {
  static std::mutex m;
  static std::map<std::pair<std::uint64_t, int>,
                  std::unique_ptr<NormalizerTable>>
      cache;
  const auto key = std::make_pair(bits(beta), rule.order);
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache
             .emplace(key, std::make_unique<NormalizerTable>(
                               beta, (beta - 1.0) / 2.0, rule))
             .first;
  }
  return *it->second;
}

int count_distinct(const Vector& mu, std::vector<std::pair<double, int>>* runs) {
  std::vector<double> v(mu.data(), mu.data() + mu.size());
  std::sort(v.begin(), v.end());
  runs->clear();
  for (double x : v) {
    if (!runs->empty() && runs->back().first == x)
      ++runs->back().second;
    else
      runs->emplace_back(x, 1);
  }
  return static_cast<int>(runs->size());
}

void check_inputs(const Vector& x, const Vector& mu, double phi,
                  bool allow_zero_mu) {
  require(x.size() > 0, "empty data vector");
  require(x.size() == mu.size(), "x and mu must have equal length");
  require((x.array() > 0.0).all(), "x entries must be positive");
  if (allow_zero_mu)
    require((mu.array() >= 0.0).all(), "mu entries must be nonnegative");
  else
    require((mu.array() > 0.0).all(), "mu entries must be positive");
  require(phi > 0.0 && std::isfinite(phi), "phi must be positive");
}

}  // namespace

double eda_logpdf(const Vector& x, const EdaModel& model,
                  const QuadratureRule& rule) {
  check_inputs(x, model.mu, model.phi, /*allow_zero_mu=*/false);
  require(std::isfinite(model.beta), "beta must be finite");
  const double c = (model.beta - 1.0) / 2.0;
  const double r_term = c * x.array().log().sum();
  const double d_term = beta_div(x, model.mu, model.beta) / model.phi;

  std::vector<std::pair<double, int>> runs;
  double log_z = 0.0;
  if (count_distinct(model.mu, &runs) <= kDistinctDirect) {
    for (const auto& [mu_k, n_k] : runs)
      log_z += n_k * memo_eda_normalizer(mu_k, model.beta, model.phi, rule);
  } else {
    const NormalizerTable& table = table_for(model.beta, rule);
    for (Eigen::Index i = 0; i < model.mu.size(); ++i)
      log_z += table.full(model.mu[i], model.phi);
  }
  return r_term - d_term - log_z;
}

double ed_logpdf(const Vector& x, const Vector& mu, double beta,
                 const QuadratureRule& rule) {
  check_inputs(x, mu, 1.0, /*allow_zero_mu=*/beta > 0.0);
  require(std::isfinite(beta), "beta must be finite");
  // Entries with mu = 0 (legal only for beta > 0) contribute
  // x^{beta+1} / (beta (beta+1)) to the divergence; collect the rest for
  // the ordinary pairwise form.
  double d_term = 0.0;
  std::vector<double> x_pos, mu_pos;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (mu[i] == 0.0)
      d_term += std::pow(x[i], beta + 1.0) / (beta * (beta + 1.0));
    else {
      x_pos.push_back(x[i]);
      mu_pos.push_back(mu[i]);
    }
  }
  if (!x_pos.empty())
    d_term += beta_div(Eigen::Map<const Vector>(x_pos.data(), x_pos.size()),
                       Eigen::Map<const Vector>(mu_pos.data(), mu_pos.size()),
                       beta);

  std::vector<std::pair<double, int>> runs;
  count_distinct(mu, &runs);
  double log_z = 0.0;
  for (const auto& [mu_k, n_k] : runs)
    log_z += n_k * memo_ed_normalizer(mu_k, beta, rule);
  return -d_term - log_z;
}

double closed_form_logpdf(double x, double mu, double phi,
                          ClosedFormCase which) {
  require(phi > 0.0 && std::isfinite(phi), "phi must be positive");
  constexpr double kHalfLog2Pi = 0.91893853320467274178;
  switch (which) {
    case ClosedFormCase::kGaussian:
      return -kHalfLog2Pi - 0.5 * std::log(phi) -
             (x - mu) * (x - mu) / (2.0 * phi);
    case ClosedFormCase::kPoisson: {
      require(x >= 0.0 && mu > 0.0, "Poisson needs x >= 0, mu > 0");
      const double y = x / phi;
      const double m = mu / phi;
      const double yr = std::round(y);
      if (std::abs(y - yr) < 1e-9 * (1.0 + std::abs(y))) {
        // Exact pmf of the rescaled count, with the phi-scaling Jacobian.
        return yr * std::log(m) - m - std::lgamma(yr + 1.0) - std::log(phi);
      }
      // Continuous (Stirling) extension for off-lattice x.
      return y * std::log(m) - m - 0.5 * std::log(2.0 * M_PI * y) -
             y * std::log(y) + y - std::log(phi);
    }
    case ClosedFormCase::kGamma: {
      require(x > 0.0 && mu > 0.0, "Gamma needs x > 0, mu > 0");
      const double inv_phi = 1.0 / phi;
      return (inv_phi - 1.0) * std::log(x) - x / (phi * mu) -
             inv_phi * std::log(phi * mu) - std::lgamma(inv_phi);
    }
    case ClosedFormCase::kInverseGaussian: {
      require(x > 0.0 && mu > 0.0, "inverse Gaussian needs x > 0, mu > 0");
      return -kHalfLog2Pi - 0.5 * std::log(phi) - 1.5 * std::log(x) -
             (x / (2.0 * mu * mu) - 1.0 / mu + 1.0 / (2.0 * x)) / phi;
    }
  }
  throw std::invalid_argument("unknown closed-form case");
}

Score eda_score(double x, double mu, double beta, double phi) {
  require(x > 0.0 && mu > 0.0, "eda_score needs x > 0, mu > 0");
  require(phi > 0.0 && std::isfinite(phi), "phi must be positive");
  // (x^beta - mu^beta)/beta, continuous through beta = 0.
  double h;
  if (std::abs(beta) < 1e-12) {
    h = std::log(x / mu);
  } else {
    h = xpow(mu, beta) * std::expm1(beta * (std::log(x) - std::log(mu))) /
        beta;
  }
  Score s;
  s.psi = (beta - 1.0) / (2.0 * x) - h / phi;
  s.psi_prime = -(beta - 1.0) / (2.0 * x * x) - xpow(x, beta - 1.0) / phi;
  return s;
}

}  // namespace divsel
