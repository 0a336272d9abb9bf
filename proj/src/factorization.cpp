#include "divsel/factorization.hpp"

#include <cmath>
#include <stdexcept>

#include "divsel/divergence.hpp"
#include "divsel/rng.hpp"

namespace divsel {
namespace {

Matrix elem_pow(const Matrix& m, double t) {
  return m.unaryExpr([t](double v) { return xpow(v, t); });
}

void apply_floor(Matrix* m, double floor) {
  *m = m->cwiseMax(floor);
}

Matrix random_factor(Eigen::Index rows, Eigen::Index cols, double scale,
                     Rng* rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i)
      m(i, j) = rng->uniform_pos() * scale;
  return m;
}

void check_v(const Matrix& v, int rank) {
  require(v.rows() > 0 && v.cols() > 0, "empty data matrix");
  require(v.allFinite(), "data matrix must be finite");
  require((v.array() >= 0.0).all(), "data matrix must be nonnegative");
  require(rank >= 1 && rank <= std::min(v.rows(), v.cols()),
          "rank must be in [1, min(F, N)]");
}

Matrix resolve_mask(const Matrix& v, const FitConfig& cfg) {
  if (!cfg.mask) return Matrix::Ones(v.rows(), v.cols());
  const Matrix& m = *cfg.mask;
  require(m.rows() == v.rows() && m.cols() == v.cols(),
          "mask shape must match data");
  require(((m.array() == 0.0) || (m.array() == 1.0)).all(),
          "mask entries must be 0 or 1");
  return m;
}

// Masked cells are exact zeros here, so they cannot influence any update
// product regardless of the underlying V value.
Matrix observed_values(const Matrix& v, const Matrix& mask) {
  return v.cwiseProduct(mask);
}

void check_observed_support(const Matrix& vm) {
  require((vm.rowwise().sum().array() > 0.0).all(),
          "a data row is all zero under the mask");
  require((vm.colwise().sum().array() > 0.0).all(),
          "a data column is all zero under the mask");
}

// Divergence of the observed cells, flattened into vectors.
double masked_div(const Matrix& v, const Matrix& vhat, const Matrix& mask,
                  double param, double (*div)(const Vector&, const Vector&,
                                              double)) {
  const auto count = static_cast<Eigen::Index>(mask.sum());
  Vector x(count), mu(count);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < v.cols(); ++j)
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      if (mask(i, j) != 0.0) {
        x[k] = v(i, j);
        mu[k] = vhat(i, j);
        ++k;
      }
  return div(x, mu, param);
}

double init_scale(const Matrix& vm, const Matrix& mask, int rank) {
  const double mean_obs = vm.sum() / mask.sum();
  return 2.0 * std::sqrt(std::max(mean_obs, 1e-30) / rank);
}

void init_linear_factors(const Matrix& v, const Matrix& vm, const Matrix& mask,
                         int rank, const FitConfig& cfg, Matrix* w, Matrix* h);

// One beta-NMF sweep (H then W, recomputing the approximation in between).
void beta_step(const Matrix& vm, const Matrix& mask, double beta,
               double exponent, double floor, Matrix* w, Matrix* h) {
  Matrix vhat = *w * *h;
  {
    const Matrix a = mask.cwiseProduct(elem_pow(vhat, beta - 1.0))
                         .cwiseProduct(vm);
    const Matrix b = mask.cwiseProduct(elem_pow(vhat, beta));
    const Matrix num = w->transpose() * a;
    const Matrix den = (w->transpose() * b).cwiseMax(floor);
    *h = h->cwiseProduct(elem_pow(num.cwiseQuotient(den), exponent));
    apply_floor(h, floor);
  }
  vhat = *w * *h;
  {
    const Matrix a = mask.cwiseProduct(elem_pow(vhat, beta - 1.0))
                         .cwiseProduct(vm);
    const Matrix b = mask.cwiseProduct(elem_pow(vhat, beta));
    const Matrix num = a * h->transpose();
    const Matrix den = (b * h->transpose()).cwiseMax(floor);
    *w = w->cwiseProduct(elem_pow(num.cwiseQuotient(den), exponent));
    apply_floor(w, floor);
  }
}

double mm_exponent(double beta) {
  if (beta < 0.0) return 1.0 / (1.0 - beta);
  if (beta > 1.0) return 1.0 / beta;
  return 1.0;
}

void init_linear_factors(const Matrix& v, const Matrix& vm, const Matrix& mask,
                         int rank, const FitConfig& cfg, Matrix* w, Matrix* h) {
  const auto f = v.rows(), n = v.cols();
  switch (cfg.init) {
    case InitScheme::kProvided:
      require(cfg.init_w.rows() == f && cfg.init_w.cols() == rank &&
                  cfg.init_h.rows() == rank && cfg.init_h.cols() == n,
              "provided factors have wrong shape");
      *w = cfg.init_w;
      *h = cfg.init_h;
      break;
    case InitScheme::kRandomUniform:
    case InitScheme::kEuclideanWarmStart: {
      Rng rng(cfg.seed);
      const double s = init_scale(vm, mask, rank);
      *w = random_factor(f, rank, s, &rng);
      *h = random_factor(rank, n, s, &rng);
      if (cfg.init == InitScheme::kEuclideanWarmStart)
        for (int it = 0; it < 50; ++it)
          beta_step(vm, mask, 1.0, 1.0, cfg.floor, w, h);
      break;
    }
  }
  apply_floor(w, cfg.floor);
  apply_floor(h, cfg.floor);
}

}  // namespace

FactorizationModel nmf_beta(const Matrix& v, int rank, double beta,
                            const FitConfig& cfg) {
  check_v(v, rank);
  require(cfg.max_iters >= 0 && cfg.floor > 0.0, "invalid fit config");
  const Matrix mask = resolve_mask(v, cfg);
  const Matrix vm = observed_values(v, mask);
  check_observed_support(vm);

  FactorizationModel model;
  model.rank = rank;
  model.kind = FactorizationKind::kLinearNmf;
  init_linear_factors(v, vm, mask, rank, cfg, &model.w, &model.h);

  const double exponent = mm_exponent(beta);
  model.objective_trace.reserve(cfg.max_iters + 1);
  model.objective_trace.push_back(
      masked_div(vm, model.w * model.h, mask, beta, &beta_div));
  for (int it = 0; it < cfg.max_iters; ++it) {
    beta_step(vm, mask, beta, exponent, cfg.floor, &model.w, &model.h);
    model.objective_trace.push_back(
        masked_div(vm, model.w * model.h, mask, beta, &beta_div));
  }
  return model;
}

FactorizationModel nmf_alpha(const Matrix& v, int rank, double alpha,
                             const FitConfig& cfg) {
  check_v(v, rank);
  require(alpha != 0.0, "alpha must be nonzero");
  require(cfg.max_iters >= 0 && cfg.floor > 0.0, "invalid fit config");
  const Matrix mask = resolve_mask(v, cfg);
  const Matrix vm = observed_values(v, mask);
  check_observed_support(vm);

  FactorizationModel model;
  model.rank = rank;
  model.kind = FactorizationKind::kLinearNmf;
  init_linear_factors(v, vm, mask, rank, cfg, &model.w, &model.h);
  Matrix& w = model.w;
  Matrix& h = model.h;

  // (V / WH)^alpha on observed cells, exact zeros elsewhere (so masked V
  // values never propagate, even for negative alpha).
  auto ratio_pow = [&](const Matrix& vhat) {
    Matrix r(vhat.rows(), vhat.cols());
    for (Eigen::Index j = 0; j < r.cols(); ++j)
      for (Eigen::Index i = 0; i < r.rows(); ++i)
        r(i, j) = (mask(i, j) != 0.0) ? xpow(vm(i, j) / vhat(i, j), alpha)
                                      : 0.0;
    return r;
  };
  const double exponent = 1.0 / alpha;

  model.objective_trace.reserve(cfg.max_iters + 1);
  model.objective_trace.push_back(
      masked_div(vm, w * h, mask, alpha, &alpha_div));
  for (int it = 0; it < cfg.max_iters; ++it) {
    {
      const Matrix r = ratio_pow(w * h);
      const Matrix num = w.transpose() * r;
      const Matrix den = (w.transpose() * mask).cwiseMax(cfg.floor);
      h = h.cwiseProduct(elem_pow(num.cwiseQuotient(den).cwiseMax(cfg.floor),
                                  exponent));
      apply_floor(&h, cfg.floor);
    }
    {
      const Matrix r = ratio_pow(w * h);
      const Matrix num = r * h.transpose();
      const Matrix den = (mask * h.transpose()).cwiseMax(cfg.floor);
      w = w.cwiseProduct(elem_pow(num.cwiseQuotient(den).cwiseMax(cfg.floor),
                                  exponent));
      apply_floor(&w, cfg.floor);
    }
    model.objective_trace.push_back(
        masked_div(vm, w * h, mask, alpha, &alpha_div));
  }
  return model;
}

FactorizationModel pnmf_gamma(const Matrix& v, int rank, double gamma,
                              const FitConfig& cfg) {
  check_v(v, rank);
  require(!cfg.mask, "masks are not supported for projective NMF");
  require(cfg.max_iters >= 0 && cfg.floor > 0.0, "invalid fit config");
  require((v.colwise().sum().array() > 0.0).all(),
          "data columns must have positive sums");
  const auto f = v.rows();

  FactorizationModel model;
  model.rank = rank;
  model.kind = FactorizationKind::kPnmf;
  Matrix& w = model.w;

  switch (cfg.init) {
    case InitScheme::kProvided:
      require(cfg.init_w.rows() == f && cfg.init_w.cols() == rank,
              "provided W has wrong shape");
      w = cfg.init_w;
      break;
    case InitScheme::kRandomUniform:
    case InitScheme::kEuclideanWarmStart: {
      Rng rng(cfg.seed);
      w = random_factor(f, rank, 1.0, &rng);
      if (cfg.init == InitScheme::kEuclideanWarmStart) {
        const Matrix p = v * v.transpose();
        for (int it = 0; it < 50; ++it) {
          const Matrix pw = p * w;
          const Matrix num = 2.0 * pw;
          const Matrix den =
              (w * (w.transpose() * pw) + pw * (w.transpose() * w))
                  .cwiseMax(cfg.floor);
          w = w.cwiseProduct(num.cwiseQuotient(den));
          apply_floor(&w, cfg.floor);
        }
      }
      break;
    }
  }
  apply_floor(&w, cfg.floor);
  for (Eigen::Index k = 0; k < w.cols(); ++k) w.col(k) /= w.col(k).norm();
  apply_floor(&w, cfg.floor);

  const Matrix ones = Matrix::Ones(v.rows(), v.cols());
  auto objective = [&](const Matrix& vhat) {
    return masked_div(v, vhat, ones, gamma, &gamma_div);
  };

  model.objective_trace.reserve(cfg.max_iters + 1);
  model.objective_trace.push_back(objective(w * (w.transpose() * v)));
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Matrix vhat = w * (w.transpose() * v);
    // d D_gamma / d vhat splits as vhat^g / B - (V .* vhat^(g-1)) / C; the
    // 1/(g(g+1)) prefactor cancels exactly, so the split holds for every g.
    const Matrix vg = elem_pow(vhat, gamma);
    const double b_sum = vg.cwiseProduct(vhat).sum();
    const double c_sum = vg.cwiseProduct(v).sum();
    const Matrix gp = vg / b_sum;
    const Matrix gm = v.cwiseProduct(vg.cwiseQuotient(vhat)) / c_sum;
    const Matrix vtw = v.transpose() * w;
    const Matrix grad_p = gp * vtw + v * (gp.transpose() * w);
    const Matrix grad_m = gm * vtw + v * (gm.transpose() * w);
    w = w.cwiseProduct(
        grad_m.cwiseQuotient(grad_p.cwiseMax(cfg.floor)).cwiseSqrt());
    apply_floor(&w, cfg.floor);
    for (Eigen::Index k = 0; k < w.cols(); ++k) w.col(k) /= w.col(k).norm();
    apply_floor(&w, cfg.floor);
    model.objective_trace.push_back(objective(w * (w.transpose() * v)));
  }
  return model;
}

}  // namespace divsel
