#include "divsel.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "divsel/common.hpp"
#include "divsel/datagen.hpp"
#include "divsel/densities.hpp"
#include "divsel/divergence.hpp"
#include "divsel/estimators.hpp"
#include "divsel/factorization.hpp"
#include "divsel/io.hpp"
#include "divsel/normalizer.hpp"
#include "divsel/quadrature.hpp"
#include "divsel/tweedie.hpp"

using divsel::Matrix;
using divsel::Vector;

struct divsel_rule {
  divsel::QuadratureRule rule;
};

struct divsel_selection {
  divsel::SelectionResult result;
};

struct divsel_fit {
  divsel::FactorizationModel model;
};

namespace {

thread_local std::string g_last_error;

divsel_status fail(divsel_status code, const char* what) {
  g_last_error = what;
  return code;
}

// Runs `fn`, translating exceptions to status codes.
template <typename Fn>
divsel_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DIVSEL_OK;
  } catch (const std::invalid_argument& e) {
    return fail(DIVSEL_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(DIVSEL_NUMERIC_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(DIVSEL_NUMERIC_ERROR, e.what());
  }
}

Vector to_vector(const double* x, int n) {
  divsel::require(x != nullptr && n > 0, "null or empty array argument");
  return Eigen::Map<const Vector>(x, n);
}

Matrix to_matrix(const double* x, int rows, int cols) {
  divsel::require(x != nullptr && rows > 0 && cols > 0,
                  "null or empty matrix argument");
  return Eigen::Map<const Matrix>(x, rows, cols);
}

divsel_status scalar_div(const double* x, const double* mu, int n,
                         double param, double* out,
                         double (*div)(const Vector&, const Vector&, double)) {
  return guarded([&] {
    divsel::require(out != nullptr, "null output pointer");
    *out = div(to_vector(x, n), to_vector(mu, n), param);
  });
}

divsel::ModelFitter make_fitter(divsel_model model, divsel_family family,
                                const Matrix& data, const double* mu, int rank,
                                int fit_iters, std::uint64_t fit_seed) {
  const int rows = static_cast<int>(data.rows());
  const int cols = static_cast<int>(data.cols());
  switch (model) {
    case DIVSEL_MODEL_SCALAR:
      return divsel::scalar_fitter();
    case DIVSEL_MODEL_PRECOMPUTED: {
      divsel::require(mu != nullptr, "precomputed model needs mu");
      return divsel::precomputed_fitter(
          Eigen::Map<const Vector>(mu, data.size()));
    }
    case DIVSEL_MODEL_NMF: {
      divsel::require(family == DIVSEL_FAMILY_BETA ||
                          family == DIVSEL_FAMILY_ALPHA,
                      "NMF model applies to the beta/alpha families");
      return [rows, cols, rank, fit_iters, fit_seed, family](
                 const Vector& x, double param) {
        const Matrix v = Eigen::Map<const Matrix>(x.data(), rows, cols);
        divsel::FitConfig cfg;
        cfg.max_iters = fit_iters;
        cfg.seed = fit_seed;
        const divsel::FactorizationModel m =
            (family == DIVSEL_FAMILY_BETA)
                ? divsel::nmf_beta(v, rank, param, cfg)
                : divsel::nmf_alpha(v, rank, param, cfg);
        const Matrix vhat = m.w * m.h;
        return Vector(Eigen::Map<const Vector>(vhat.data(), vhat.size()));
      };
    }
    case DIVSEL_MODEL_PNMF: {
      divsel::require(family == DIVSEL_FAMILY_GAMMA ||
                          family == DIVSEL_FAMILY_RENYI,
                      "PNMF model applies to the gamma/Renyi families");
      return [rows, cols, rank, fit_iters, fit_seed](const Vector& x,
                                                     double param) {
        const Matrix v = Eigen::Map<const Matrix>(x.data(), rows, cols);
        divsel::FitConfig cfg;
        cfg.max_iters = fit_iters;
        cfg.seed = fit_seed;
        cfg.init = divsel::InitScheme::kEuclideanWarmStart;
        const divsel::FactorizationModel m =
            divsel::pnmf_gamma(v, rank, param, cfg);
        const Matrix vhat = m.w * (m.w.transpose() * v);
        return Vector(Eigen::Map<const Vector>(vhat.data(), vhat.size()));
      };
    }
  }
  throw std::invalid_argument("unknown model");
}

}  // namespace

extern "C" {

const char* divsel_last_error(void) { return g_last_error.c_str(); }

void divsel_free(void* ptr) { std::free(ptr); }

divsel_status divsel_beta_div(const double* x, const double* mu, int n,
                              double beta, double* out) {
  return scalar_div(x, mu, n, beta, out, &divsel::beta_div);
}

divsel_status divsel_alpha_div(const double* x, const double* mu, int n,
                               double alpha, double* out) {
  return scalar_div(x, mu, n, alpha, out, &divsel::alpha_div);
}

divsel_status divsel_gamma_div(const double* x, const double* mu, int n,
                               double gamma, double* out) {
  return scalar_div(x, mu, n, gamma, out, &divsel::gamma_div);
}

divsel_status divsel_renyi_div(const double* x, const double* mu, int n,
                               double rho, double* out) {
  return scalar_div(x, mu, n, rho, out, &divsel::renyi_div);
}

divsel_status divsel_rule_create(int order, divsel_rule** out) {
  return guarded([&] {
    divsel::require(out != nullptr, "null output pointer");
    auto* handle = new divsel_rule{divsel::gauss_laguerre_rule(order)};
    *out = handle;
  });
}

void divsel_rule_destroy(divsel_rule* rule) { delete rule; }

divsel_status divsel_rule_nodes(const divsel_rule* rule, double* nodes,
                                double* log_weights) {
  return guarded([&] {
    divsel::require(rule != nullptr, "null rule");
    const int n = rule->rule.order;
    if (nodes != nullptr)
      std::memcpy(nodes, rule->rule.nodes.data(), n * sizeof(double));
    if (log_weights != nullptr)
      std::memcpy(log_weights, rule->rule.log_weights.data(),
                  n * sizeof(double));
  });
}

divsel_status divsel_eda_log_normalizer(const divsel_rule* rule, double mu,
                                        double beta, double phi, double* out) {
  return guarded([&] {
    divsel::require(rule != nullptr && out != nullptr, "null argument");
    *out = divsel::eda_log_normalizer(mu, beta, phi, rule->rule);
  });
}

divsel_status divsel_eda_logpdf(const divsel_rule* rule, const double* x,
                                const double* mu, int n, double beta,
                                double phi, double* out) {
  return guarded([&] {
    divsel::require(rule != nullptr && out != nullptr, "null argument");
    *out = divsel::eda_logpdf(
        to_vector(x, n), divsel::EdaModel{to_vector(mu, n), beta, phi},
        rule->rule);
  });
}

divsel_status divsel_tweedie_logpdf(double x, double mu, double phi,
                                    double power, double* out) {
  return guarded([&] {
    divsel::require(out != nullptr, "null output pointer");
    *out = divsel::tweedie_series_logpdf(x, divsel::TweedieModel{mu, phi, power});
  });
}

divsel_status divsel_tweedie_sample(double mu, double phi, double power,
                                    int count, uint64_t seed, double* out) {
  return guarded([&] {
    divsel::require(out != nullptr, "null output pointer");
    const Vector draws =
        divsel::tweedie_sample(divsel::TweedieModel{mu, phi, power}, count, seed);
    std::memcpy(out, draws.data(), draws.size() * sizeof(double));
  });
}

divsel_status divsel_select(const double* data, int rows, int cols,
                            divsel_family family, divsel_estimator estimator,
                            divsel_model model, const double* mu, int rank,
                            int fit_iters, uint64_t fit_seed,
                            const double* param_grid, int param_count,
                            const double* phi_grid, int phi_count,
                            int quad_order, divsel_selection** out) {
  return guarded([&] {
    divsel::require(out != nullptr, "null output pointer");
    const Matrix m = to_matrix(data, rows, cols);
    const Vector x = Eigen::Map<const Vector>(m.data(), m.size());
    divsel::SelectionGrid grid;
    grid.param_values = to_vector(param_grid, param_count);
    grid.phi_values = to_vector(phi_grid, phi_count);
    const divsel::ModelFitter fitter =
        make_fitter(model, family, m, mu, rank, fit_iters, fit_seed);

    divsel::SelectionResult result;
    if (estimator == DIVSEL_ESTIMATOR_MEDAL) {
      const divsel::QuadratureRule& rule = divsel::cached_rule(quad_order);
      switch (family) {
        case DIVSEL_FAMILY_BETA:
          result = divsel::medal_select_beta(x, fitter, grid, rule);
          break;
        case DIVSEL_FAMILY_ALPHA:
          result = divsel::medal_select_alpha(x, fitter, grid, rule);
          break;
        case DIVSEL_FAMILY_GAMMA:
          result = divsel::select_gamma(x, fitter, grid, rule);
          break;
        case DIVSEL_FAMILY_RENYI:
          result = divsel::select_renyi(x, fitter, grid, rule);
          break;
        default:
          throw std::invalid_argument("unknown family");
      }
    } else if (estimator == DIVSEL_ESTIMATOR_SM) {
      switch (family) {
        case DIVSEL_FAMILY_BETA:
          result = divsel::sm_select_beta(x, fitter, grid);
          break;
        case DIVSEL_FAMILY_ALPHA:
          result = divsel::sm_select_alpha(x, fitter, grid);
          break;
        case DIVSEL_FAMILY_GAMMA:
          result = divsel::sm_select_gamma(x, fitter, grid);
          break;
        case DIVSEL_FAMILY_RENYI:
          result = divsel::sm_select_renyi(x, fitter, grid);
          break;
        default:
          throw std::invalid_argument("unknown family");
      }
    } else {
      throw std::invalid_argument("unknown estimator");
    }
    *out = new divsel_selection{std::move(result)};
  });
}

int divsel_selection_size(const divsel_selection* sel) {
  return sel == nullptr ? 0
                        : static_cast<int>(sel->result.param_values.size());
}

divsel_status divsel_selection_best(const divsel_selection* sel,
                                    double* best_param, double* best_phi) {
  return guarded([&] {
    divsel::require(sel != nullptr, "null selection");
    if (best_param != nullptr) *best_param = sel->result.best_param;
    if (best_phi != nullptr) *best_phi = sel->result.best_phi;
  });
}

divsel_status divsel_selection_curve(const divsel_selection* sel,
                                     double* profile, double* per_point_phi) {
  return guarded([&] {
    divsel::require(sel != nullptr, "null selection");
    const auto n = sel->result.param_values.size();
    if (profile != nullptr)
      std::memcpy(profile, sel->result.profile_loglik.data(),
                  n * sizeof(double));
    if (per_point_phi != nullptr)
      std::memcpy(per_point_phi, sel->result.per_point_phi.data(),
                  n * sizeof(double));
  });
}

int divsel_selection_fitter_failures(const divsel_selection* sel) {
  if (sel == nullptr) return 0;
  const auto it = sel->result.diagnostics.find("fitter_failures");
  if (it == sel->result.diagnostics.end()) return 0;
  return std::atoi(it->second.c_str());
}

void divsel_selection_destroy(divsel_selection* sel) { delete sel; }

divsel_status divsel_nmf(const double* v, int rows, int cols, int rank,
                         divsel_family family, double param, int iters,
                         uint64_t seed, const double* mask, divsel_fit** out) {
  return guarded([&] {
    divsel::require(out != nullptr, "null output pointer");
    divsel::require(family == DIVSEL_FAMILY_BETA ||
                        family == DIVSEL_FAMILY_ALPHA,
                    "NMF families are beta and alpha");
    divsel::FitConfig cfg;
    cfg.max_iters = iters;
    cfg.seed = seed;
    if (mask != nullptr) cfg.mask = to_matrix(mask, rows, cols);
    const Matrix data = to_matrix(v, rows, cols);
    divsel::FactorizationModel model =
        (family == DIVSEL_FAMILY_BETA)
            ? divsel::nmf_beta(data, rank, param, cfg)
            : divsel::nmf_alpha(data, rank, param, cfg);
    *out = new divsel_fit{std::move(model)};
  });
}

divsel_status divsel_pnmf(const double* v, int rows, int cols, int rank,
                          double gamma, int iters, uint64_t seed,
                          divsel_fit** out) {
  return guarded([&] {
    divsel::require(out != nullptr, "null output pointer");
    divsel::FitConfig cfg;
    cfg.max_iters = iters;
    cfg.seed = seed;
    cfg.init = divsel::InitScheme::kEuclideanWarmStart;
    divsel::FactorizationModel model =
        divsel::pnmf_gamma(to_matrix(v, rows, cols), rank, gamma, cfg);
    *out = new divsel_fit{std::move(model)};
  });
}

divsel_status divsel_fit_w(const divsel_fit* fit, double* out) {
  return guarded([&] {
    divsel::require(fit != nullptr && out != nullptr, "null argument");
    std::memcpy(out, fit->model.w.data(), fit->model.w.size() * sizeof(double));
  });
}

divsel_status divsel_fit_h(const divsel_fit* fit, double* out) {
  return guarded([&] {
    divsel::require(fit != nullptr && out != nullptr, "null argument");
    divsel::require(fit->model.h.size() > 0, "model has no H factor");
    std::memcpy(out, fit->model.h.data(), fit->model.h.size() * sizeof(double));
  });
}

int divsel_fit_trace_size(const divsel_fit* fit) {
  return fit == nullptr ? 0
                        : static_cast<int>(fit->model.objective_trace.size());
}

divsel_status divsel_fit_trace(const divsel_fit* fit, double* out) {
  return guarded([&] {
    divsel::require(fit != nullptr && out != nullptr, "null argument");
    std::memcpy(out, fit->model.objective_trace.data(),
                fit->model.objective_trace.size() * sizeof(double));
  });
}

void divsel_fit_destroy(divsel_fit* fit) { delete fit; }

divsel_status divsel_gen_tweedie(double power, double mu, double phi,
                                 int count, uint64_t seed, double* out) {
  return guarded([&] {
    divsel::require(out != nullptr, "null output pointer");
    divsel::DatasetSpec spec;
    spec.kind = divsel::DatasetKind::kTweedieScalar;
    spec.power = power;
    spec.mu = mu;
    spec.phi = phi;
    spec.count = count;
    const Matrix m = divsel::gen_dataset(spec, seed);
    std::memcpy(out, m.data(), m.size() * sizeof(double));
  });
}

divsel_status divsel_gen_multinomial(int dimension, long long trials,
                                     uint64_t seed, double* out) {
  return guarded([&] {
    divsel::require(out != nullptr, "null output pointer");
    divsel::DatasetSpec spec;
    spec.kind = divsel::DatasetKind::kMultinomial;
    spec.dimension = dimension;
    spec.trials = trials;
    const Matrix m = divsel::gen_dataset(spec, seed);
    std::memcpy(out, m.data(), m.size() * sizeof(double));
  });
}

divsel_status divsel_gen_block_matrix(uint64_t seed, double* out) {
  return guarded([&] {
    divsel::require(out != nullptr, "null output pointer");
    divsel::DatasetSpec spec;
    spec.kind = divsel::DatasetKind::kBlockMatrix;
    const Matrix m = divsel::gen_dataset(spec, seed);
    std::memcpy(out, m.data(), m.size() * sizeof(double));
  });
}

divsel_status divsel_read_matrix(const char* path, int format, int* rows,
                                 int* cols, double** data) {
  return guarded([&] {
    divsel::require(path != nullptr && rows != nullptr && cols != nullptr &&
                        data != nullptr,
                    "null argument");
    const divsel::MatrixFormat fmt =
        format == 0   ? divsel::MatrixFormat::kCsv
        : format == 1 ? divsel::MatrixFormat::kTsv
                      : divsel::format_from_path(path);
    const Matrix m = divsel::read_matrix(path, fmt);
    auto* buf = static_cast<double*>(
        std::malloc(static_cast<std::size_t>(m.size()) * sizeof(double)));
    if (buf == nullptr) throw std::bad_alloc();
    std::memcpy(buf, m.data(), m.size() * sizeof(double));
    *rows = static_cast<int>(m.rows());
    *cols = static_cast<int>(m.cols());
    *data = buf;
  });
}

divsel_status divsel_write_matrix(const char* path, int format,
                                  const double* data, int rows, int cols) {
  return guarded([&] {
    divsel::require(path != nullptr, "null path");
    const divsel::MatrixFormat fmt =
        format == 0   ? divsel::MatrixFormat::kCsv
        : format == 1 ? divsel::MatrixFormat::kTsv
                      : divsel::format_from_path(path);
    divsel::write_matrix(path, to_matrix(data, rows, cols), fmt);
  });
}

}  // extern "C"
