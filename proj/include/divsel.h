/* C interface to the divergence-selection library.
 *
 * All functions return a status code; on failure, divsel_last_error() holds
 * a thread-local message.  Handles are opaque and must be released with the
 * matching _destroy call.  Matrices are column-major.
 */
#ifndef DIVSEL_H_
#define DIVSEL_H_

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  DIVSEL_OK = 0,
  DIVSEL_INVALID_ARGUMENT = 1,
  DIVSEL_NUMERIC_ERROR = 2
} divsel_status;

typedef enum {
  DIVSEL_FAMILY_BETA = 0,
  DIVSEL_FAMILY_ALPHA = 1,
  DIVSEL_FAMILY_GAMMA = 2,
  DIVSEL_FAMILY_RENYI = 3
} divsel_family;

typedef enum {
  DIVSEL_ESTIMATOR_MEDAL = 0, /* profile likelihood */
  DIVSEL_ESTIMATOR_SM = 1     /* score matching */
} divsel_estimator;

typedef enum {
  DIVSEL_MODEL_SCALAR = 0,      /* constant mean fit */
  DIVSEL_MODEL_NMF = 1,         /* V ~ WH, refit per grid point */
  DIVSEL_MODEL_PNMF = 2,        /* V ~ W W^T V, refit per grid point */
  DIVSEL_MODEL_PRECOMPUTED = 3  /* fixed user-supplied approximation */
} divsel_model;

/* Message for the most recent failure on this thread ("" if none). */
const char* divsel_last_error(void);

void divsel_free(void* ptr);

/* ---- divergences (summed over entries) ---- */
divsel_status divsel_beta_div(const double* x, const double* mu, int n,
                              double beta, double* out);
divsel_status divsel_alpha_div(const double* x, const double* mu, int n,
                               double alpha, double* out);
divsel_status divsel_gamma_div(const double* x, const double* mu, int n,
                               double gamma, double* out);
divsel_status divsel_renyi_div(const double* x, const double* mu, int n,
                               double rho, double* out);

/* ---- Gauss-Laguerre quadrature ---- */
typedef struct divsel_rule divsel_rule;
divsel_status divsel_rule_create(int order, divsel_rule** out);
void divsel_rule_destroy(divsel_rule* rule);
/* Fills nodes[order] and log_weights[order]; either may be NULL. */
divsel_status divsel_rule_nodes(const divsel_rule* rule, double* nodes,
                                double* log_weights);

/* ---- augmented exponential-divergence density ---- */
divsel_status divsel_eda_log_normalizer(const divsel_rule* rule, double mu,
                                        double beta, double phi, double* out);
divsel_status divsel_eda_logpdf(const divsel_rule* rule, const double* x,
                                const double* mu, int n, double beta,
                                double phi, double* out);

/* ---- Tweedie ---- */
/* power in (1,2) or > 2; the {0,1,2} cases have classical closed forms. */
divsel_status divsel_tweedie_logpdf(double x, double mu, double phi,
                                    double power, double* out);
divsel_status divsel_tweedie_sample(double mu, double phi, double power,
                                    int count, uint64_t seed, double* out);

/* ---- selection ---- */
typedef struct divsel_selection divsel_selection;

/* data is rows x cols column-major (use cols = 1 for plain vectors).
 * model = SCALAR/PRECOMPUTED treats the data as a flat vector; NMF/PNMF
 * refit the factorization at every grid parameter (rank, fit_iters,
 * fit_seed).  mu must be non-NULL (length rows*cols) iff model is
 * PRECOMPUTED.  quad_order is ignored by the score-matching estimator. */
divsel_status divsel_select(const double* data, int rows, int cols,
                            divsel_family family, divsel_estimator estimator,
                            divsel_model model, const double* mu, int rank,
                            int fit_iters, uint64_t fit_seed,
                            const double* param_grid, int param_count,
                            const double* phi_grid, int phi_count,
                            int quad_order, divsel_selection** out);

int divsel_selection_size(const divsel_selection* sel);
divsel_status divsel_selection_best(const divsel_selection* sel,
                                    double* best_param, double* best_phi);
/* Fills profile[size] and/or per_point_phi[size]; either may be NULL. */
divsel_status divsel_selection_curve(const divsel_selection* sel,
                                     double* profile, double* per_point_phi);
int divsel_selection_fitter_failures(const divsel_selection* sel);
void divsel_selection_destroy(divsel_selection* sel);

/* ---- factorization ---- */
typedef struct divsel_fit divsel_fit;

/* family BETA or ALPHA; mask (rows x cols of 0/1) may be NULL. */
divsel_status divsel_nmf(const double* v, int rows, int cols, int rank,
                         divsel_family family, double param, int iters,
                         uint64_t seed, const double* mask, divsel_fit** out);
divsel_status divsel_pnmf(const double* v, int rows, int cols, int rank,
                          double gamma, int iters, uint64_t seed,
                          divsel_fit** out);
divsel_status divsel_fit_w(const divsel_fit* fit, double* out); /* rows*rank */
divsel_status divsel_fit_h(const divsel_fit* fit, double* out); /* rank*cols */
int divsel_fit_trace_size(const divsel_fit* fit);
divsel_status divsel_fit_trace(const divsel_fit* fit, double* out);
void divsel_fit_destroy(divsel_fit* fit);

/* ---- data generation and matrix files ---- */
divsel_status divsel_gen_tweedie(double power, double mu, double phi,
                                 int count, uint64_t seed, double* out);
divsel_status divsel_gen_multinomial(int dimension, long long trials,
                                     uint64_t seed, double* out);
/* Fixed 50x30 recipe; out must hold 1500 doubles (column-major). */
divsel_status divsel_gen_block_matrix(uint64_t seed, double* out);

/* On success *data is a malloc'd column-major buffer (free with
 * divsel_free); format: 0 = CSV, 1 = TSV, -1 = by file extension. */
divsel_status divsel_read_matrix(const char* path, int format, int* rows,
                                 int* cols, double** data);
divsel_status divsel_write_matrix(const char* path, int format,
                                  const double* data, int rows, int cols);

#ifdef __cplusplus
}
#endif

#endif /* DIVSEL_H_ */
