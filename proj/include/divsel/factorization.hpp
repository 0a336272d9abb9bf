#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "divsel/common.hpp"

namespace divsel {

enum class FactorizationKind { kLinearNmf, kPnmf };

enum class InitScheme {
  kRandomUniform,      // U(0,1] entries scaled to the observed data magnitude
  kProvided,           // take FitConfig::init_w / init_h
  kEuclideanWarmStart  // 50 squared-error multiplicative iterations first
};

struct FitConfig {
  int max_iters = 100;
  std::uint64_t seed = 0;
  double floor = 1e-12;  // clamp for factors and update denominators
  std::optional<Matrix> mask;  // 1 = observed; shape of V
  InitScheme init = InitScheme::kRandomUniform;
  Matrix init_w, init_h;  // used when init == kProvided
};

struct FactorizationModel {
  Matrix w;  // F x K
  Matrix h;  // K x N (empty for PNMF, where vhat = W W^T V)
  int rank = 0;
  FactorizationKind kind = FactorizationKind::kLinearNmf;
  // Objective value after init, then after each iteration (length
  // max_iters + 1); the divergence is evaluated over observed cells.
  std::vector<double> objective_trace;
};

// Multiplicative-update NMF minimizing the beta divergence D_beta(V || WH)
// (beta = 1 Euclidean, 0 KL, -1 Itakura-Saito).  The update ratio is raised
// to the exponent that makes the step a majorization-minimization move:
// 1/(1-beta) for beta < 0, 1 on [0,1], 1/beta for beta > 1.
FactorizationModel nmf_beta(const Matrix& v, int rank, double beta,
                            const FitConfig& cfg);

// Alpha-divergence NMF: W <- W * ( [((V/WH)^alpha) H^T] / [1 H^T] )^(1/alpha)
// and symmetrically for H; alpha = 1 coincides with beta = 0.
FactorizationModel nmf_alpha(const Matrix& v, int rank, double alpha,
                             const FitConfig& cfg);

// Projective NMF minimizing the gamma divergence D_gamma(V || W W^T V) over
// W >= 0, via the split-gradient multiplicative rule with stabilizing
// exponent 1/2 and per-iteration unit-norm columns (the objective is scale
// invariant, so normalization is free).  Masks are not supported here.
FactorizationModel pnmf_gamma(const Matrix& v, int rank, double gamma,
                              const FitConfig& cfg);

}  // namespace divsel
