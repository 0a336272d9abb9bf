#include "divsel/datagen.hpp"

#include <algorithm>
#include <vector>

#include "divsel/io.hpp"
#include "divsel/rng.hpp"
#include "divsel/tweedie.hpp"

namespace divsel {
namespace {

Matrix gen_multinomial(int dimension, long long trials, std::uint64_t seed) {
  require(dimension >= 1 && trials >= 1, "need dimension >= 1, trials >= 1");
  Rng rng(seed);
  // Probabilities: uniform draws normalized to sum 1.
  std::vector<double> cdf(dimension);
  double total = 0.0;
  for (int i = 0; i < dimension; ++i) {
    total += rng.uniform_pos();
    cdf[i] = total;
  }
  for (int i = 0; i < dimension; ++i) cdf[i] /= total;
  cdf[dimension - 1] = 1.0;

  // Bucket each trial through the cdf; the total is `trials` by construction.
  Matrix counts = Matrix::Zero(dimension, 1);
  for (long long t = 0; t < trials; ++t) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    counts(static_cast<Eigen::Index>(it - cdf.begin()), 0) += 1.0;
  }
  return counts;
}

Matrix gen_block_matrix(const DatasetSpec& s, std::uint64_t seed) {
  require(s.rows > 0 && s.cols > 0, "block matrix shape must be positive");
  require(s.block1_rows <= s.rows &&
              s.block1_cols + s.block2_cols <= s.cols,
          "blocks must fit inside the matrix");
  Rng rng(seed);
  Matrix v(s.rows, s.cols);
  for (Eigen::Index j = 0; j < s.cols; ++j)
    for (Eigen::Index i = 0; i < s.rows; ++i)
      v(i, j) = rng.uniform_pos() * s.noise_high;
  for (Eigen::Index j = 0; j < s.block1_cols; ++j)
    for (Eigen::Index i = 0; i < s.block1_rows; ++i)
      v(i, j) += rng.uniform_pos() * s.block_high;
  for (Eigen::Index j = s.block1_cols; j < s.block1_cols + s.block2_cols; ++j)
    for (Eigen::Index i = s.block1_rows; i < s.rows; ++i)
      v(i, j) += rng.uniform_pos() * s.block_high;
  return v;
}

}  // namespace

Matrix gen_dataset(const DatasetSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case DatasetKind::kTweedieScalar: {
      const Vector draws = tweedie_sample(
          TweedieModel{spec.mu, spec.phi, spec.power}, spec.count, seed);
      return draws;
    }
    case DatasetKind::kMultinomial:
      return gen_multinomial(spec.dimension, spec.trials, seed);
    case DatasetKind::kBlockMatrix:
      return gen_block_matrix(spec, seed);
    case DatasetKind::kFromFile:
      return read_matrix(spec.path, format_from_path(spec.path));
  }
  throw std::invalid_argument("unknown dataset kind");
}

}  // namespace divsel
