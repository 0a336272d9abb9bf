#pragma once

#include <cstdint>
#include <string>

#include "divsel/common.hpp"

namespace divsel {

enum class DatasetKind { kTweedieScalar, kMultinomial, kBlockMatrix, kFromFile };

struct DatasetSpec {
  DatasetKind kind = DatasetKind::kTweedieScalar;

  // TweedieScalar: `count` iid draws with variance power, mean, dispersion.
  double power = 1.0;
  double mu = 10.0;
  double phi = 1.0;
  int count = 10000;

  // Multinomial: probabilities are normalized uniform draws; counts sum to
  // `trials` exactly.
  int dimension = 1000;
  long long trials = 10000000;

  // BlockMatrix: rows x cols of U(0, noise_high) noise, plus U(0, block_high)
  // added on two diagonal blocks (block1_rows x block1_cols from the origin,
  // the remaining rows x block2_cols next to it).
  int rows = 50;
  int cols = 30;
  int block1_rows = 30;
  int block1_cols = 20;
  int block2_cols = 10;
  double block_high = 10.0;
  double noise_high = 1.0;

  // FromFile: CSV/TSV path (format chosen by extension).
  std::string path;
};

// Draws the dataset described by `spec`; deterministic under `seed`.
// Scalar kinds return a column vector (count x 1 or dimension x 1).
Matrix gen_dataset(const DatasetSpec& spec, std::uint64_t seed);

}  // namespace divsel
