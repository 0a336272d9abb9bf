#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <stdexcept>

#include "divsel/datagen.hpp"
#include "divsel/io.hpp"
#include "doctest.h"

using divsel::DatasetKind;
using divsel::DatasetSpec;
using divsel::Matrix;

TEST_CASE("generation is deterministic in the seed") {
  DatasetSpec s;
  s.kind = DatasetKind::kBlockMatrix;
  const Matrix a = divsel::gen_dataset(s, 5);
  const Matrix b = divsel::gen_dataset(s, 5);
  const Matrix c = divsel::gen_dataset(s, 6);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("tweedie scalar draws form a count x 1 column with the right mean") {
  DatasetSpec s;  // defaults: power=1, mu=10, phi=1, count=10000
  const Matrix m = divsel::gen_dataset(s, 123);
  CHECK(m.rows() == 10000);
  CHECK(m.cols() == 1);
  CHECK(m.minCoeff() >= 0.0);
  // Poisson(10): standard error of the mean is sqrt(10/n) ~ 0.0316.
  CHECK(std::abs(m.mean() - 10.0) < 4.0 * 0.0316);
}

TEST_CASE("gaussian draws honor mu and phi") {
  DatasetSpec s;
  s.power = 0.0;
  s.mu = 5.0;
  s.phi = 4.0;
  s.count = 20000;
  const Matrix m = divsel::gen_dataset(s, 9);
  CHECK(std::abs(m.mean() - 5.0) < 4.0 * std::sqrt(4.0 / 20000.0));
  const double var =
      (m.array() - m.mean()).square().sum() / static_cast<double>(m.size() - 1);
  CHECK(std::abs(var - 4.0) < 0.15);
}

TEST_CASE("multinomial counts sum exactly to the trial count") {
  DatasetSpec s;
  s.kind = DatasetKind::kMultinomial;
  s.dimension = 200;
  s.trials = 100000;
  const Matrix m = divsel::gen_dataset(s, 77);
  CHECK(m.rows() == 200);
  CHECK(m.cols() == 1);
  CHECK(m.sum() == 100000.0);
  CHECK(m.minCoeff() >= 0.0);
  // Every entry is an integer count.
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    CHECK(m(i, 0) == std::round(m(i, 0)));
}

TEST_CASE("block matrix has the documented shape and block structure") {
  DatasetSpec s;
  s.kind = DatasetKind::kBlockMatrix;
  const Matrix m = divsel::gen_dataset(s, 31);
  CHECK(m.rows() == 50);
  CHECK(m.cols() == 30);
  CHECK(m.minCoeff() > 0.0);  // strictly positive everywhere
  // Block cells carry U(0,10) on top of U(0,1) noise, so block column means
  // in the owning rows sit near 5.5 and off-block means near 0.5.
  double on1 = 0.0, off1 = 0.0;
  for (int j = 0; j < 20; ++j) {
    for (int i = 0; i < 30; ++i) on1 += m(i, j);
    for (int i = 30; i < 50; ++i) off1 += m(i, j);
  }
  on1 /= 20.0 * 30.0;
  off1 /= 20.0 * 20.0;
  CHECK(on1 > 4.5);
  CHECK(off1 < 1.0);
  double on2 = 0.0, off2 = 0.0;
  for (int j = 20; j < 30; ++j) {
    for (int i = 30; i < 50; ++i) on2 += m(i, j);
    for (int i = 0; i < 30; ++i) off2 += m(i, j);
  }
  on2 /= 10.0 * 20.0;
  off2 /= 10.0 * 30.0;
  CHECK(on2 > 4.5);
  CHECK(off2 < 1.0);
}

TEST_CASE("file-backed dataset round-trips through the matrix reader") {
  DatasetSpec gen;
  gen.kind = DatasetKind::kBlockMatrix;
  gen.rows = 6;
  gen.cols = 4;
  gen.block1_rows = 3;
  gen.block1_cols = 2;
  gen.block2_cols = 2;
  const Matrix m = divsel::gen_dataset(gen, 1);
  const std::string path = "datagen_roundtrip.csv";
  divsel::write_matrix(path, m, divsel::MatrixFormat::kCsv);

  DatasetSpec from;
  from.kind = DatasetKind::kFromFile;
  from.path = path;
  const Matrix back = divsel::gen_dataset(from, 0);
  CHECK(back.rows() == m.rows());
  CHECK(back.cols() == m.cols());
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("invalid specs are rejected") {
  DatasetSpec s;
  s.kind = DatasetKind::kMultinomial;
  s.dimension = 0;
  CHECK_THROWS_AS(divsel::gen_dataset(s, 1), std::invalid_argument);

  DatasetSpec b;
  b.kind = DatasetKind::kBlockMatrix;
  b.block1_cols = 25;
  b.block2_cols = 10;  // 25 + 10 > 30 columns
  CHECK_THROWS_AS(divsel::gen_dataset(b, 1), std::invalid_argument);

  DatasetSpec t;
  t.power = 2.5;  // no sampler at this variance power
  CHECK_THROWS_AS(divsel::gen_dataset(t, 1), std::invalid_argument);
}
