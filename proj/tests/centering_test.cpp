#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "helpers.hpp"
#include "multivariance/centering.hpp"
#include "multivariance/compensated.hpp"
#include "multivariance/errors.hpp"

using namespace multivariance;

namespace {

BlockSample one_column(std::initializer_list<double> values) {
  Eigen::MatrixXd data(static_cast<Eigen::Index>(values.size()), 1);
  int r = 0;
  for (double v : values) data(r++, 0) = v;
  return BlockSample(std::move(data), {1});
}

}  // namespace

TEST_CASE("distance matrix on pinned fixtures") {
  const CndfSpec euclid = CndfSpec::euclidean(1);

  Eigen::MatrixXd B = distance_matrix(one_column({0.0, 1.0}), 0, euclid);
  CHECK(B(0, 0) == 0.0);
  CHECK(B(0, 1) == 1.0);
  CHECK(B(1, 0) == 1.0);
  CHECK(B(1, 1) == 0.0);

  B = distance_matrix(one_column({2.5, 2.5, 2.5}), 0, euclid);
  CHECK(B.cwiseAbs().maxCoeff() == 0.0);

  B = distance_matrix(one_column({0.0, 1.0, 3.0}), 0, euclid);
  Eigen::MatrixXd expected(3, 3);
  expected << 0, 1, 3, 1, 0, 2, 3, 2, 0;
  CHECK((B - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("distance matrix rejects dimension mismatch and oversized samples") {
  CHECK_THROWS_AS(distance_matrix(one_column({0.0, 1.0}), 0, CndfSpec::euclidean(2)),
                  InputError);
  CHECK_THROWS_AS(distance_matrix(one_column({0.0, 1.0, 2.0}), 0,
                                  CndfSpec::euclidean(1), /*max_sample_size=*/2),
                  InputError);
}

TEST_CASE("double centering of the two-point fixture") {
  Eigen::MatrixXd B(2, 2);
  B << 0, 1, 1, 0;
  const CenteredDistanceMatrix c = double_center(B);
  CHECK(c.grand_mean == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.centered(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.centered(0, 1) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(c.centered(1, 0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(c.centered(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("double centering of the zero matrix") {
  const CenteredDistanceMatrix c = double_center(Eigen::MatrixXd::Zero(4, 4));
  CHECK(c.grand_mean == 0.0);
  CHECK(c.centered.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("double centering rejects non-square input") {
  CHECK_THROWS_AS(double_center(Eigen::MatrixXd::Zero(3, 4)), InputError);
}

TEST_CASE("row sums of a centered random symmetric matrix vanish") {
  CounterRng rng(101);
  for (int rep = 0; rep < 20; ++rep) {
    const int N = 5;
    Eigen::MatrixXd B(N, N);
    for (int j = 0; j < N; ++j) {
      B(j, j) = 0.0;
      for (int k = j + 1; k < N; ++k) {
        const double v = std::abs(rng.next_normal());
        B(j, k) = v;
        B(k, j) = v;
      }
    }
    const CenteredDistanceMatrix c = double_center(B);
    const double scale = std::max(1.0, B.cwiseAbs().maxCoeff());
    for (int j = 0; j < N; ++j) {
      CHECK(std::abs(c.centered.row(j).sum()) <= 1e-12 * scale);
      CHECK(std::abs(c.centered.col(j).sum()) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("centered matrices satisfy the type invariants on random samples") {
  CounterRng rng(103);
  for (int rep = 0; rep < 40; ++rep) {
    auto inst = testutil::random_instance(rng);
    const auto mats = centered_matrices(inst.sample, inst.specs);
    for (const auto& m : mats) {
      const int N = static_cast<int>(m.distances.rows());
      const double scale = std::max(1e-30, m.distances.cwiseAbs().maxCoeff());
      for (int j = 0; j < N; ++j) {
        CHECK(m.distances(j, j) == 0.0);
        CHECK(std::abs(m.centered.row(j).sum()) <= 1e-9 * scale);
        for (int k = 0; k < N; ++k) {
          CHECK(m.distances(j, k) == m.distances(k, j));
          CHECK(m.distances(j, k) >= 0.0);
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.centered);
      CHECK(solver.eigenvalues().minCoeff() >= -1e-9 * scale);
    }
  }
}

TEST_CASE("translation invariance of B up to rounding") {
  CounterRng rng(107);
  Eigen::MatrixXd data(8, 2);
  for (int r = 0; r < 8; ++r) {
    data(r, 0) = rng.next_normal();
    data(r, 1) = rng.next_normal();
  }
  const CndfSpec spec = CndfSpec::stable(1.3, 2);
  const BlockSample sample(data, {2});
  Eigen::MatrixXd shifted = data;
  shifted.col(0).array() += 11.25;
  shifted.col(1).array() -= 3.5;
  const BlockSample sample2(shifted, {2});
  const Eigen::MatrixXd B1 = distance_matrix(sample, 0, spec);
  const Eigen::MatrixXd B2 = distance_matrix(sample2, 0, spec);
  CHECK((B1 - B2).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, B1.maxCoeff()));
}

TEST_CASE("sign invariance of B is exact") {
  CounterRng rng(109);
  Eigen::MatrixXd data(7, 1);
  for (int r = 0; r < 7; ++r) data(r, 0) = rng.next_normal();
  const CndfSpec spec = CndfSpec::stable(0.8, 1);
  const Eigen::MatrixXd B1 = distance_matrix(BlockSample(data, {1}), 0, spec);
  const Eigen::MatrixXd B2 = distance_matrix(BlockSample(-data, {1}), 0, spec);
  CHECK((B1 - B2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("permutation equivariance of A") {
  CounterRng rng(113);
  const int N = 9;
  Eigen::MatrixXd data(N, 1);
  for (int r = 0; r < N; ++r) data(r, 0) = rng.next_normal();
  const CndfSpec spec = CndfSpec::euclidean(1);
  const auto c = double_center(distance_matrix(BlockSample(data, {1}), 0, spec));

  const std::vector<int> perm = rng.next_permutation(N);
  Eigen::MatrixXd permuted(N, 1);
  for (int r = 0; r < N; ++r) permuted(r, 0) = data(perm[r], 0);
  const auto cp = double_center(distance_matrix(BlockSample(permuted, {1}), 0, spec));

  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      CHECK(cp.centered(j, k) == doctest::Approx(c.centered(perm[j], perm[k])).epsilon(1e-13));
    }
  }
}

TEST_CASE("stable scaling multiplies B and A by c^alpha") {
  CounterRng rng(127);
  const double alpha = 1.4;
  const double c = 2.75;
  const int N = 8;
  Eigen::MatrixXd data(N, 1);
  for (int r = 0; r < N; ++r) data(r, 0) = rng.next_normal();
  const CndfSpec spec = CndfSpec::stable(alpha, 1);
  const auto base = double_center(distance_matrix(BlockSample(data, {1}), 0, spec));
  const auto scaled =
      double_center(distance_matrix(BlockSample(c * data, {1}), 0, spec));
  const double factor = std::pow(c, alpha);
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      CHECK(testutil::close_rel(scaled.distances(j, k), factor * base.distances(j, k),
                                1e-12, 1e-12));
      CHECK(std::abs(scaled.centered(j, k) - factor * base.centered(j, k)) <=
            1e-12 * std::max(1.0, factor * base.distances.maxCoeff()));
    }
  }
}

TEST_CASE("sum of all entries of a centered matrix is zero") {
  CounterRng rng(131);
  for (int rep = 0; rep < 20; ++rep) {
    auto inst = testutil::random_instance(rng, 1, 1);
    const auto mats = centered_matrices(inst.sample, inst.specs);
    CompensatedSum sum;
    for (int j = 0; j < inst.sample.sample_size(); ++j) {
      for (int k = 0; k < inst.sample.sample_size(); ++k) sum.add(mats[0].centered(j, k));
    }
    const double scale = std::max(1.0, mats[0].distances.cwiseAbs().maxCoeff());
    CHECK(std::abs(sum.value()) <= 1e-10 * scale);
  }
}

TEST_CASE("duplicate sample points are allowed") {
  const auto mats =
      centered_matrices(one_column({1.0, 1.0, 2.0}), {CndfSpec::euclidean(1)});
  CHECK(mats[0].distances(0, 1) == 0.0);  // off-diagonal zero, no jitter
}

TEST_CASE("construction allows N=1 but estimation requires N>=2") {
  const BlockSample single(Eigen::MatrixXd::Zero(1, 2), {1, 1});
  CHECK(single.sample_size() == 1);
  CHECK_THROWS_AS(
      centered_matrices(single, {CndfSpec::euclidean(1), CndfSpec::euclidean(1)}),
      InputError);
  Eigen::MatrixXd with_nan(2, 1);
  with_nan << 1.0, std::nan("");
  CHECK_THROWS_AS(BlockSample(with_nan, {1}), InputError);
}

TEST_CASE("matrix CSV dump writes the N header and entries") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1.5, 1.5, 0;
  const std::string path = "dump_test.csv";
  dump_matrix_csv(m, path);
  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "2");
  REQUIRE(std::getline(in, line));
  CHECK(line == "0,1.5");
  std::remove(path.c_str());
}
