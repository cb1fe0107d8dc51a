#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "helpers.hpp"
#include "multivariance/centering.hpp"
#include "multivariance/errors.hpp"
#include "multivariance/experiments.hpp"
#include "multivariance/oracle.hpp"
#include "multivariance/statistics.hpp"

using namespace multivariance;

namespace {

// Joint law of Bernstein's coins: the four equally likely coin outcomes.
FiniteDistribution bernstein_law() {
  Eigen::MatrixXd support(4, 3);
  support << 1, 0, 1,  // heads/heads
      1, 1, 0,         // heads/tails
      0, 0, 0,         // tails/heads
      0, 1, 1;         // tails/tails
  return FiniteDistribution(support, {1, 1, 1}, Eigen::VectorXd::Constant(4, 0.25));
}

FiniteDistribution fair_coin() {
  Eigen::MatrixXd support(2, 1);
  support << 0, 1;
  return FiniteDistribution(support, {1}, Eigen::VectorXd::Constant(2, 0.5));
}

// A dependent two-block law on {0,1}^2.
FiniteDistribution dependent_pair() {
  Eigen::MatrixXd support(3, 2);
  support << 0, 0, 1, 1, 0, 1;
  Eigen::VectorXd probs(3);
  probs << 0.4, 0.4, 0.2;
  return FiniteDistribution(support, {1, 1}, probs);
}

std::vector<CndfSpec> euclid(int blocks) {
  return std::vector<CndfSpec>(blocks, CndfSpec::euclidean(1));
}

// Population normalized total multivariance via the subset/b_S definition.
double population_normalized_total(const FiniteDistribution& dist,
                                   const std::vector<CndfSpec>& specs) {
  const int n = dist.block_count();
  const auto [a, b] = population_scale_factors(dist, specs);
  double sum = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> blocks;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) blocks.push_back(i);
    }
    if (blocks.size() < 2) continue;
    std::vector<CndfSpec> sub;
    double b_s = 1.0;
    for (int i : blocks) {
      sub.push_back(specs[i]);
      b_s *= b(i);
    }
    sum += population_multivariance_exact(dist.marginal(blocks), sub) / b_s;
  }
  return std::sqrt(sum / (std::pow(2.0, n) - 1.0 - n));
}

}  // namespace

TEST_CASE("population multivariance vanishes on product laws") {
  const FiniteDistribution product =
      dependent_pair().product_with(fair_coin());  // third block independent
  // fully independent product of three coins
  const FiniteDistribution coins =
      fair_coin().product_with(fair_coin()).product_with(fair_coin());
  CHECK(std::abs(population_multivariance_exact(coins, euclid(3))) <= 1e-12);
  CHECK(std::abs(population_total_exact(coins, euclid(3))) <= 1e-12);
  CHECK(std::abs(population_multivariance_exact(product, euclid(3))) <= 1e-12);
}

TEST_CASE("Bernstein law: analytic population values") {
  const FiniteDistribution law = bernstein_law();
  const auto specs = euclid(3);
  CHECK(population_multivariance_exact(law, specs) ==
        doctest::Approx(0.125).epsilon(1e-13));
  CHECK(population_total_exact(law, specs) == doctest::Approx(0.125).epsilon(1e-13));
  const auto [a, b] = population_scale_factors(law, specs);
  for (int i = 0; i < 3; ++i) {
    CHECK(a(i) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(b(i) == doctest::Approx(0.5).epsilon(1e-13));
  }
  // pairwise multivariances vanish (pairwise independence)
  for (const std::vector<int>& pair :
       {std::vector<int>{0, 1}, std::vector<int>{0, 2}, std::vector<int>{1, 2}}) {
    CHECK(std::abs(population_multivariance_exact(law.marginal(pair), euclid(2))) <=
          1e-13);
  }
  // M = 1/(2 sqrt 2), script M-bar = 1/2
  CHECK(std::sqrt(population_multivariance_exact(law, specs)) ==
        doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-13));
  CHECK(population_normalized_total(law, specs) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("population functional of the empirical law equals the sample statistic") {
  CounterRng rng(401);
  for (int rep = 0; rep < 40; ++rep) {
    auto inst = testutil::random_instance(rng, 1, 4);
    const auto mats = centered_matrices(inst.sample, inst.specs);
    const double sample_value = sample_multivariance(mats);
    const double population_value =
        population_multivariance_exact(FiniteDistribution::empirical(inst.sample),
                                       inst.specs);
    CHECK(testutil::close_rel(sample_value, population_value, 1e-10,
                              testutil::centered_scale(mats)));
  }
}

TEST_CASE("population scale factors on simple marginals") {
  // degenerate marginal
  Eigen::MatrixXd support(1, 2);
  support << 3.5, 1.0;
  const FiniteDistribution degenerate(support, {1, 1}, Eigen::VectorXd::Ones(1));
  const auto [a0, b0] = population_scale_factors(degenerate, euclid(2));
  CHECK(a0(0) == 0.0);
  CHECK(b0(0) == 0.0);

  // two-point uniform marginal {0, t}: b = t/2
  const double t = 3.25;
  Eigen::MatrixXd twopoint(2, 1);
  twopoint << 0, t;
  const FiniteDistribution law(twopoint, {1}, Eigen::VectorXd::Constant(2, 0.5));
  const auto [a1, b1] = population_scale_factors(law, euclid(1));
  CHECK(b1(0) == doctest::Approx(t / 2.0).epsilon(1e-14));
}

TEST_CASE("appending an independent block: totals fixed, multivariance zero") {
  const FiniteDistribution law3 = bernstein_law();
  const FiniteDistribution law4 = law3.product_with(fair_coin());
  const auto specs3 = euclid(3);
  const auto specs4 = euclid(4);

  CHECK(std::abs(population_multivariance_exact(law4, specs4)) <= 1e-12);
  CHECK(population_total_exact(law4, specs4) ==
        doctest::Approx(population_total_exact(law3, specs3)).epsilon(1e-12));

  // script M-bar scales by r(n) = sqrt(2^n - n - 1)/sqrt(2^(n+1) - n - 2)
  const double r3 = std::sqrt(8.0 - 3.0 - 1.0) / std::sqrt(16.0 - 3.0 - 2.0);
  CHECK(population_normalized_total(law4, specs4) ==
        doctest::Approx(r3 * population_normalized_total(law3, specs3)).epsilon(1e-12));
}

TEST_CASE("factorization for independent groups of blocks") {
  const FiniteDistribution left = dependent_pair();
  const FiniteDistribution right = dependent_pair();
  const FiniteDistribution joint = left.product_with(right);
  const double m_left = population_multivariance_exact(left, euclid(2));
  const double m_right = population_multivariance_exact(right, euclid(2));
  const double m_joint = population_multivariance_exact(joint, euclid(4));
  CHECK(m_left > 0.0);
  CHECK(testutil::close_rel(m_joint, m_left * m_right, 1e-12, 1e-14));
}

TEST_CASE("brute-force sample multivariance on pinned fixtures") {
  Eigen::MatrixXd data(2, 2);
  data << 0, 0, 1, 1;
  const BlockSample sample(data, {1, 1});
  CHECK(sample_multivariance_bruteforce(sample, euclid(2)) ==
        doctest::Approx(0.25).epsilon(1e-14));

  Eigen::MatrixXd constant = Eigen::MatrixXd::Constant(6, 2, 2.0);
  CHECK(sample_multivariance_bruteforce(BlockSample(constant, {1, 1}), euclid(2)) ==
        doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("subset enumeration bounds") {
  CounterRng rng(409);
  auto inst = testutil::random_instance(rng, 2, 2);
  const auto mats = centered_matrices(inst.sample, inst.specs);
  CHECK(total_via_subset_enumeration(mats) ==
        doctest::Approx(sample_multivariance(mats)).epsilon(1e-12));

  std::vector<CenteredDistanceMatrix> too_many(13, mats[0]);
  CHECK_THROWS_AS(total_via_subset_enumeration(too_many), InputError);
  CHECK_THROWS_AS(total_via_subset_enumeration({mats[0]}), InputError);
}

TEST_CASE("Gaussian multivariance: independent law is within noise of zero") {
  const FiniteDistribution coins = fair_coin().product_with(fair_coin());
  const auto result = gaussian_multivariance_mc(coins, euclid(2), 20000, 1234);
  CHECK(std::abs(result.estimate) <= 3.0 * result.std_error + 1e-12);
}

TEST_CASE("Gaussian multivariance matches the Bernstein value") {
  const auto result = gaussian_multivariance_mc(bernstein_law(), euclid(3), 40000, 777);
  CHECK(result.std_error > 0.0);
  CHECK(std::abs(result.estimate - 0.125) <= 3.0 * result.std_error);
}

TEST_CASE("Gaussian multivariance matches the exact oracle on a random law") {
  CounterRng rng(421);
  for (std::uint64_t seed : {90001ull, 90002ull, 90003ull}) {
    const int m = 4 + static_cast<int>(rng.next_below(3));
    Eigen::MatrixXd support(m, 3);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < 3; ++c) support(r, c) = rng.next_normal();
    }
    Eigen::VectorXd probs(m);
    double sum = 0.0;
    for (int r = 0; r < m; ++r) {
      probs(r) = 0.2 + rng.next_double();
      sum += probs(r);
    }
    probs /= sum;
    const FiniteDistribution law(support, {1, 1, 1}, probs);
    const double exact = population_multivariance_exact(law, euclid(3));
    const auto mc = gaussian_multivariance_mc(law, euclid(3), 60000, seed);
    CHECK(std::abs(mc.estimate - exact) <= 3.0 * mc.std_error);
  }
}

TEST_CASE("finite distributions merge duplicates and validate probabilities") {
  Eigen::MatrixXd support(3, 1);
  support << 1.0, 2.0, 1.0;
  Eigen::VectorXd probs(3);
  probs << 0.25, 0.5, 0.25;
  const FiniteDistribution law(support, {1}, probs);
  CHECK(law.support_size() == 2);
  CHECK(law.probabilities()(0) == doctest::Approx(0.5).epsilon(1e-14));

  Eigen::VectorXd bad(3);
  bad << 0.2, 0.5, 0.2;  // sums to 0.9
  CHECK_THROWS_AS(FiniteDistribution(support, {1}, bad), InputError);
  Eigen::VectorXd negative(3);
  negative << -0.25, 1.0, 0.25;
  CHECK_THROWS_AS(FiniteDistribution(support, {1}, negative), InputError);
}

TEST_CASE("finite distribution loads from CSV and JSON") {
  const std::string path = "finite_dist_test.csv";
  {
    std::ofstream out(path);
    out << "x,y,p\n0,0,0.25\n1,0,0.25\n0,1,0.25\n1,1,0.25\n";
  }
  const FiniteDistribution from_csv = FiniteDistribution::from_csv(path, "0;1");
  CHECK(from_csv.support_size() == 4);
  CHECK(from_csv.block_count() == 2);
  CHECK(std::abs(population_multivariance_exact(from_csv, euclid(2))) <= 1e-13);
  std::remove(path.c_str());

  const FiniteDistribution from_json = FiniteDistribution::from_json_text(
      R"({"block_widths":[1,1,1],
          "points":[[1,0,1],[1,1,0],[0,0,0],[0,1,1]],
          "probabilities":[0.25,0.25,0.25,0.25]})");
  CHECK(population_multivariance_exact(from_json, euclid(3)) ==
        doctest::Approx(0.125).epsilon(1e-13));
  CHECK_THROWS_AS(FiniteDistribution::from_json_text("{"), InputError);
  CHECK_THROWS_AS(FiniteDistribution::from_json_text("{\"points\":[[1]]}"), InputError);
}

TEST_CASE("oracle agreement across the three computation paths") {
  CounterRng rng(431);
  for (int rep = 0; rep < 100; ++rep) {
    auto inst = testutil::random_instance(rng, 1, 4);
    const auto mats = centered_matrices(inst.sample, inst.specs);
    const double fast = sample_multivariance(mats);
    const double brute = sample_multivariance_bruteforce(inst.sample, inst.specs);
    const double population = population_multivariance_exact(
        FiniteDistribution::empirical(inst.sample), inst.specs);
    const double scale = testutil::centered_scale(mats);
    CHECK(testutil::close_rel(fast, brute, 1e-10, scale));
    CHECK(testutil::close_rel(fast, population, 1e-10, scale));
  }
}
