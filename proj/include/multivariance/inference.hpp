#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "multivariance/block_sample.hpp"
#include "multivariance/cndf.hpp"
#include "multivariance/rng.hpp"
#include "multivariance/special.hpp"
#include "multivariance/statistics.hpp"

namespace multivariance {

enum class TestMethod { ConservativeChi2, Permutation, MonteCarlo };

struct TestReport {
  double statistic = 0.0;  // N * squared statistic of `kind`
  TestMethod method = TestMethod::ConservativeChi2;
  StatisticKind kind = StatisticKind::NormalizedM;
  double alpha = 0.0;
  double critical_value = 0.0;  // chi-square methods only
  double p_value = 0.0;         // resampling methods only
  bool reject = false;
  int resamples = 0;            // resampling methods only
  std::uint64_t seed = 0;       // resampling methods only
  std::string warning;          // nonempty when e.g. alpha exceeds 0.215
};

// Validity limit of the chi-square tail bound behind the conservative tests.
inline constexpr double kConservativeAlphaLimit = 0.215;

// Test 1: rejects independence when N * normalized multivariance^2 exceeds
// the (1-alpha) chi-square(1) quantile (closed rule, >=). Valid under an
// a-priori assumption of (n-1)-independence; conservative for
// alpha <= 0.215 (larger alpha is allowed with a warning).
TestReport test_multivariance_conservative(const BlockSample& sample,
                                           const std::vector<CndfSpec>& specs,
                                           double alpha);

// Test 2: same rule with N * normalized total multivariance^2; needs no
// a-priori assumption.
TestReport test_total_conservative(const BlockSample& sample,
                                   const std::vector<CndfSpec>& specs,
                                   double alpha);

// Resampling test: blocks 2..n are independently row-permuted (block 1
// fixed) and the statistic is recomputed from the same centered matrices;
// p = (1 + #{resampled >= observed}) / (1 + resamples). Deterministic given
// the seed. Requires resamples >= 1 and N >= 3.
TestReport permutation_test(const BlockSample& sample,
                            const std::vector<CndfSpec>& specs,
                            StatisticKind kind, int resamples,
                            std::uint64_t seed, double alpha = 0.05);

// Draws one observation of one block; must return spec.dimension() values.
using MarginalSampler = std::function<Eigen::RowVectorXd(CounterRng&)>;

// Monte-Carlo test for known marginals: each resampled statistic comes from
// a fresh size-N sample of the product of the marginal laws; add-one
// p-value as above.
TestReport montecarlo_test(const BlockSample& sample,
                           const std::vector<CndfSpec>& specs,
                           const std::vector<MarginalSampler>& marginals,
                           StatisticKind kind, int resamples,
                           std::uint64_t seed, double alpha = 0.05);

// Mean of N * M^2 under independence:
//   N * ((N-1)^n + (-1)^n (N-1)) / N^(n+1) * prod b_i,
// with b_i = E psi_i(X_i - X_i'). Requires N >= 2.
double expected_scaled_statistic_under_independence(const std::vector<double>& b,
                                                    int N);

inline constexpr int kDefaultResamples = 999;

}  // namespace multivariance
