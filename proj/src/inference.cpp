#include "multivariance/inference.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "multivariance/errors.hpp"
#include "multivariance/parallel.hpp"

namespace multivariance {

namespace {

void check_alpha(double alpha, TestReport& report) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw InputError("test: alpha must lie in (0,1), got " + std::to_string(alpha));
  }
  if (alpha > kConservativeAlphaLimit) {
    report.warning = "alpha exceeds 0.215; the chi-square bound is only proved "
                     "up to 0.215, the test may not be conservative";
  }
}

TestReport conservative_test(const BlockSample& sample,
                             const std::vector<CndfSpec>& specs, double alpha,
                             StatisticKind kind) {
  TestReport report;
  report.method = TestMethod::ConservativeChi2;
  report.kind = kind;
  report.alpha = alpha;
  check_alpha(alpha, report);
  const auto mats = centered_matrices(sample, specs);
  report.statistic = sample.sample_size() * statistic_value(mats, kind);
  report.critical_value = chi2_quantile_1df(1.0 - alpha);
  report.reject = report.statistic >= report.critical_value;  // closed rule
  return report;
}

double add_one_p_value(int exceeding, int resamples) {
  return (1.0 + exceeding) / (1.0 + resamples);
}

}  // namespace

TestReport test_multivariance_conservative(const BlockSample& sample,
                                           const std::vector<CndfSpec>& specs,
                                           double alpha) {
  return conservative_test(sample, specs, alpha, StatisticKind::NormalizedM);
}

TestReport test_total_conservative(const BlockSample& sample,
                                   const std::vector<CndfSpec>& specs,
                                   double alpha) {
  return conservative_test(sample, specs, alpha, StatisticKind::NormalizedTotalM);
}

TestReport permutation_test(const BlockSample& sample,
                            const std::vector<CndfSpec>& specs,
                            StatisticKind kind, int resamples,
                            std::uint64_t seed, double alpha) {
  if (resamples < 1) {
    throw InputError("permutation_test: resamples must be >= 1");
  }
  if (sample.sample_size() < 3) {
    throw InputError("permutation_test: needs N >= 3");
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw InputError("permutation_test: alpha must lie in (0,1)");
  }
  const int N = sample.sample_size();
  const int n = sample.block_count();
  const auto mats = centered_matrices(sample, specs);
  const double observed = statistic_value(mats, kind);

  const CounterRng root(seed);
  std::atomic<int> exceeding{0};
  parallel_for(resamples, [&](int r) {
    CounterRng rng = root.substream(static_cast<std::uint64_t>(r));
    std::vector<std::vector<int>> perms;
    perms.reserve(n - 1);
    for (int i = 1; i < n; ++i) perms.push_back(rng.next_permutation(N));
    if (permuted_statistic(mats, perms, kind) >= observed) {
      exceeding.fetch_add(1, std::memory_order_relaxed);
    }
  });

  TestReport report;
  report.method = TestMethod::Permutation;
  report.kind = kind;
  report.alpha = alpha;
  report.statistic = N * observed;
  report.resamples = resamples;
  report.seed = seed;
  report.p_value = add_one_p_value(exceeding.load(), resamples);
  report.reject = report.p_value <= alpha;
  return report;
}

TestReport montecarlo_test(const BlockSample& sample,
                           const std::vector<CndfSpec>& specs,
                           const std::vector<MarginalSampler>& marginals,
                           StatisticKind kind, int resamples,
                           std::uint64_t seed, double alpha) {
  if (resamples < 1) {
    throw InputError("montecarlo_test: resamples must be >= 1");
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw InputError("montecarlo_test: alpha must lie in (0,1)");
  }
  const int N = sample.sample_size();
  const int n = sample.block_count();
  if (static_cast<int>(marginals.size()) != n) {
    throw InputError("montecarlo_test: " + std::to_string(marginals.size()) +
                     " samplers for " + std::to_string(n) + " blocks");
  }
  const auto mats = centered_matrices(sample, specs);
  const double observed = statistic_value(mats, kind);

  const int d = static_cast<int>(sample.data().cols());
  const CounterRng root(seed);
  std::atomic<int> exceeding{0};
  parallel_for(resamples, [&](int r) {
    CounterRng rng = root.substream(static_cast<std::uint64_t>(r));
    Eigen::MatrixXd draws(N, d);
    int offset = 0;
    for (int i = 0; i < n; ++i) {
      const int di = sample.block_dimension(i);
      for (int row = 0; row < N; ++row) {
        const Eigen::RowVectorXd v = marginals[i](rng);
        if (v.size() != di) {
          throw InputError("montecarlo_test: sampler for block " + std::to_string(i) +
                           " produced dimension " + std::to_string(v.size()) +
                           ", expected " + std::to_string(di));
        }
        draws.row(row).segment(offset, di) = v;
      }
      offset += di;
    }
    const BlockSample resampled(std::move(draws), sample.block_widths());
    const auto resampled_mats = centered_matrices(resampled, specs);
    if (statistic_value(resampled_mats, kind) >= observed) {
      exceeding.fetch_add(1, std::memory_order_relaxed);
    }
  });

  TestReport report;
  report.method = TestMethod::MonteCarlo;
  report.kind = kind;
  report.alpha = alpha;
  report.statistic = N * observed;
  report.resamples = resamples;
  report.seed = seed;
  report.p_value = add_one_p_value(exceeding.load(), resamples);
  report.reject = report.p_value <= alpha;
  return report;
}

double expected_scaled_statistic_under_independence(const std::vector<double>& b,
                                                    int N) {
  if (N < 2) {
    throw InputError("expected_scaled_statistic_under_independence: N must be >= 2");
  }
  if (b.empty()) {
    throw InputError("expected_scaled_statistic_under_independence: empty b");
  }
  const int n = static_cast<int>(b.size());
  const double sign = n % 2 == 0 ? 1.0 : -1.0;
  const double c =
      (std::pow(N - 1.0, n) + sign * (N - 1.0)) / std::pow(static_cast<double>(N), n + 1);
  double scale = 1.0;
  for (double bi : b) scale *= bi;
  return N * c * scale;
}

}  // namespace multivariance
