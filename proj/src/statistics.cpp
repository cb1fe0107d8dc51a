#include "multivariance/statistics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "multivariance/compensated.hpp"
#include "multivariance/errors.hpp"

namespace multivariance {

namespace {

// |a|^n for the small integer n = block count.
double abs_pow(double a, int n) {
  double v = std::abs(a);
  double out = 1.0;
  for (int i = 0; i < n; ++i) out *= v;
  return out;
}

int common_sample_size(const std::vector<CenteredDistanceMatrix>& mats) {
  if (mats.empty()) throw InputError("statistics: empty matrix list");
  const Eigen::Index N = mats.front().centered.rows();
  for (const auto& m : mats) {
    if (m.centered.rows() != N || m.centered.cols() != N) {
      throw InputError("statistics: centered matrices disagree on N");
    }
  }
  return static_cast<int>(N);
}

double normalized_total_from_sum(double mean_of_products, int n) {
  return (mean_of_products - 1.0) / (std::pow(2.0, n) - 1.0 - n);
}

double hadamard_product_mean(const std::vector<const Eigen::MatrixXd*>& As, int N) {
  CompensatedSum sum;
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      double prod = 1.0;
      for (const Eigen::MatrixXd* A : As) prod *= (*A)(j, k);
      sum.add(prod);
    }
  }
  return sum.value() / (static_cast<double>(N) * N);
}

// Per-block entry evaluator for the streaming pass; one-dimensional blocks
// bypass the Eigen::Ref machinery, which dominates at N^2 call counts.
struct StreamingPsi {
  const CndfSpec* spec = nullptr;
  const BlockSample* sample = nullptr;
  int block = 0;
  const double* column = nullptr;  // non-null for 1-d blocks

  double operator()(int j, int k) const {
    if (column) {
      const double a = std::abs(column[j] - column[k]);
      switch (spec->kind()) {
        case CndfKind::Stable:
          return spec->alpha() == 1.0 ? a : std::pow(a, spec->alpha());
        case CndfKind::Minkowski:
          return a;  // the 1-d p-norm is |x| for every p
        case CndfKind::BoundedExp:
          return -std::expm1(-spec->gamma() * a) / spec->gamma();
      }
    }
    return evaluate_difference(*spec, sample->observation(block, j),
                               sample->observation(block, k));
  }
};

StreamingPsi make_streaming_psi(const BlockSample& sample, int block,
                                const CndfSpec& spec) {
  StreamingPsi psi;
  psi.spec = &spec;
  psi.sample = &sample;
  psi.block = block;
  if (sample.block_dimension(block) == 1) {
    psi.column = sample.block(block).data();
  }
  return psi;
}

}  // namespace

double MultivarianceEstimates::root(double squared) const {
  if (squared < 0.0) {
    clamped = true;
    return 0.0;
  }
  return std::sqrt(squared);
}

double sample_multivariance(const std::vector<CenteredDistanceMatrix>& mats) {
  const int N = common_sample_size(mats);
  std::vector<const Eigen::MatrixXd*> As;
  As.reserve(mats.size());
  for (const auto& m : mats) As.push_back(&m.centered);
  return hadamard_product_mean(As, N);
}

double sample_total_multivariance(const std::vector<CenteredDistanceMatrix>& mats) {
  const int N = common_sample_size(mats);
  if (mats.size() < 2) {
    throw InputError("sample_total_multivariance: needs n >= 2 blocks");
  }
  CompensatedSum sum;
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      double prod = 1.0;
      for (const auto& m : mats) prod *= 1.0 + m.centered(j, k);
      sum.add(prod);
    }
  }
  return sum.value() / (static_cast<double>(N) * N) - 1.0;
}

double subset_multivariance(const std::vector<CenteredDistanceMatrix>& mats,
                            const std::vector<int>& subset) {
  if (subset.empty()) throw InputError("subset_multivariance: empty subset");
  const int N = common_sample_size(mats);
  std::vector<const Eigen::MatrixXd*> As;
  As.reserve(subset.size());
  for (int i : subset) {
    if (i < 0 || i >= static_cast<int>(mats.size())) {
      throw InputError("subset_multivariance: block index " + std::to_string(i) +
                       " out of range");
    }
    As.push_back(&mats[i].centered);
  }
  return hadamard_product_mean(As, N);
}

double normalized_multivariance(const std::vector<CenteredDistanceMatrix>& mats) {
  double scale = 1.0;
  for (const auto& m : mats) {
    if (m.grand_mean == 0.0) return 0.0;  // 0/0 := 0
    scale *= m.grand_mean;
  }
  return sample_multivariance(mats) / scale;
}

double normalized_total_multivariance(const std::vector<CenteredDistanceMatrix>& mats) {
  const int N = common_sample_size(mats);
  const int n = static_cast<int>(mats.size());
  if (n < 2) throw InputError("normalized_total_multivariance: needs n >= 2 blocks");
  CompensatedSum sum;
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      double prod = 1.0;
      for (const auto& m : mats) {
        if (m.grand_mean != 0.0) prod *= 1.0 + m.centered(j, k) / m.grand_mean;
      }
      sum.add(prod);
    }
  }
  return normalized_total_from_sum(sum.value() / (static_cast<double>(N) * N), n);
}

double multicorrelation(const std::vector<CenteredDistanceMatrix>& mats) {
  const int N = common_sample_size(mats);
  const int n = static_cast<int>(mats.size());
  if (n < 2) throw InputError("multicorrelation: needs n >= 2 blocks");
  double scale = 1.0;
  for (const auto& m : mats) {
    CompensatedSum powers;
    for (int j = 0; j < N; ++j) {
      for (int k = 0; k < N; ++k) powers.add(abs_pow(m.centered(j, k), n));
    }
    const double a = std::pow(powers.value() / (static_cast<double>(N) * N), 1.0 / n);
    if (a == 0.0) return 0.0;  // degenerate block, 0/0 := 0
    scale *= a;
  }
  return sample_multivariance(mats) / scale;
}

MultivarianceEstimates compute_estimates(const std::vector<CenteredDistanceMatrix>& mats) {
  const int N = common_sample_size(mats);
  const int n = static_cast<int>(mats.size());

  MultivarianceEstimates e;
  e.sample_size = N;
  e.block_count = n;
  e.b_hat.resize(n);
  for (int i = 0; i < n; ++i) e.b_hat(i) = mats[i].grand_mean;

  // One fused pass: raw product, total product, b-normalized total product
  // and the |A_i|^n power sums.
  CompensatedSum product_sum, total_sum, norm_total_sum;
  std::vector<CompensatedSum> power_sums(n);
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      double prod = 1.0, tot = 1.0, ntot = 1.0;
      for (int i = 0; i < n; ++i) {
        const double a = mats[i].centered(j, k);
        prod *= a;
        tot *= 1.0 + a;
        if (e.b_hat(i) != 0.0) ntot *= 1.0 + a / e.b_hat(i);
        power_sums[i].add(abs_pow(a, n));
      }
      product_sum.add(prod);
      total_sum.add(tot);
      norm_total_sum.add(ntot);
    }
  }
  const double nn = static_cast<double>(N) * N;
  e.m2 = product_sum.value() / nn;

  e.a_hat.resize(n);
  double a_scale = 1.0, b_scale = 1.0;
  bool degenerate = false;
  for (int i = 0; i < n; ++i) {
    e.a_hat(i) = std::pow(power_sums[i].value() / nn, 1.0 / n);
    if (e.a_hat(i) == 0.0 || e.b_hat(i) == 0.0) degenerate = true;
    a_scale *= e.a_hat(i);
    b_scale *= e.b_hat(i);
  }
  e.normalized_m2 = degenerate ? 0.0 : e.m2 / b_scale;
  if (n >= 2) {
    e.total_m2 = total_sum.value() / nn - 1.0;
    e.normalized_total_m2 = normalized_total_from_sum(norm_total_sum.value() / nn, n);
    e.multicorrelation2 = degenerate ? 0.0 : e.m2 / a_scale;
  } else {
    e.total_m2 = std::numeric_limits<double>::quiet_NaN();
    e.normalized_total_m2 = std::numeric_limits<double>::quiet_NaN();
    e.multicorrelation2 = std::numeric_limits<double>::quiet_NaN();
  }
  return e;
}

MultivarianceEstimates compute_estimates_streaming(const BlockSample& sample,
                                                   const std::vector<CndfSpec>& specs) {
  const int N = sample.sample_size();
  const int n = sample.block_count();
  if (static_cast<int>(specs.size()) != n) {
    throw InputError("compute_estimates_streaming: " + std::to_string(specs.size()) +
                     " cndf specs for " + std::to_string(n) + " blocks");
  }
  if (N < 2) throw InputError("compute_estimates_streaming: estimation needs N >= 2");
  for (int i = 0; i < n; ++i) {
    if (specs[i].dimension() != sample.block_dimension(i)) {
      throw InputError("compute_estimates_streaming: cndf dimension mismatch at block " +
                       std::to_string(i));
    }
  }

  std::vector<StreamingPsi> psi;
  psi.reserve(n);
  for (int i = 0; i < n; ++i) psi.push_back(make_streaming_psi(sample, i, specs[i]));

  // Pass 1: per-block row sums and grand mean of B without storing it.
  std::vector<Eigen::VectorXd> row_mean(n);
  MultivarianceEstimates e;
  e.sample_size = N;
  e.block_count = n;
  e.b_hat.resize(n);
  for (int i = 0; i < n; ++i) {
    std::vector<CompensatedSum> rows(N);
    for (int j = 0; j < N; ++j) {
      for (int k = j + 1; k < N; ++k) {
        const double v = psi[i](j, k);
        rows[j].add(v);
        rows[k].add(v);
      }
    }
    row_mean[i].resize(N);
    CompensatedSum grand;
    for (int j = 0; j < N; ++j) {
      const double total = rows[j].value();
      row_mean[i](j) = total / N;
      grand.add(total);
    }
    e.b_hat(i) = grand.value() / (static_cast<double>(N) * N);
  }

  // Pass 2: same fused accumulation as compute_estimates, entries recomputed
  // on the fly; symmetry halves the psi evaluations.
  CompensatedSum product_sum, total_sum, norm_total_sum;
  std::vector<CompensatedSum> power_sums(n);
  auto accumulate = [&](int j, int k, double weight) {
    double prod = 1.0, tot = 1.0, ntot = 1.0;
    for (int i = 0; i < n; ++i) {
      const double a = -((j == k ? 0.0 : psi[i](j, k)) - row_mean[i](j) -
                         row_mean[i](k) + e.b_hat(i));
      prod *= a;
      tot *= 1.0 + a;
      if (e.b_hat(i) != 0.0) ntot *= 1.0 + a / e.b_hat(i);
      power_sums[i].add(weight * abs_pow(a, n));
    }
    product_sum.add(weight * prod);
    total_sum.add(weight * tot);
    norm_total_sum.add(weight * ntot);
  };
  for (int j = 0; j < N; ++j) {
    accumulate(j, j, 1.0);
    for (int k = j + 1; k < N; ++k) accumulate(j, k, 2.0);
  }

  const double nn = static_cast<double>(N) * N;
  e.m2 = product_sum.value() / nn;
  e.a_hat.resize(n);
  double a_scale = 1.0, b_scale = 1.0;
  bool degenerate = false;
  for (int i = 0; i < n; ++i) {
    e.a_hat(i) = std::pow(power_sums[i].value() / nn, 1.0 / n);
    if (e.a_hat(i) == 0.0 || e.b_hat(i) == 0.0) degenerate = true;
    a_scale *= e.a_hat(i);
    b_scale *= e.b_hat(i);
  }
  e.normalized_m2 = degenerate ? 0.0 : e.m2 / b_scale;
  if (n >= 2) {
    e.total_m2 = total_sum.value() / nn - 1.0;
    e.normalized_total_m2 = normalized_total_from_sum(norm_total_sum.value() / nn, n);
    e.multicorrelation2 = degenerate ? 0.0 : e.m2 / a_scale;
  } else {
    e.total_m2 = std::numeric_limits<double>::quiet_NaN();
    e.normalized_total_m2 = std::numeric_limits<double>::quiet_NaN();
    e.multicorrelation2 = std::numeric_limits<double>::quiet_NaN();
  }
  return e;
}

double statistic_value(const std::vector<CenteredDistanceMatrix>& mats,
                       StatisticKind kind) {
  switch (kind) {
    case StatisticKind::M:
      return sample_multivariance(mats);
    case StatisticKind::TotalM:
      return sample_total_multivariance(mats);
    case StatisticKind::NormalizedM:
      return normalized_multivariance(mats);
    case StatisticKind::NormalizedTotalM:
      return normalized_total_multivariance(mats);
  }
  return 0.0;
}

double permuted_statistic(const std::vector<CenteredDistanceMatrix>& mats,
                          const std::vector<std::vector<int>>& permutations,
                          StatisticKind kind) {
  const int N = common_sample_size(mats);
  const int n = static_cast<int>(mats.size());
  if (static_cast<int>(permutations.size()) != n - 1) {
    throw InputError("permuted_statistic: expected " + std::to_string(n - 1) +
                     " permutations for blocks 2..n");
  }
  for (const auto& p : permutations) {
    if (static_cast<int>(p.size()) != N) {
      throw InputError("permuted_statistic: permutation length mismatch");
    }
  }
  const bool total = kind == StatisticKind::TotalM || kind == StatisticKind::NormalizedTotalM;

  double scale = 1.0;
  if (kind == StatisticKind::NormalizedM) {
    for (const auto& m : mats) {
      if (m.grand_mean == 0.0) return 0.0;  // 0/0 := 0
      scale *= m.grand_mean;
    }
  }

  CompensatedSum sum;
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      double prod = 1.0;
      for (int i = 0; i < n; ++i) {
        const double a = i == 0 ? mats[i].centered(j, k)
                                : mats[i].centered(permutations[i - 1][j],
                                                   permutations[i - 1][k]);
        if (total) {
          if (kind == StatisticKind::NormalizedTotalM) {
            if (mats[i].grand_mean != 0.0) prod *= 1.0 + a / mats[i].grand_mean;
          } else {
            prod *= 1.0 + a;
          }
        } else {
          prod *= a;
        }
      }
      sum.add(prod);
    }
  }
  const double mean = sum.value() / (static_cast<double>(N) * N);
  switch (kind) {
    case StatisticKind::M:
      return mean;
    case StatisticKind::TotalM:
      return mean - 1.0;
    case StatisticKind::NormalizedM:
      return mean / scale;
    case StatisticKind::NormalizedTotalM:
      return normalized_total_from_sum(mean, n);
  }
  return 0.0;
}

}  // namespace multivariance
