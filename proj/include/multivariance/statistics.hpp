#pragma once

#include <Eigen/Core>
#include <vector>

#include "multivariance/block_sample.hpp"
#include "multivariance/centering.hpp"
#include "multivariance/cndf.hpp"

namespace multivariance {

// All sample statistics of one block decomposition. The squared quantities
// are the primitives; the square-root accessors clamp tiny negative squares
// to zero and set `clamped`.
struct MultivarianceEstimates {
  double m2 = 0.0;                   // sample squared multivariance
  double total_m2 = 0.0;             // sample squared total multivariance
  double normalized_m2 = 0.0;        // m2 / prod(b_hat), 0/0 := 0
  double normalized_total_m2 = 0.0;  // see normalized_total_multivariance
  double multicorrelation2 = 0.0;    // m2 / prod(a_hat), in [0, 1]
  Eigen::VectorXd a_hat;             // ((1/N^2) sum |A_i|^n)^(1/n) per block
  Eigen::VectorXd b_hat;             // grand mean of B_i per block
  int sample_size = 0;
  int block_count = 0;
  mutable bool clamped = false;

  double m() const { return root(m2); }
  double total_m() const { return root(total_m2); }
  double normalized_m() const { return root(normalized_m2); }
  double normalized_total_m() const { return root(normalized_total_m2); }
  double multicorrelation() const { return root(multicorrelation2); }

 private:
  double root(double squared) const;
};

enum class StatisticKind { M, TotalM, NormalizedM, NormalizedTotalM };

// (1/N^2) sum_jk prod_i (A_i)_jk. Nonnegative up to rounding (Schur product
// of positive semidefinite matrices).
double sample_multivariance(const std::vector<CenteredDistanceMatrix>& mats);

// (1/N^2) sum_jk prod_i (1 + (A_i)_jk) - 1; equals the sum of
// sample_multivariance over all block subsets of size >= 2. Requires n >= 2.
double sample_total_multivariance(const std::vector<CenteredDistanceMatrix>& mats);

// sample_multivariance restricted to the blocks in `subset` (0-based,
// nonempty).
double subset_multivariance(const std::vector<CenteredDistanceMatrix>& mats,
                            const std::vector<int>& subset);

// m2 / prod(b_hat); any degenerate block (b_hat = 0) makes the result 0.
double normalized_multivariance(const std::vector<CenteredDistanceMatrix>& mats);

// (1/(2^n - 1 - n)) { (1/N^2) sum_jk prod_i (1 + (A_i)_jk / b_hat_i) - 1 }
// with the 0/0 := 0 convention per block. Requires n >= 2.
double normalized_total_multivariance(const std::vector<CenteredDistanceMatrix>& mats);

// Squared distance multicorrelation m2 / prod(a_hat); 0 when any block is
// degenerate. Requires n >= 2.
double multicorrelation(const std::vector<CenteredDistanceMatrix>& mats);

// All statistics in a single fused pass over matrix entries.
MultivarianceEstimates compute_estimates(const std::vector<CenteredDistanceMatrix>& mats);

// Streaming variant: identical arithmetic but O(N) memory, recomputing psi
// entries on the fly. Intended for sample sizes where n dense N x N matrices
// do not fit in memory.
MultivarianceEstimates compute_estimates_streaming(const BlockSample& sample,
                                                   const std::vector<CndfSpec>& specs);

// The squared statistic selected by `kind` (not scaled by N).
double statistic_value(const std::vector<CenteredDistanceMatrix>& mats,
                       StatisticKind kind);

// Statistic recomputed from the same matrices with rows/columns of blocks
// 2..n permuted; permutations[i-1] applies to block i (block 0 stays fixed).
double permuted_statistic(const std::vector<CenteredDistanceMatrix>& mats,
                          const std::vector<std::vector<int>>& permutations,
                          StatisticKind kind);

}  // namespace multivariance
