#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "multivariance/block_sample.hpp"
#include "multivariance/centering.hpp"
#include "multivariance/cndf.hpp"
#include "multivariance/finite_distribution.hpp"

namespace multivariance {

// Reference computations, independent of the matrix estimator path. These
// exist to cross-check the fast kernels and to evaluate population
// quantities of finite-support laws exactly.

// Exact squared population multivariance: the expectation of the product of
// doubly centered psi terms, evaluated by full support enumeration with
// conditional expectations as exact marginal sums.
double population_multivariance_exact(const FiniteDistribution& dist,
                                      const std::vector<CndfSpec>& specs);

// Exact squared population total multivariance: sum of
// population_multivariance_exact over every block subset of size >= 2,
// evaluated on the marginalized laws. Requires n >= 2.
double population_total_exact(const FiniteDistribution& dist,
                              const std::vector<CndfSpec>& specs);

// Population scale factors (a_i, b_i): b_i = E psi_i(X_i - X_i') and a_i the
// L^n norm of the doubly centered psi term, both as exact sums.
std::pair<Eigen::VectorXd, Eigen::VectorXd> population_scale_factors(
    const FiniteDistribution& dist, const std::vector<CndfSpec>& specs);

// Sample squared multivariance evaluated directly from the defining sums
// (conditional means by explicit summation, no centered matrices).
double sample_multivariance_bruteforce(const BlockSample& sample,
                                       const std::vector<CndfSpec>& specs);

// Sum of subset multivariances over all 2^n - 1 - n subsets of size >= 2;
// the enumeration is capped at n <= 12.
double total_via_subset_enumeration(const std::vector<CenteredDistanceMatrix>& mats);

struct GaussianMcResult {
  double estimate = 0.0;
  double std_error = 0.0;
  bool regularized = false;  // covariance needed the +1e-10 diagonal bump
};

// Monte-Carlo Gaussian multivariance: per block, a centered Gaussian field
// with covariance psi(xi) + psi(eta) - psi(xi - eta) is sampled at the
// distinct block values of the support (square root via symmetric
// eigendecomposition); the inner expectation over (X, X') is computed
// exactly by support enumeration for each field draw.
GaussianMcResult gaussian_multivariance_mc(const FiniteDistribution& dist,
                                           const std::vector<CndfSpec>& specs,
                                           int field_samples,
                                           std::uint64_t seed);

}  // namespace multivariance
