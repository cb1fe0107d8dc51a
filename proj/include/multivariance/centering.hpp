#pragma once

#include <Eigen/Core>
#include <vector>

#include "multivariance/block_sample.hpp"
#include "multivariance/cndf.hpp"

namespace multivariance {

// Samples larger than this are rejected by the matrix builders to avoid
// silently exhausting memory with N x N dense matrices.
inline constexpr int kDefaultMaxMatrixSampleSize = 50000;

// Distance matrix B of one block together with its double centering
// A = -C B C, C = I - (1/N) * ones. grand_mean equals the sample scale
// factor b-hat of the block.
struct CenteredDistanceMatrix {
  Eigen::MatrixXd distances;  // B: symmetric, zero diagonal, nonnegative
  Eigen::MatrixXd centered;   // A: symmetric, zero row/column sums
  Eigen::VectorXd row_mean;   // row means of B (equal to column means)
  double grand_mean = 0.0;    // (1/N^2) sum of B = b-hat
};

// B_i = (psi_i(x_i^(j) - x_i^(k)))_{jk} for one block.
Eigen::MatrixXd distance_matrix(const BlockSample& sample, int block_index,
                                const CndfSpec& spec,
                                int max_sample_size = kDefaultMaxMatrixSampleSize);

// A_{jk} = -(B_{jk} - rowmean_j - colmean_k + grandmean). Means use
// compensated summation so the zero row-sum identity holds to ~1e-12
// relative even for large N. B must be square (symmetry is assumed).
CenteredDistanceMatrix double_center(Eigen::MatrixXd B);

// Builds the centered matrix of every block. specs.size() must equal the
// block count; requires N >= 2.
std::vector<CenteredDistanceMatrix> centered_matrices(
    const BlockSample& sample, const std::vector<CndfSpec>& specs,
    int max_sample_size = kDefaultMaxMatrixSampleSize);

// Row-major CSV dump of an N x N matrix with a one-line "N" header; debugging
// aid for the matrix contracts.
void dump_matrix_csv(const Eigen::Ref<const Eigen::MatrixXd>& m,
                     const std::string& path);

}  // namespace multivariance
