#include "multivariance/centering.hpp"

#include <fstream>
#include <string>

#include "multivariance/compensated.hpp"
#include "multivariance/errors.hpp"

namespace multivariance {

Eigen::MatrixXd distance_matrix(const BlockSample& sample, int block_index,
                                const CndfSpec& spec, int max_sample_size) {
  const int N = sample.sample_size();
  if (N > max_sample_size) {
    throw InputError("distance_matrix: sample size " + std::to_string(N) +
                     " exceeds the dense-matrix limit " +
                     std::to_string(max_sample_size));
  }
  if (spec.dimension() != sample.block_dimension(block_index)) {
    throw InputError("distance_matrix: cndf dimension " +
                     std::to_string(spec.dimension()) + " does not match block " +
                     std::to_string(block_index) + " of dimension " +
                     std::to_string(sample.block_dimension(block_index)));
  }
  Eigen::Ref<const Eigen::MatrixXd> x = sample.block(block_index);
  Eigen::MatrixXd B(N, N);
  for (int j = 0; j < N; ++j) {
    B(j, j) = 0.0;
    for (int k = j + 1; k < N; ++k) {
      const double v = evaluate_difference(spec, x.row(j), x.row(k));
      B(j, k) = v;
      B(k, j) = v;
    }
  }
  return B;
}

CenteredDistanceMatrix double_center(Eigen::MatrixXd B) {
  const Eigen::Index N = B.rows();
  if (N != B.cols()) {
    throw InputError("double_center: matrix is " + std::to_string(B.rows()) +
                     "x" + std::to_string(B.cols()) + ", expected square");
  }
  CenteredDistanceMatrix out;
  out.row_mean.resize(N);
  CompensatedSum grand;
  for (Eigen::Index j = 0; j < N; ++j) {
    CompensatedSum row;
    for (Eigen::Index k = 0; k < N; ++k) row.add(B(j, k));
    const double total = row.value();
    out.row_mean(j) = total / static_cast<double>(N);
    grand.add(total);
  }
  out.grand_mean = grand.value() / (static_cast<double>(N) * static_cast<double>(N));

  out.centered.resize(N, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index k = j; k < N; ++k) {
      const double a = -(B(j, k) - out.row_mean(j) - out.row_mean(k) + out.grand_mean);
      out.centered(j, k) = a;
      out.centered(k, j) = a;
    }
  }
  out.distances = std::move(B);
  return out;
}

std::vector<CenteredDistanceMatrix> centered_matrices(
    const BlockSample& sample, const std::vector<CndfSpec>& specs,
    int max_sample_size) {
  if (static_cast<int>(specs.size()) != sample.block_count()) {
    throw InputError("centered_matrices: " + std::to_string(specs.size()) +
                     " cndf specs for " + std::to_string(sample.block_count()) +
                     " blocks");
  }
  if (sample.sample_size() < 2) {
    throw InputError("centered_matrices: estimation needs N >= 2");
  }
  std::vector<CenteredDistanceMatrix> mats;
  mats.reserve(specs.size());
  for (int i = 0; i < sample.block_count(); ++i) {
    mats.push_back(double_center(distance_matrix(sample, i, specs[i], max_sample_size)));
  }
  return mats;
}

void dump_matrix_csv(const Eigen::Ref<const Eigen::MatrixXd>& m,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("dump_matrix_csv: cannot open '" + path + "'");
  out << m.rows() << "\n";
  out.precision(17);
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      if (k) out << ',';
      out << m(j, k);
    }
    out << "\n";
  }
}

}  // namespace multivariance
