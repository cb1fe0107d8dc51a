#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "multivariance/block_sample.hpp"

namespace multivariance {

// Finite-support joint law of n blocks: m support points (rows of an m x d
// matrix, blocks in contiguous column ranges) with probabilities summing to
// one. Duplicate support points are merged at construction.
class FiniteDistribution {
 public:
  FiniteDistribution(Eigen::MatrixXd support, std::vector<int> block_widths,
                     Eigen::VectorXd probabilities);

  // Empirical law of a sample (uniform weights, duplicate rows merged).
  static FiniteDistribution empirical(const BlockSample& sample);

  // CSV with one row per support point, probability in the last column;
  // block_spec covers the non-probability columns (e.g. "0-1;2").
  static FiniteDistribution from_csv(const std::string& path,
                                     const std::string& block_spec);

  // JSON of the form
  //   {"block_widths": [...], "points": [[...], ...], "probabilities": [...]}
  static FiniteDistribution from_json_text(const std::string& text);

  int support_size() const { return static_cast<int>(support_.rows()); }
  int block_count() const { return static_cast<int>(widths_.size()); }
  int block_dimension(int block) const { return widths_.at(block); }
  const std::vector<int>& block_widths() const { return widths_; }
  const Eigen::MatrixXd& support() const { return support_; }
  const Eigen::VectorXd& probabilities() const { return probs_; }

  // m x d_i view of the block's coordinates at every support point.
  Eigen::Ref<const Eigen::MatrixXd> block(int block) const;

  // Law of a subset of blocks (0-based indices, order preserved as given);
  // projected duplicates are merged.
  FiniteDistribution marginal(const std::vector<int>& blocks) const;

  // Product law with an independent second distribution: blocks of `other`
  // are appended, support is the cross product.
  FiniteDistribution product_with(const FiniteDistribution& other) const;

 private:
  Eigen::MatrixXd support_;
  std::vector<int> widths_;
  std::vector<int> offsets_;
  Eigen::VectorXd probs_;
};

}  // namespace multivariance
