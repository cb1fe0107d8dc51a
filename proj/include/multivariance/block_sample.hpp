#pragma once

#include <Eigen/Core>
#include <vector>

namespace multivariance {

// N observations of n blocks held as one N x d row-major sample matrix,
// block i occupying a contiguous range of block_widths[i] columns.
// Every entry must be finite; checked once at construction.
class BlockSample {
 public:
  BlockSample(Eigen::MatrixXd data, std::vector<int> block_widths);

  int sample_size() const { return static_cast<int>(data_.rows()); }
  int block_count() const { return static_cast<int>(widths_.size()); }
  int block_dimension(int block) const;
  const std::vector<int>& block_widths() const { return widths_; }

  // N x d_i view of one block.
  Eigen::Ref<const Eigen::MatrixXd> block(int block) const;
  // One observation of one block as a row vector.
  Eigen::Ref<const Eigen::RowVectorXd> observation(int block, int row) const;

  const Eigen::MatrixXd& data() const { return data_; }

 private:
  void check_block(int block) const;

  Eigen::MatrixXd data_;
  std::vector<int> widths_;
  std::vector<int> offsets_;
};

}  // namespace multivariance
