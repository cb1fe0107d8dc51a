#include "multivariance/block_sample.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "multivariance/errors.hpp"

namespace multivariance {

BlockSample::BlockSample(Eigen::MatrixXd data, std::vector<int> block_widths)
    : data_(std::move(data)), widths_(std::move(block_widths)) {
  if (data_.rows() < 1) throw InputError("BlockSample: need at least one observation");
  if (widths_.empty()) throw InputError("BlockSample: need at least one block");
  int total = 0;
  offsets_.reserve(widths_.size());
  for (int w : widths_) {
    if (w < 1) throw InputError("BlockSample: block widths must be >= 1");
    offsets_.push_back(total);
    total += w;
  }
  if (total != data_.cols()) {
    throw InputError("BlockSample: block widths sum to " + std::to_string(total) +
                     " but the data has " + std::to_string(data_.cols()) +
                     " columns");
  }
  for (Eigen::Index j = 0; j < data_.cols(); ++j) {
    for (Eigen::Index i = 0; i < data_.rows(); ++i) {
      if (!std::isfinite(data_(i, j))) {
        throw InputError("BlockSample: non-finite value at row " +
                         std::to_string(i) + ", column " + std::to_string(j));
      }
    }
  }
}

int BlockSample::block_dimension(int block) const {
  check_block(block);
  return widths_[block];
}

Eigen::Ref<const Eigen::MatrixXd> BlockSample::block(int block) const {
  check_block(block);
  return data_.middleCols(offsets_[block], widths_[block]);
}

Eigen::Ref<const Eigen::RowVectorXd> BlockSample::observation(int block,
                                                              int row) const {
  check_block(block);
  return data_.row(row).segment(offsets_[block], widths_[block]);
}

void BlockSample::check_block(int block) const {
  if (block < 0 || block >= block_count()) {
    throw InputError("BlockSample: block index " + std::to_string(block) +
                     " out of range [0, " + std::to_string(block_count()) + ")");
  }
}

}  // namespace multivariance
