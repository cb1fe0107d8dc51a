#pragma once

#include <cmath>

namespace multivariance {

// Neumaier-compensated accumulator. Keeps long sums (N^2 terms) accurate
// enough for the 1e-12-relative identities asserted on centered matrices.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace multivariance
