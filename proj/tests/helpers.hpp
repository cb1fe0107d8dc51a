#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "multivariance/block_sample.hpp"
#include "multivariance/centering.hpp"
#include "multivariance/cndf.hpp"
#include "multivariance/rng.hpp"

namespace testutil {

// |a - b| <= tol * max(|a|, |b|, floor). The floor guards near-cancelled
// values whose natural scale is the product of matrix magnitudes.
inline bool close_rel(double a, double b, double tol, double floor = 1e-30) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), floor});
}

// Natural magnitude of one term of the product-mean sums; the meaningful
// comparison floor when the statistic itself cancels to ~0 (e.g. n = 1).
inline double centered_scale(const std::vector<multivariance::CenteredDistanceMatrix>& mats) {
  double scale = 1.0;
  for (const auto& m : mats) {
    scale *= std::max(1e-30, m.centered.cwiseAbs().maxCoeff());
  }
  return scale;
}

struct RandomInstance {
  multivariance::BlockSample sample;
  std::vector<multivariance::CndfSpec> specs;
};

// Random block sample covering all three cndf families; mirrors the
// oracle-agreement regime (N <= 10, n <= 4, d_i <= 3). Occasionally
// duplicates a row so merged empirical supports are exercised.
inline RandomInstance random_instance(multivariance::CounterRng& rng,
                                      int min_blocks = 1, int max_blocks = 4,
                                      int min_n = 3, int max_n = 10) {
  using multivariance::CndfSpec;
  const int n_blocks =
      min_blocks + static_cast<int>(rng.next_below(max_blocks - min_blocks + 1));
  const int N = min_n + static_cast<int>(rng.next_below(max_n - min_n + 1));
  std::vector<int> widths(n_blocks);
  int d = 0;
  for (int i = 0; i < n_blocks; ++i) {
    widths[i] = 1 + static_cast<int>(rng.next_below(3));
    d += widths[i];
  }
  Eigen::MatrixXd data(N, d);
  for (int r = 0; r < N; ++r) {
    for (int c = 0; c < d; ++c) data(r, c) = rng.next_normal();
  }
  if (N >= 4 && rng.next_below(3) == 0) {
    data.row(N - 1) = data.row(0);  // duplicate observation
  }
  std::vector<CndfSpec> specs;
  for (int i = 0; i < n_blocks; ++i) {
    switch (rng.next_below(3)) {
      case 0:
        specs.push_back(CndfSpec::stable(0.3 + 1.5 * rng.next_double(), widths[i]));
        break;
      case 1:
        specs.push_back(CndfSpec::minkowski(1.05 + 0.95 * rng.next_double(), widths[i]));
        break;
      default:
        specs.push_back(CndfSpec::bounded_exp(0.2 + 2.0 * rng.next_double(), widths[i]));
        break;
    }
  }
  return RandomInstance{multivariance::BlockSample(std::move(data), widths),
                        std::move(specs)};
}

// Textbook squared sample distance covariance (Szekely-Rizzo product-moment
// form, no double centering): S1 + S2 - 2 S3.
inline double dcov2_textbook(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             const std::function<double(double, double)>& dx,
                             const std::function<double(double, double)>& dy) {
  const int N = static_cast<int>(x.size());
  Eigen::MatrixXd a(N, N), b(N, N);
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      a(j, k) = dx(x(j), x(k));
      b(j, k) = dy(y(j), y(k));
    }
  }
  const double s1 = (a.array() * b.array()).sum() / (static_cast<double>(N) * N);
  const double s2 = a.sum() / (static_cast<double>(N) * N) * b.sum() /
                    (static_cast<double>(N) * N);
  double s3 = 0.0;
  for (int j = 0; j < N; ++j) s3 += a.row(j).sum() * b.row(j).sum();
  s3 /= static_cast<double>(N) * N * N;
  return s1 + s2 - 2.0 * s3;
}

inline double dcor2_textbook(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  auto abs_diff = [](double u, double v) { return std::abs(u - v); };
  const double vxy = dcov2_textbook(x, y, abs_diff, abs_diff);
  const double vxx = dcov2_textbook(x, x, abs_diff, abs_diff);
  const double vyy = dcov2_textbook(y, y, abs_diff, abs_diff);
  if (vxx <= 0.0 || vyy <= 0.0) return 0.0;
  return vxy / std::sqrt(vxx * vyy);
}

// Composite Simpson rule on [a, b] with an even number of intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int intervals) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) {
    sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

// Kolmogorov-Smirnov distance of a sample against U(0,1).
inline double ks_distance_uniform(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double hi = (i + 1.0) / n - values[i];
    const double lo = values[i] - i / n;
    d = std::max({d, hi, lo});
  }
  return d;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace testutil
