#include "multivariance/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <string>

#include "multivariance/compensated.hpp"
#include "multivariance/errors.hpp"
#include "multivariance/parallel.hpp"
#include "multivariance/rng.hpp"
#include "multivariance/statistics.hpp"

namespace multivariance {

namespace {

constexpr int kSubsetEnumerationLimit = 12;

void check_specs(const std::vector<int>& widths, const std::vector<CndfSpec>& specs,
                 const char* where) {
  if (specs.size() != widths.size()) {
    throw InputError(std::string(where) + ": " + std::to_string(specs.size()) +
                     " cndf specs for " + std::to_string(widths.size()) + " blocks");
  }
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (specs[i].dimension() != widths[i]) {
      throw InputError(std::string(where) + ": cndf dimension mismatch at block " +
                       std::to_string(i));
    }
  }
}

// Doubly centered psi matrix of one block over the support:
// C(j,k) = -(Psi(j,k) - cond(j) - cond(k) + b) with cond = Psi p, b = p' Psi p.
Eigen::MatrixXd centered_population_psi(const FiniteDistribution& dist, int block,
                                        const CndfSpec& spec, double* b_out) {
  const Eigen::Index m = dist.support_size();
  Eigen::Ref<const Eigen::MatrixXd> x = dist.block(block);
  Eigen::MatrixXd psi(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    psi(j, j) = 0.0;
    for (Eigen::Index k = j + 1; k < m; ++k) {
      const double v = evaluate_difference(spec, x.row(j), x.row(k));
      psi(j, k) = v;
      psi(k, j) = v;
    }
  }
  const Eigen::VectorXd& p = dist.probabilities();
  const Eigen::VectorXd cond = psi * p;
  const double b = p.dot(cond);
  if (b_out) *b_out = b;
  Eigen::MatrixXd centered(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      centered(j, k) = -(psi(j, k) - cond(j) - cond(k) + b);
    }
  }
  return centered;
}

}  // namespace

double population_multivariance_exact(const FiniteDistribution& dist,
                                      const std::vector<CndfSpec>& specs) {
  check_specs(dist.block_widths(), specs, "population_multivariance_exact");
  const Eigen::Index m = dist.support_size();
  const int n = dist.block_count();
  std::vector<Eigen::MatrixXd> centered;
  centered.reserve(n);
  for (int i = 0; i < n; ++i) {
    centered.push_back(centered_population_psi(dist, i, specs[i], nullptr));
  }
  const Eigen::VectorXd& p = dist.probabilities();
  CompensatedSum sum;
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      double prod = p(j) * p(k);
      for (const auto& c : centered) prod *= c(j, k);
      sum.add(prod);
    }
  }
  return sum.value();
}

double population_total_exact(const FiniteDistribution& dist,
                              const std::vector<CndfSpec>& specs) {
  check_specs(dist.block_widths(), specs, "population_total_exact");
  const int n = dist.block_count();
  if (n < 2) throw InputError("population_total_exact: needs n >= 2 blocks");
  if (n > kSubsetEnumerationLimit) {
    throw InputError("population_total_exact: subset enumeration capped at n <= " +
                     std::to_string(kSubsetEnumerationLimit));
  }
  CompensatedSum total;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) < 2) continue;
    std::vector<int> blocks;
    std::vector<CndfSpec> sub_specs;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        blocks.push_back(i);
        sub_specs.push_back(specs[i]);
      }
    }
    total.add(population_multivariance_exact(dist.marginal(blocks), sub_specs));
  }
  return total.value();
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> population_scale_factors(
    const FiniteDistribution& dist, const std::vector<CndfSpec>& specs) {
  check_specs(dist.block_widths(), specs, "population_scale_factors");
  const Eigen::Index m = dist.support_size();
  const int n = dist.block_count();
  const Eigen::VectorXd& p = dist.probabilities();
  Eigen::VectorXd a(n), b(n);
  for (int i = 0; i < n; ++i) {
    double bi = 0.0;
    const Eigen::MatrixXd centered = centered_population_psi(dist, i, specs[i], &bi);
    b(i) = bi;
    CompensatedSum powers;
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index k = 0; k < m; ++k) {
        double term = p(j) * p(k);
        const double v = std::abs(centered(j, k));
        for (int q = 0; q < n; ++q) term *= v;
        powers.add(term);
      }
    }
    a(i) = std::pow(powers.value(), 1.0 / n);
  }
  return {std::move(a), std::move(b)};
}

double sample_multivariance_bruteforce(const BlockSample& sample,
                                       const std::vector<CndfSpec>& specs) {
  check_specs(sample.block_widths(), specs, "sample_multivariance_bruteforce");
  const int N = sample.sample_size();
  const int n = sample.block_count();

  // Conditional means and grand means by direct summation.
  std::vector<Eigen::VectorXd> cond(n);
  std::vector<double> grand(n);
  for (int i = 0; i < n; ++i) {
    cond[i] = Eigen::VectorXd::Zero(N);
    for (int j = 0; j < N; ++j) {
      CompensatedSum row;
      for (int l = 0; l < N; ++l) {
        row.add(evaluate_difference(specs[i], sample.observation(i, j),
                                    sample.observation(i, l)));
      }
      cond[i](j) = row.value() / N;
    }
    CompensatedSum g;
    for (int j = 0; j < N; ++j) g.add(cond[i](j));
    grand[i] = g.value() / N;
  }

  CompensatedSum sum;
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      double prod = 1.0;
      for (int i = 0; i < n; ++i) {
        const double psi = evaluate_difference(specs[i], sample.observation(i, j),
                                               sample.observation(i, k));
        prod *= -psi + cond[i](j) + cond[i](k) - grand[i];
      }
      sum.add(prod);
    }
  }
  return sum.value() / (static_cast<double>(N) * N);
}

double total_via_subset_enumeration(const std::vector<CenteredDistanceMatrix>& mats) {
  const int n = static_cast<int>(mats.size());
  if (n < 2) throw InputError("total_via_subset_enumeration: needs n >= 2 blocks");
  if (n > kSubsetEnumerationLimit) {
    throw InputError("total_via_subset_enumeration: capped at n <= " +
                     std::to_string(kSubsetEnumerationLimit));
  }
  CompensatedSum total;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) < 2) continue;
    std::vector<int> subset;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) subset.push_back(i);
    }
    total.add(subset_multivariance(mats, subset));
  }
  return total.value();
}

GaussianMcResult gaussian_multivariance_mc(const FiniteDistribution& dist,
                                           const std::vector<CndfSpec>& specs,
                                           int field_samples, std::uint64_t seed) {
  check_specs(dist.block_widths(), specs, "gaussian_multivariance_mc");
  if (field_samples < 2) {
    throw InputError("gaussian_multivariance_mc: need at least 2 field samples");
  }
  const Eigen::Index m = dist.support_size();
  const int n = dist.block_count();
  const Eigen::VectorXd& p = dist.probabilities();

  GaussianMcResult result;

  // Per block: distinct values, marginal weights, and a square root of the
  // field covariance k(u,v) = psi(u) + psi(v) - psi(u-v) at those values.
  struct BlockField {
    std::vector<int> point_index;  // support row -> distinct-value index
    Eigen::VectorXd weight;        // marginal probability of each value
    Eigen::MatrixXd sqrt_cov;
  };
  std::vector<BlockField> fields(n);
  for (int i = 0; i < n; ++i) {
    Eigen::Ref<const Eigen::MatrixXd> x = dist.block(i);
    std::vector<Eigen::Index> distinct;
    auto& field = fields[i];
    field.point_index.resize(m);
    std::vector<double> weights;
    for (Eigen::Index j = 0; j < m; ++j) {
      int found = -1;
      for (std::size_t k = 0; k < distinct.size(); ++k) {
        if (x.row(j) == x.row(distinct[k])) {
          found = static_cast<int>(k);
          break;
        }
      }
      if (found < 0) {
        found = static_cast<int>(distinct.size());
        distinct.push_back(j);
        weights.push_back(0.0);
      }
      field.point_index[j] = found;
      weights[found] += p(j);
    }
    const int mi = static_cast<int>(distinct.size());
    field.weight = Eigen::Map<Eigen::VectorXd>(weights.data(), mi);

    Eigen::MatrixXd cov(mi, mi);
    Eigen::VectorXd psi_at(mi);
    for (int j = 0; j < mi; ++j) {
      psi_at(j) = evaluate(specs[i], x.row(distinct[j]).transpose());
    }
    for (int j = 0; j < mi; ++j) {
      for (int k = j; k < mi; ++k) {
        const double v = psi_at(j) + psi_at(k) -
                         evaluate_difference(specs[i], x.row(distinct[j]),
                                             x.row(distinct[k]));
        cov(j, k) = v;
        cov(k, j) = v;
      }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    const double top = std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
    if (solver.eigenvalues().minCoeff() < -1e-10 * top) {
      cov.diagonal().array() += 1e-10;
      solver.compute(cov);
      result.regularized = true;
      if (solver.eigenvalues().minCoeff() < -1e-6 * top) {
        throw NumericalError(
            "gaussian_multivariance_mc: covariance of block " + std::to_string(i) +
            " stays indefinite after regularization");
      }
    }
    field.sqrt_cov = solver.eigenvectors() *
                     solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  std::vector<double> values(field_samples);
  const CounterRng root(seed);
  parallel_for(field_samples, [&](int r) {
    CounterRng rng = root.substream(static_cast<std::uint64_t>(r));
    // One draw of every field; the expectation over (X, X') given the fields
    // factorizes into the square of a single support sum.
    std::vector<Eigen::VectorXd> centered_field(n);
    for (int i = 0; i < n; ++i) {
      const auto& field = fields[i];
      const int mi = static_cast<int>(field.weight.size());
      Eigen::VectorXd z(mi);
      for (int j = 0; j < mi; ++j) z(j) = rng.next_normal();
      Eigen::VectorXd g = field.sqrt_cov * z;
      centered_field[i] = g.array() - field.weight.dot(g);
    }
    CompensatedSum inner;
    for (Eigen::Index s = 0; s < m; ++s) {
      double prod = p(s);
      for (int i = 0; i < n; ++i) prod *= centered_field[i](fields[i].point_index[s]);
      inner.add(prod);
    }
    const double v = inner.value();
    values[r] = v * v;
  });

  CompensatedSum mean_sum;
  for (double v : values) mean_sum.add(v);
  const double mean = mean_sum.value() / field_samples;
  CompensatedSum var_sum;
  for (double v : values) var_sum.add((v - mean) * (v - mean));
  const double variance = var_sum.value() / (field_samples - 1.0);
  result.estimate = mean;
  result.std_error = std::sqrt(variance / field_samples);
  return result;
}

}  // namespace multivariance
