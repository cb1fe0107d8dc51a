#include "multivariance/finite_distribution.hpp"

#include <cmath>
#include <string>
#include <utility>

#include <json.hpp>

#include "multivariance/csv.hpp"
#include "multivariance/errors.hpp"

namespace multivariance {

namespace {

// Merges exactly equal rows, accumulating their probabilities; preserves
// first-occurrence order.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> merge_duplicates(
    const Eigen::MatrixXd& support, const Eigen::VectorXd& probs) {
  const Eigen::Index m = support.rows();
  std::vector<Eigen::Index> keep;
  std::vector<double> mass;
  keep.reserve(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    bool merged = false;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      if (support.row(i) == support.row(keep[k])) {
        mass[k] += probs(i);
        merged = true;
        break;
      }
    }
    if (!merged) {
      keep.push_back(i);
      mass.push_back(probs(i));
    }
  }
  Eigen::MatrixXd out_support(keep.size(), support.cols());
  Eigen::VectorXd out_probs(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out_support.row(k) = support.row(keep[k]);
    out_probs(k) = mass[k];
  }
  return {std::move(out_support), std::move(out_probs)};
}

}  // namespace

FiniteDistribution::FiniteDistribution(Eigen::MatrixXd support,
                                       std::vector<int> block_widths,
                                       Eigen::VectorXd probabilities)
    : widths_(std::move(block_widths)) {
  if (support.rows() < 1) {
    throw InputError("FiniteDistribution: empty support");
  }
  if (probabilities.size() != support.rows()) {
    throw InputError("FiniteDistribution: " + std::to_string(probabilities.size()) +
                     " probabilities for " + std::to_string(support.rows()) +
                     " support points");
  }
  int total = 0;
  for (int w : widths_) {
    if (w < 1) throw InputError("FiniteDistribution: block widths must be >= 1");
    offsets_.push_back(total);
    total += w;
  }
  if (widths_.empty() || total != support.cols()) {
    throw InputError("FiniteDistribution: block widths do not tile the support columns");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities(i);
    if (!std::isfinite(p) || p < 0.0) {
      throw InputError("FiniteDistribution: probabilities must be finite and >= 0");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InputError("FiniteDistribution: probabilities sum to " + std::to_string(sum) +
                     ", expected 1 within 1e-12");
  }
  auto [merged_support, merged_probs] = merge_duplicates(support, probabilities);
  support_ = std::move(merged_support);
  probs_ = std::move(merged_probs);
  probs_ /= sum;  // exact normalization
}

FiniteDistribution FiniteDistribution::empirical(const BlockSample& sample) {
  const int N = sample.sample_size();
  return FiniteDistribution(sample.data(), sample.block_widths(),
                            Eigen::VectorXd::Constant(N, 1.0 / N));
}

FiniteDistribution FiniteDistribution::from_csv(const std::string& path,
                                                const std::string& block_spec) {
  const CsvTable table = read_numeric_csv(path);
  const Eigen::Index cols = table.values.cols();
  if (cols < 2) {
    throw InputError("FiniteDistribution: need at least one point column plus "
                     "the probability column");
  }
  const auto ranges = parse_block_spec(block_spec, static_cast<int>(cols) - 1);
  Eigen::VectorXd probs = table.values.col(cols - 1);
  int width = 0;
  for (const auto& [lo, hi] : ranges) width += hi - lo + 1;
  Eigen::MatrixXd support(table.values.rows(), width);
  std::vector<int> widths;
  int at = 0;
  for (const auto& [lo, hi] : ranges) {
    const int w = hi - lo + 1;
    support.middleCols(at, w) = table.values.middleCols(lo, w);
    widths.push_back(w);
    at += w;
  }
  return FiniteDistribution(std::move(support), std::move(widths), std::move(probs));
}

FiniteDistribution FiniteDistribution::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("FiniteDistribution: bad JSON: ") + e.what());
  }
  try {
    const auto widths = j.at("block_widths").get<std::vector<int>>();
    const auto points = j.at("points").get<std::vector<std::vector<double>>>();
    const auto probs = j.at("probabilities").get<std::vector<double>>();
    if (points.empty()) throw InputError("FiniteDistribution: no points");
    Eigen::MatrixXd support(points.size(), points.front().size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].size() != points.front().size()) {
        throw InputError("FiniteDistribution: ragged points array");
      }
      for (std::size_t c = 0; c < points[i].size(); ++c) support(i, c) = points[i][c];
    }
    Eigen::VectorXd p(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) p(i) = probs[i];
    return FiniteDistribution(std::move(support), widths, std::move(p));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("FiniteDistribution: bad JSON shape: ") + e.what());
  }
}

Eigen::Ref<const Eigen::MatrixXd> FiniteDistribution::block(int block) const {
  if (block < 0 || block >= block_count()) {
    throw InputError("FiniteDistribution: block index out of range");
  }
  return support_.middleCols(offsets_[block], widths_[block]);
}

FiniteDistribution FiniteDistribution::marginal(const std::vector<int>& blocks) const {
  if (blocks.empty()) throw InputError("FiniteDistribution: empty marginal");
  int width = 0;
  for (int b : blocks) {
    if (b < 0 || b >= block_count()) {
      throw InputError("FiniteDistribution: marginal block index out of range");
    }
    width += widths_[b];
  }
  Eigen::MatrixXd support(support_.rows(), width);
  std::vector<int> widths;
  int at = 0;
  for (int b : blocks) {
    support.middleCols(at, widths_[b]) = support_.middleCols(offsets_[b], widths_[b]);
    widths.push_back(widths_[b]);
    at += widths_[b];
  }
  return FiniteDistribution(std::move(support), std::move(widths), probs_);
}

FiniteDistribution FiniteDistribution::product_with(const FiniteDistribution& other) const {
  const Eigen::Index m1 = support_.rows();
  const Eigen::Index m2 = other.support_.rows();
  Eigen::MatrixXd support(m1 * m2, support_.cols() + other.support_.cols());
  Eigen::VectorXd probs(m1 * m2);
  for (Eigen::Index i = 0; i < m1; ++i) {
    for (Eigen::Index k = 0; k < m2; ++k) {
      support.row(i * m2 + k) << support_.row(i), other.support_.row(k);
      probs(i * m2 + k) = probs_(i) * other.probs_(k);
    }
  }
  std::vector<int> widths = widths_;
  widths.insert(widths.end(), other.widths_.begin(), other.widths_.end());
  return FiniteDistribution(std::move(support), std::move(widths), std::move(probs));
}

}  // namespace multivariance
