#pragma once

#include <Eigen/Core>
#include <string>
#include <string_view>

namespace multivariance {

enum class CndfKind { Stable, Minkowski, BoundedExp };

// A real-valued continuous negative definite function psi used as the
// (quasi-)distance between observations of one block. Three families:
//
//   Stable(alpha):     psi(x) = |x|^alpha           (Euclidean norm, alpha in (0,2))
//   Minkowski(p):      psi(x) = (sum |x_j|^p)^{1/p} (p in (1,2])
//   BoundedExp(gamma): psi(x) = (1 - exp(-gamma |x|)) / gamma  (gamma > 0)
//
// Only psi itself is materialized; the underlying spectral measures are
// never constructed (the estimators do not need them; see stable_constant
// for the one exposed constant).
//
// Parameters are validated once at construction; evaluation is unchecked
// except for the dimension of the argument.
class CndfSpec {
 public:
  static CndfSpec stable(double alpha, int dimension);
  static CndfSpec euclidean(int dimension) { return stable(1.0, dimension); }
  static CndfSpec minkowski(double p, int dimension);
  static CndfSpec bounded_exp(double gamma, int dimension);

  CndfKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double p() const { return p_; }
  double gamma() const { return gamma_; }
  int dimension() const { return dimension_; }

  // Textual form, e.g. "stable:alpha=1.5". Parsable by parse_cndf.
  std::string to_string() const;

 private:
  CndfSpec(CndfKind kind, double alpha, double p, double gamma, int dimension)
      : kind_(kind), alpha_(alpha), p_(p), gamma_(gamma), dimension_(dimension) {}

  CndfKind kind_;
  double alpha_ = 0;
  double p_ = 0;
  double gamma_ = 0;
  int dimension_ = 0;
};

// psi(x); requires x.size() == spec.dimension().
double evaluate(const CndfSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x);

// psi evaluated at the difference of two points of the spec's dimension.
// Hot path of the distance-matrix kernels; no allocation.
double evaluate_difference(const CndfSpec& spec,
                           const Eigen::Ref<const Eigen::RowVectorXd>& x,
                           const Eigen::Ref<const Eigen::RowVectorXd>& y);

// Density constant of the alpha-stable Levy measure,
//   c_{alpha,d} = alpha 2^{alpha-1} Gamma((alpha+d)/2) / (pi^{d/2} Gamma(1-alpha/2)).
// Exposed for documentation/diagnostics; the estimators never need it.
double stable_constant(double alpha, int d);

// gamma = -ln(0.01)/delta, the heuristic for BoundedExp when local
// dependence lives at scale delta: psi(delta) >= 0.99 * sup psi.
double suggest_gamma(double delta);

// Parses "stable:alpha=<a>", "minkowski:p=<p>", "boundedexp:gamma=<g>" or the
// alias "euclid" (= stable:alpha=1), binding the given dimension.
CndfSpec parse_cndf(std::string_view text, int dimension);

}  // namespace multivariance
