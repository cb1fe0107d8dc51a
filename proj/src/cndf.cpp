#include "multivariance/cndf.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "multivariance/errors.hpp"

namespace multivariance {

namespace {

void require_dimension(int dimension) {
  if (dimension < 1) {
    throw InputError("cndf: dimension must be >= 1, got " +
                     std::to_string(dimension));
  }
}

double stable_value(double alpha, double norm) {
  if (alpha == 1.0) return norm;
  return std::pow(norm, alpha);
}

double bounded_exp_value(double gamma, double norm) {
  return -std::expm1(-gamma * norm) / gamma;
}

}  // namespace

CndfSpec CndfSpec::stable(double alpha, int dimension) {
  require_dimension(dimension);
  if (!(alpha > 0.0) || !(alpha < 2.0)) {
    throw InputError("cndf: stable exponent alpha must lie in (0,2), got " +
                     std::to_string(alpha));
  }
  return CndfSpec(CndfKind::Stable, alpha, 0.0, 0.0, dimension);
}

CndfSpec CndfSpec::minkowski(double p, int dimension) {
  require_dimension(dimension);
  if (!(p > 1.0) || !(p <= 2.0)) {
    throw InputError("cndf: Minkowski exponent p must lie in (1,2], got " +
                     std::to_string(p));
  }
  return CndfSpec(CndfKind::Minkowski, 0.0, p, 0.0, dimension);
}

CndfSpec CndfSpec::bounded_exp(double gamma, int dimension) {
  require_dimension(dimension);
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InputError("cndf: gamma must be a positive real, got " +
                     std::to_string(gamma));
  }
  return CndfSpec(CndfKind::BoundedExp, 0.0, 0.0, gamma, dimension);
}

std::string CndfSpec::to_string() const {
  std::ostringstream out;
  switch (kind_) {
    case CndfKind::Stable:
      out << "stable:alpha=" << alpha_;
      break;
    case CndfKind::Minkowski:
      out << "minkowski:p=" << p_;
      break;
    case CndfKind::BoundedExp:
      out << "boundedexp:gamma=" << gamma_;
      break;
  }
  return out.str();
}

double evaluate(const CndfSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != spec.dimension()) {
    throw InputError("cndf: argument has dimension " + std::to_string(x.size()) +
                     ", spec expects " + std::to_string(spec.dimension()));
  }
  switch (spec.kind()) {
    case CndfKind::Stable:
      return stable_value(spec.alpha(), x.norm());
    case CndfKind::Minkowski:
      return std::pow(x.array().abs().pow(spec.p()).sum(), 1.0 / spec.p());
    case CndfKind::BoundedExp:
      return bounded_exp_value(spec.gamma(), x.norm());
  }
  return 0.0;
}

double evaluate_difference(const CndfSpec& spec,
                           const Eigen::Ref<const Eigen::RowVectorXd>& x,
                           const Eigen::Ref<const Eigen::RowVectorXd>& y) {
  switch (spec.kind()) {
    case CndfKind::Stable:
      return stable_value(spec.alpha(), (x - y).norm());
    case CndfKind::Minkowski:
      return std::pow((x - y).array().abs().pow(spec.p()).sum(), 1.0 / spec.p());
    case CndfKind::BoundedExp:
      return bounded_exp_value(spec.gamma(), (x - y).norm());
  }
  return 0.0;
}

double stable_constant(double alpha, int d) {
  if (!(alpha > 0.0) || !(alpha < 2.0)) {
    throw InputError("stable_constant: alpha must lie in (0,2), got " +
                     std::to_string(alpha));
  }
  require_dimension(d);
  const double num = alpha * std::pow(2.0, alpha - 1.0) *
                     std::tgamma((alpha + d) / 2.0);
  const double den = std::pow(std::numbers::pi, d / 2.0) *
                     std::tgamma(1.0 - alpha / 2.0);
  return num / den;
}

double suggest_gamma(double delta) {
  if (!(delta > 0.0)) {
    throw InputError("suggest_gamma: delta must be positive, got " +
                     std::to_string(delta));
  }
  return -std::log(0.01) / delta;
}

CndfSpec parse_cndf(std::string_view text, int dimension) {
  auto parse_param = [&](std::string_view body, std::string_view name) {
    const auto eq = body.find('=');
    if (eq == std::string_view::npos || body.substr(0, eq) != name) {
      throw InputError("cndf: expected '" + std::string(name) + "=<value>' in '" +
                       std::string(text) + "'");
    }
    const std::string value(body.substr(eq + 1));
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      throw InputError("cndf: cannot parse numeric value '" + value + "' in '" +
                       std::string(text) + "'");
    }
  };

  if (text == "euclid") return CndfSpec::euclidean(dimension);
  const auto colon = text.find(':');
  const std::string_view family = text.substr(0, colon);
  const std::string_view body =
      colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (family == "stable") return CndfSpec::stable(parse_param(body, "alpha"), dimension);
  if (family == "minkowski") return CndfSpec::minkowski(parse_param(body, "p"), dimension);
  if (family == "boundedexp")
    return CndfSpec::bounded_exp(parse_param(body, "gamma"), dimension);
  throw InputError("cndf: unknown spec '" + std::string(text) +
                   "' (expected euclid, stable:alpha=, minkowski:p= or boundedexp:gamma=)");
}

}  // namespace multivariance
