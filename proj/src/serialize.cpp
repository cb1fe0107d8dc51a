#include "multivariance/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace multivariance {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string method_name(TestMethod m) {
  switch (m) {
    case TestMethod::ConservativeChi2: return "conservative";
    case TestMethod::Permutation: return "permutation";
    case TestMethod::MonteCarlo: return "montecarlo";
  }
  return "?";
}

std::string statistic_name(StatisticKind k) {
  switch (k) {
    case StatisticKind::M: return "m";
    case StatisticKind::TotalM: return "total";
    case StatisticKind::NormalizedM: return "normalized";
    case StatisticKind::NormalizedTotalM: return "normalized-total";
  }
  return "?";
}

namespace {

std::string vector_json(const Eigen::VectorXd& v) {
  std::ostringstream out;
  out << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    out << format_double(v(i));
  }
  out << ']';
  return out.str();
}

}  // namespace

std::string to_json(const MultivarianceEstimates& e) {
  std::ostringstream out;
  out << "{\"m2\":" << format_double(e.m2)
      << ",\"total_m2\":" << format_double(e.total_m2)
      << ",\"normalized_m2\":" << format_double(e.normalized_m2)
      << ",\"normalized_total_m2\":" << format_double(e.normalized_total_m2)
      << ",\"multicorrelation2\":" << format_double(e.multicorrelation2)
      << ",\"m\":" << format_double(e.m())
      << ",\"total_m\":" << format_double(e.total_m())
      << ",\"normalized_m\":" << format_double(e.normalized_m())
      << ",\"normalized_total_m\":" << format_double(e.normalized_total_m())
      << ",\"multicorrelation\":" << format_double(e.multicorrelation())
      << ",\"a_hat\":" << vector_json(e.a_hat)
      << ",\"b_hat\":" << vector_json(e.b_hat)
      << ",\"N\":" << e.sample_size
      << ",\"n\":" << e.block_count << '}';
  return out.str();
}

std::string to_json(const TestReport& r) {
  std::ostringstream out;
  out << "{\"statistic\":" << format_double(r.statistic)
      << ",\"method\":\"" << method_name(r.method) << '"'
      << ",\"statistic_kind\":\"" << statistic_name(r.kind) << '"'
      << ",\"alpha\":" << format_double(r.alpha);
  if (r.method == TestMethod::ConservativeChi2) {
    out << ",\"critical_value\":" << format_double(r.critical_value);
  } else {
    out << ",\"p_value\":" << format_double(r.p_value);
  }
  out << ",\"reject\":" << (r.reject ? "true" : "false");
  if (r.method != TestMethod::ConservativeChi2) {
    out << ",\"resamples\":" << r.resamples << ",\"seed\":" << r.seed;
  }
  out << '}';
  return out.str();
}

std::string to_json(const std::vector<PowerRow>& rows) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i) out << ',';
    out << "{\"generator\":\"" << r.generator << '"'
        << ",\"param\":" << format_double(r.parameter)
        << ",\"N\":" << r.sample_size
        << ",\"test\":\"" << r.test << '"'
        << ",\"psi\":\"" << r.psi << '"'
        << ",\"rate\":" << format_double(r.rejection_rate)
        << ",\"se\":" << format_double(r.std_error)
        << ",\"replications\":" << r.replications
        << ",\"seed\":" << r.seed << '}';
  }
  out << ']';
  return out.str();
}

std::string to_csv(const MultivarianceEstimates& e) {
  std::ostringstream out;
  out << "m2,total_m2,normalized_m2,normalized_total_m2,multicorrelation2,N,n\n"
      << format_double(e.m2) << ',' << format_double(e.total_m2) << ','
      << format_double(e.normalized_m2) << ','
      << format_double(e.normalized_total_m2) << ','
      << format_double(e.multicorrelation2) << ',' << e.sample_size << ','
      << e.block_count << '\n';
  return out.str();
}

std::string to_csv(const TestReport& r) {
  std::ostringstream out;
  out << "statistic,method,statistic_kind,alpha,critical_value,p_value,reject,"
         "resamples,seed\n";
  out << format_double(r.statistic) << ',' << method_name(r.method) << ','
      << statistic_name(r.kind) << ',' << format_double(r.alpha) << ',';
  if (r.method == TestMethod::ConservativeChi2) {
    out << format_double(r.critical_value) << ",,";
  } else {
    out << ',' << format_double(r.p_value) << ',';
  }
  out << (r.reject ? "true" : "false") << ',' << r.resamples << ',' << r.seed << '\n';
  return out.str();
}

std::string to_csv(const std::vector<PowerRow>& rows) {
  std::ostringstream out;
  out << "generator,param,N,test,psi,rate,se,replications,seed\n";
  for (const auto& r : rows) {
    out << r.generator << ',' << format_double(r.parameter) << ',' << r.sample_size
        << ',' << r.test << ',' << r.psi << ',' << format_double(r.rejection_rate)
        << ',' << format_double(r.std_error) << ',' << r.replications << ','
        << r.seed << '\n';
  }
  return out.str();
}

std::string error_json(const std::string& code, const std::string& message) {
  std::string escaped;
  escaped.reserve(message.size());
  for (char c : message) {
    if (c == '"' || c == '\\') escaped += '\\';
    if (c == '\n') {
      escaped += "\\n";
      continue;
    }
    escaped += c;
  }
  return "{\"error\":{\"code\":\"" + code + "\",\"message\":\"" + escaped + "\"}}";
}

}  // namespace multivariance
