#pragma once

#include <string>
#include <vector>

#include "multivariance/experiments.hpp"
#include "multivariance/inference.hpp"
#include "multivariance/statistics.hpp"

namespace multivariance {

// Flat JSON emitters with fixed field order and numbers printed to 17
// significant digits, so identical inputs produce byte-identical output and
// every double survives a round trip.

std::string format_double(double v);  // %.17g, with nan/inf as null

std::string to_json(const MultivarianceEstimates& e);
std::string to_json(const TestReport& r);
std::string to_json(const std::vector<PowerRow>& rows);

std::string to_csv(const MultivarianceEstimates& e);
std::string to_csv(const TestReport& r);
std::string to_csv(const std::vector<PowerRow>& rows);

std::string method_name(TestMethod m);
std::string statistic_name(StatisticKind k);

// {"error": {"code": ..., "message": ...}}
std::string error_json(const std::string& code, const std::string& message);

}  // namespace multivariance
