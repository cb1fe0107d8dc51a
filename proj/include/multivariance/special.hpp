#pragma once

namespace multivariance {

// Quantile of the standard normal distribution (Acklam's rational
// approximation polished by one Halley step against erfc); relative error
// below 1e-13 on (0, 1).
double normal_quantile(double q);

// q-quantile of the chi-square distribution with one degree of freedom,
// computed as normal_quantile((1+q)/2)^2. Relative error <= 1e-8.
double chi2_quantile_1df(double q);

}  // namespace multivariance
