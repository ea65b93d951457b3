#pragma once

namespace adjes {

double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;

/// Inverse of the standard normal distribution function on (0, 1).
///
/// Rational approximation (Acklam) followed by one Newton step against
/// std::erfc; absolute error is below 1e-12 over (1e-300, 1 - 1e-16).
/// Returns -inf / +inf at 0 / 1 and NaN outside [0, 1].
double normal_quantile(double p) noexcept;

}  // namespace adjes
