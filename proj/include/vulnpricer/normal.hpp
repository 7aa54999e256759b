#pragma once

namespace vulnpricer {

/// Standard normal density.
[[nodiscard]] double normal_pdf(double x);

/// Standard normal CDF, computed through erfc so the lower tail keeps full
/// relative precision.
[[nodiscard]] double normal_cdf(double x);

/// Inverse standard normal CDF for p in (0,1). Acklam's rational
/// approximation followed by one Halley step; absolute error below 1e-13.
[[nodiscard]] double normal_inv_cdf(double p);

}  // namespace vulnpricer
