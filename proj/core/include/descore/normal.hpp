#pragma once

namespace descore {

/// Standard normal CDF.
double normal_cdf(double x);

/// Upper tail 1 - Phi(x), accurate for large x.
double normal_sf(double x);

/// Standard normal quantile; p must lie in (0, 1).
double normal_quantile(double p);

}  // namespace descore
