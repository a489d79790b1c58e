#pragma once

#include <span>
#include <vector>

namespace clab {

/// Empirical quantile by linear interpolation between order statistics
/// (Hyndman-Fan type 7). `q` must lie in [0, 1]; the sample must be non-empty.
double quantile_type7(std::span<const double> sample, double q);

/// Same as quantile_type7 but for an already ascending-sorted sample.
double quantile_type7_sorted(std::span<const double> sorted, double q);

/// Order statistic at the inverse empirical CDF: the smallest x with F(x) >= p.
double order_statistic_at(std::span<const double> sorted, double p);

double mean(std::span<const double> x);

/// Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> x);

}  // namespace clab
