#include "clab/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "clab/error.hpp"

namespace clab {

double quantile_type7_sorted(std::span<const double> sorted, double q) {
  require(!sorted.empty(), Errc::InvalidArgument, "quantile of empty sample");
  require(q >= 0.0 && q <= 1.0, Errc::InvalidArgument, "quantile level outside [0,1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile_type7(std::span<const double> sample, double q) {
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_type7_sorted(sorted, q);
}

double order_statistic_at(std::span<const double> sorted, double p) {
  require(!sorted.empty(), Errc::InvalidArgument, "order statistic of empty sample");
  const auto n = static_cast<double>(sorted.size());
  // 1e-9 slack keeps p*n = 2.5000000001 from rounding up an extra rank.
  auto rank = static_cast<long>(std::ceil(p * n - 1e-9));
  rank = std::clamp(rank, 1L, static_cast<long>(sorted.size()));
  return sorted[static_cast<std::size_t>(rank - 1)];
}

double mean(std::span<const double> x) {
  require(!x.empty(), Errc::InvalidArgument, "mean of empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
  require(x.size() >= 2, Errc::InvalidArgument, "standard deviation needs two points");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace clab
