#pragma once

#include <map>
#include <utility>

namespace clab {

struct ChowResult {
  int break_candidate = 0;
  double f_stat = 0.0;
  double p_value = 1.0;
  int df1 = 0;
  int df2 = 0;
  /// Means of years <= break and years > break.
  std::pair<double, double> regime_means{0.0, 0.0};
  std::pair<int, int> regime_sizes{0, 0};
  double rss_pooled = 0.0;
  double rss_split = 0.0;
  /// Regimes fitted with intercepts only because one has fewer than 3 points.
  bool low_power = false;
};

/// Chow test for a break after `break_year`. Each regime gets a linear trend
/// in the year when both have at least 3 points, otherwise an intercept.
ChowResult chow_test(const std::map<int, double>& series, int break_year);

}  // namespace clab
