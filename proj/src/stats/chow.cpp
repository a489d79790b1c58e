#include "clab/stats/chow.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "clab/error.hpp"

namespace clab {

namespace {

struct Regime {
  std::vector<double> t;
  std::vector<double> y;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Residual sum of squares of y on an intercept (k = 1) or intercept + trend (k = 2).
double rss(const Regime& r, int k) {
  const auto n = static_cast<Eigen::Index>(r.y.size());
  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd y(n);
  const double tc = mean_of(r.t);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    if (k == 2) X(i, 1) = r.t[static_cast<std::size_t>(i)] - tc;
    y(i) = r.y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
  return (y - X * beta).squaredNorm();
}

}  // namespace

ChowResult chow_test(const std::map<int, double>& series, int break_year) {
  Regime first, second, pooled;
  for (const auto& [year, value] : series) {
    require(std::isfinite(value), Errc::InvalidArgument, "series values must be finite");
    Regime& r = year <= break_year ? first : second;
    r.t.push_back(year);
    r.y.push_back(value);
    pooled.t.push_back(year);
    pooled.y.push_back(value);
  }
  const auto n = static_cast<int>(pooled.y.size());
  require(n >= 3, Errc::InsufficientData, "Chow test needs at least 3 points");
  require(!first.y.empty() && !second.y.empty(), Errc::InsufficientData,
          "break year " + std::to_string(break_year) + " leaves an empty regime");

  ChowResult out;
  out.break_candidate = break_year;
  out.regime_means = {mean_of(first.y), mean_of(second.y)};
  out.regime_sizes = {static_cast<int>(first.y.size()), static_cast<int>(second.y.size())};
  const int k = first.y.size() >= 3 && second.y.size() >= 3 ? 2 : 1;
  out.low_power = k == 1;
  out.df1 = k;
  out.df2 = n - 2 * k;
  require(out.df2 > 0, Errc::InsufficientData, "too few points for the split regressions");

  out.rss_pooled = rss(pooled, k);
  out.rss_split = rss(first, k) + rss(second, k);

  double tss = 0.0;
  const double ybar = mean_of(pooled.y);
  for (double y : pooled.y) tss += (y - ybar) * (y - ybar);
  // Residuals at rounding level carry no information about a break.
  const double noise = 1e-20 * tss + std::numeric_limits<double>::min();
  const double gain = std::max(0.0, out.rss_pooled - out.rss_split);
  if (out.rss_pooled <= noise || gain <= 1e-12 * tss) {
    out.f_stat = 0.0;
    out.p_value = 1.0;
  } else if (out.rss_split <= noise) {
    out.f_stat = std::numeric_limits<double>::infinity();
    out.p_value = 0.0;
  } else {
    out.f_stat = (gain / k) / (out.rss_split / out.df2);
    const boost::math::fisher_f dist(out.df1, out.df2);
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.f_stat));
  }
  return out;
}

}  // namespace clab
