#include "clab/stats/distfit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "clab/error.hpp"

namespace clab {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

template <class Cdf>
double ks_distance(const std::vector<double>& sorted, Cdf cdf) {
  const auto m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

struct Vuong {
  double lr = 0.0;
  double z = 0.0;
  double p = 1.0;
};

Vuong vuong(const std::vector<double>& l1, const std::vector<double>& l2) {
  const auto m = static_cast<double>(l1.size());
  Vuong v;
  for (std::size_t i = 0; i < l1.size(); ++i) v.lr += l1[i] - l2[i];
  const double mean = v.lr / m;
  double ss = 0.0;
  for (std::size_t i = 0; i < l1.size(); ++i) {
    const double d = l1[i] - l2[i] - mean;
    ss += d * d;
  }
  const double sigma = std::sqrt(ss / m);
  if (sigma > 0.0) {
    v.z = v.lr / (sigma * std::sqrt(m));
    v.p = std::erfc(std::abs(v.z) / std::numbers::sqrt2);
  }
  return v;
}

double power_law_ks(const std::vector<double>& sorted_tail, double x_min) {
  const double alpha = power_law_alpha(sorted_tail, x_min);
  return ks_distance(sorted_tail, [&](double x) { return 1.0 - std::pow(x / x_min, 1.0 - alpha); });
}

}  // namespace

double power_law_alpha(std::span<const double> sample, double x_min) {
  require(x_min > 0.0, Errc::NonPositiveSample, "x_min must be positive");
  double s = 0.0;
  std::size_t m = 0;
  for (double x : sample) {
    if (x >= x_min) {
      s += std::log(x / x_min);
      ++m;
    }
  }
  require(m > 0, Errc::TooFewPoints, "no observations at or above x_min");
  if (!(s > 0.0)) fail(Errc::TooFewPoints, "tail is constant; power-law exponent undefined");
  return 1.0 + static_cast<double>(m) / s;
}

FitComparison fit_distributions(std::span<const double> sample, const FitOptions& opts) {
  for (double x : sample) {
    if (!(x > 0.0) || !std::isfinite(x)) fail(Errc::NonPositiveSample, "sample values must be positive and finite");
  }
  require(sample.size() >= opts.min_tail, Errc::TooFewPoints,
          "need at least " + std::to_string(opts.min_tail) + " observations");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());

  FitComparison out;
  if (opts.x_min) {
    out.x_min = *opts.x_min;
  } else if (opts.scan_x_min) {
    double best = std::numeric_limits<double>::infinity();
    out.x_min = sorted.front();
    for (std::size_t i = 0; i + opts.min_tail <= sorted.size(); ++i) {
      if (i > 0 && sorted[i] == sorted[i - 1]) continue;
      const std::vector<double> tail(sorted.begin() + static_cast<std::ptrdiff_t>(i), sorted.end());
      if (tail.front() == tail.back()) break;
      const double d = power_law_ks(tail, sorted[i]);
      if (d < best) {
        best = d;
        out.x_min = sorted[i];
      }
    }
  } else {
    out.x_min = sorted.front();
  }
  require(out.x_min > 0.0, Errc::NonPositiveSample, "x_min must be positive");

  const auto first = std::lower_bound(sorted.begin(), sorted.end(), out.x_min);
  const std::vector<double> tail(first, sorted.end());
  out.n_tail = tail.size();
  require(out.n_tail >= opts.min_tail, Errc::TooFewPoints,
          "only " + std::to_string(out.n_tail) + " observations at or above x_min");
  if (tail.front() == tail.back()) fail(Errc::TooFewPoints, "sample is constant; fits are degenerate");

  const auto m = static_cast<double>(out.n_tail);
  const double x_min = out.x_min;
  out.alpha_hat = power_law_alpha(tail, x_min);

  double mu = 0.0, mean_x = 0.0;
  for (double x : tail) {
    mu += std::log(x);
    mean_x += x;
  }
  mu /= m;
  mean_x /= m;
  double var = 0.0;
  for (double x : tail) var += (std::log(x) - mu) * (std::log(x) - mu);
  out.lognormal_mu = mu;
  out.lognormal_sigma = std::sqrt(var / m);
  out.exp_rate = 1.0 / (mean_x - x_min);

  const double alpha = out.alpha_hat;
  const double sigma = out.lognormal_sigma;
  const double rate = out.exp_rate;
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  std::vector<double> lpl(tail.size()), lln(tail.size()), lexp(tail.size());
  for (std::size_t i = 0; i < tail.size(); ++i) {
    const double x = tail[i];
    const double z = (std::log(x) - mu) / sigma;
    lpl[i] = std::log(alpha - 1.0) - std::log(x_min) - alpha * std::log(x / x_min);
    lln[i] = -std::log(x) - std::log(sigma) - half_log_2pi - 0.5 * z * z;
    lexp[i] = std::log(rate) - rate * (x - x_min);
    out.loglik_power_law += lpl[i];
    out.loglik_lognormal += lln[i];
    out.loglik_exponential += lexp[i];
  }

  const Vuong pl_ln = vuong(lpl, lln);
  out.lr_pl_vs_ln = pl_ln.lr;
  out.vuong_z = pl_ln.z;
  out.p_value = pl_ln.p;
  const Vuong ln_exp = vuong(lln, lexp);
  out.lr_ln_vs_exp = ln_exp.lr;
  out.vuong_z_ln_vs_exp = ln_exp.z;
  out.p_value_ln_vs_exp = ln_exp.p;

  out.ks_stat = ks_distance(tail, [&](double x) { return 1.0 - std::pow(x / x_min, 1.0 - alpha); });
  out.ks_lognormal = ks_distance(tail, [&](double x) { return normal_cdf((std::log(x) - mu) / sigma); });
  out.ks_exponential = ks_distance(tail, [&](double x) { return 1.0 - std::exp(-rate * (x - x_min)); });

  out.best_fit = "Power Law";
  double best = out.loglik_power_law;
  if (out.loglik_lognormal > best) {
    best = out.loglik_lognormal;
    out.best_fit = "Lognormal";
  }
  if (out.loglik_exponential > best) out.best_fit = "Exponential";
  return out;
}

}  // namespace clab
