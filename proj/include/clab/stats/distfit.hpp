#pragma once

#include <optional>
#include <span>
#include <string>

namespace clab {

/// Continuous power-law MLE 1 + m / sum ln(x_i / x_min) over x_i >= x_min.
double power_law_alpha(std::span<const double> sample, double x_min);

struct FitOptions {
  std::optional<double> x_min;  // default: sample minimum
  bool scan_x_min = false;      // choose x_min minimising the power-law KS distance
  std::size_t min_tail = 10;
};

struct FitComparison {
  double x_min = 0.0;
  std::size_t n_tail = 0;
  double alpha_hat = 0.0;
  double lognormal_mu = 0.0;
  double lognormal_sigma = 0.0;
  double exp_rate = 0.0;
  double loglik_power_law = 0.0;
  double loglik_lognormal = 0.0;
  double loglik_exponential = 0.0;
  /// Summed log-likelihood ratio, power law minus lognormal (negative favours lognormal).
  double lr_pl_vs_ln = 0.0;
  double vuong_z = 0.0;
  double p_value = 1.0;
  double lr_ln_vs_exp = 0.0;
  double vuong_z_ln_vs_exp = 0.0;
  double p_value_ln_vs_exp = 1.0;
  double ks_stat = 0.0;  // power law
  double ks_lognormal = 0.0;
  double ks_exponential = 0.0;
  std::string best_fit;
};

/// Power-law, lognormal and shifted-exponential fits to the tail x >= x_min,
/// compared with Vuong's normalised likelihood-ratio test.
FitComparison fit_distributions(std::span<const double> sample, const FitOptions& opts = {});

}  // namespace clab
