#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clab {

enum class ReconstructionMethod { MaxEntropy, Kde, Fitness, MinDensity };

std::string_view method_name(ReconstructionMethod m) noexcept;
ReconstructionMethod parse_method(std::string_view name);

enum class RatioKind { Fixed, SizeThreshold, LinearLog, Tiered };

std::string_view ratio_kind_name(RatioKind k) noexcept;
RatioKind parse_ratio_kind(std::string_view name);

/// Interbank share of total assets, possibly bank-specific.
struct RatioRule {
  RatioKind kind = RatioKind::Fixed;
  double fixed = 0.05;
  // SizeThreshold: banks strictly above the size quantile get rho_large.
  double rho_large = 0.03;
  double rho_small = 0.07;
  double size_quantile = 0.75;
  // LinearLog: rho_i = intercept + slope * ln(T_i / mean(T)).
  double intercept = 0.08;
  double slope = -0.03;
  // Tiered: descending quantile cutoffs; tier_ratios has one more entry than
  // tier_quantiles (the last applies below every cutoff).
  std::vector<double> tier_quantiles{0.95, 0.75};
  std::vector<double> tier_ratios{0.02, 0.05, 0.08};

  static RatioRule fixed_ratio(double rho);
  static RatioRule size_threshold(double large, double small, double quantile);
  static RatioRule linear_log(double intercept, double slope);
  static RatioRule tiered(std::vector<double> quantiles, std::vector<double> ratios);

  /// Per-bank ratios; throws InvalidRatio unless every ratio lies in (0,1).
  std::vector<double> ratios(std::span<const double> assets) const;
};

struct ReconstructionConfig {
  ReconstructionMethod method = ReconstructionMethod::MaxEntropy;
  RatioRule ratio_rule;
  double fitness_alpha = 1.0;
  double min_edge_threshold = 1.0;

  void validate() const;
};

/// Dense bilateral exposure estimate. X(i, j) is what bank i lends to bank j.
struct ExposureMatrix {
  std::vector<std::string> bank_ids;
  Eigen::MatrixXd X;
  Eigen::VectorXd row_targets;
  Eigen::VectorXd col_targets;
  std::string method;
  bool marginals_fitted = true;
  bool thresholded = false;
  bool all_zero = false;
  bool uniform_fallback = false;
  bool bandwidth_fallback = false;
  bool converged = true;
  int ipf_sweeps = 0;
  double bandwidth = 0.0;
  double threshold = 0.0;

  Eigen::Index size() const noexcept { return X.rows(); }
  /// max_i |row_i - A_i| and |col_j - L_j|.
  double max_marginal_error() const;
  std::size_t edge_count() const;
};

struct Aggregates {
  Eigen::VectorXd A;
  Eigen::VectorXd L;
  std::vector<double> ratios;
};

/// A_i = rho_i T_i, L = A. Assets must be strictly positive.
Aggregates interbank_aggregates(std::span<const double> assets, const RatioRule& rule);

struct IpfOptions {
  double tolerance = 1e-12;
  int max_sweeps = 10000;
};

/// Maximum-entropy estimate A_i L_j / sum(A) with the diagonal removed and the
/// marginals restored by iterative proportional fitting.
ExposureMatrix max_entropy(const Eigen::VectorXd& A, const Eigen::VectorXd& L, const IpfOptions& opts = {});

struct KdeOptions {
  bool allow_fallback = true;
};

/// Silverman bandwidth 0.9 min(sd, IQR/1.34) n^(-1/5).
double silverman_bandwidth(std::span<const double> sample);

/// Gaussian KDE of `sample` evaluated at `x`.
double gaussian_kde(std::span<const double> sample, double bandwidth, double x);

/// Pair weights proportional to f(T_i) f(T_j), normalised so the off-diagonal
/// total equals `total_interbank`. Marginals are not fitted.
ExposureMatrix kde_weights(std::span<const double> assets, double total_interbank, const KdeOptions& opts = {});

/// x_ij = eta_i eta_j / sum_{k != l} eta_k eta_l * total with eta_i = T_i^alpha.
ExposureMatrix fitness_model(std::span<const double> assets, double alpha, double total_interbank);

/// Sparse feasible transport plan with at most 2n - 1 positive entries.
ExposureMatrix min_density(const Eigen::VectorXd& A, const Eigen::VectorXd& L);

/// Zeroes every pair whose symmetric sum X_ij + X_ji is <= epsilon.
ExposureMatrix apply_threshold(const ExposureMatrix& X, double epsilon);

/// Aggregates plus method dispatch for one cross-section (no thresholding;
/// the edge threshold is applied when the network is built).
ExposureMatrix reconstruct(std::span<const double> assets, const ReconstructionConfig& cfg,
                           std::vector<std::string> bank_ids = {});

}  // namespace clab
