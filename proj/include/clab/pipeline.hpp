#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clab/diffusion.hpp"
#include "clab/ingest.hpp"
#include "clab/network.hpp"
#include "clab/reconstruct.hpp"
#include "clab/spectrum.hpp"
#include "clab/topology.hpp"

namespace clab {

/// Reconstruction, thresholded network and Laplacian spectrum for one cross-section.
struct CrossSection {
  ExposureMatrix exposures;
  WeightedNetwork network;
  SpectrumResult spectrum;
};

CrossSection analyze_cross_section(std::span<const double> assets, const ReconstructionConfig& cfg,
                                   std::vector<std::string> bank_ids = {}, const SpectrumOptions& spectrum = {});

double lambda2_for_assets(std::span<const double> assets, const ReconstructionConfig& cfg,
                          const SpectrumOptions& spectrum = {});

struct AnalysisConfig {
  ReconstructionConfig recon;
  DiffusionParams diffusion;
  double critical_epsilon = 0.1;
  std::vector<int> years;  // empty: every panel year
  bool balanced = false;
  unsigned threads = 1;
  SpectrumOptions spectrum;
};

struct YearReport {
  int year = 0;
  std::size_t n_banks = 0;
  std::size_t edges = 0;
  double lambda2 = 0.0;
  double kappa_eff = 0.0;
  double d_star = 0.0;
  double gamma = 0.0;  // D lambda2 + kappa
  double network_share = 0.0;
  bool marginals_fitted = true;
  SpectrumResult spectrum;
  std::optional<TopologyReport> topology;
  std::vector<std::string> bank_ids;
};

struct YearChange {
  int from = 0;
  int to = 0;
  double d_lambda2 = 0.0;
  double pct_lambda2 = 0.0;
  double d_kappa = 0.0;
  double pct_kappa = 0.0;
  double kappa_ratio = 1.0;
};

struct AnalysisResult {
  std::vector<YearReport> years;
  /// Consecutive-year changes followed by first-to-last (when >= 3 years).
  std::vector<YearChange> changes;
};

YearReport analyze_year(const YearSlice& slice, const AnalysisConfig& cfg);
AnalysisResult analyze_panel(const BankPanel& panel, const AnalysisConfig& cfg);
std::vector<YearChange> year_changes(const std::vector<YearReport>& years);

struct SweepConfig {
  double rho_min = 0.01;
  double rho_max = 0.10;
  int steps = 10;

  void validate() const;
  std::vector<double> grid() const;
};

struct SweepResult {
  std::vector<double> rhos;
  std::vector<int> years;
  /// lambda2[r][y] for rho index r, year index y.
  std::vector<std::vector<double>> lambda2;
  /// Percentage change first year -> last year at each rho.
  std::vector<double> pct_change;
  /// Log-log slope of lambda2 in rho per year (empty with a single rho).
  std::vector<double> scaling_exponent;
  double pct_change_spread = 0.0;  // max - min of pct_change, percentage points
};

/// Re-runs the analysis with a Fixed ratio at each grid point; other settings from `cfg`.
SweepResult ratio_sweep(const BankPanel& panel, const AnalysisConfig& cfg, const SweepConfig& sweep);

struct SynthConfig {
  int n_banks = 70;
  std::vector<int> years{2018, 2021, 2023};
  std::uint64_t seed = 1;
  double log_mean = 11.5;  // ln of millions
  double log_sd = 1.2;
  double noise_sd = 0.05;  // bank-year log noise, zero in the base year
  double trend = 0.0;      // common log growth per year
  double shrinkage = 0.0;  // treated banks' asset cut from shrink_year on
  int shrink_year = 2021;
  double treated_quantile = 0.75;
};

/// Lognormal bank sizes anchored in the first year; treated banks (above the
/// size quantile) shrink by `shrinkage` from `shrink_year` on.
BankPanel synth_panel(const SynthConfig& cfg);

struct LeaveOneOut {
  double baseline = 0.0;
  std::vector<double> lambda2;
  std::vector<double> pct_change;
  double max_abs_pct = 0.0;
  std::size_t worst_bank = 0;
};

LeaveOneOut leave_one_out(std::span<const double> assets, const ReconstructionConfig& cfg, unsigned threads = 1);

/// Ordinary least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace clab
