#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "clab/ingest.hpp"
#include "clab/network.hpp"
#include "clab/reconstruct.hpp"

namespace clab {

struct PermutationResult {
  double observed = 0.0;  // mean(a) - mean(b)
  double p_value = 1.0;
  int n_perm = 0;
  /// Relabelings compared against the observed statistic.
  long long evaluated = 0;
  long long extreme = 0;
  bool exhaustive = false;
};

/// Two-sided test on the difference of means. When the number of distinct
/// splits C(n_a + n_b, n_a) is at most n_perm every split is enumerated and
/// p = (1 + #other splits with |T| >= |T_obs|) / (1 + #other splits);
/// otherwise p = (r + 1) / (n_perm + 1) over seeded random relabelings.
PermutationResult permutation_test(std::span<const double> a, std::span<const double> b, int n_perm,
                                   std::uint64_t seed, unsigned threads = 1);

struct PanelPermutationResult {
  int year_a = 0;
  int year_b = 0;
  double lambda2_a = 0.0;
  double lambda2_b = 0.0;
  double observed = 0.0;  // lambda2_a - lambda2_b
  std::vector<double> null;
  double p_value = 1.0;
  int n_perm = 0;
  std::size_t swappable_banks = 0;
};

/// Year-label permutation at the bank level: each bank observed in both
/// years swaps its two observations with probability 1/2, then lambda2 is
/// recomputed for both relabeled cross-sections.
PanelPermutationResult panel_permutation_test(const BankPanel& panel, int year_a, int year_b,
                                              const ReconstructionConfig& recon, int n_perm, std::uint64_t seed,
                                              unsigned threads = 1);

struct PlaceboResult {
  double observed = 0.0;
  std::vector<double> null;
  /// Mid-rank percentile of the observed value in the null, in [0, 100].
  double percentile = 50.0;
  /// Every draw equals the observed value, so the percentile carries no information.
  bool ties_undefined = false;
  std::size_t edges = 0;
};

/// Null distribution of lambda2 under random permutation of the edge weights
/// over a fixed edge set.
PlaceboResult placebo_null(const WeightedNetwork& net, int n_draws, std::uint64_t seed, unsigned threads = 1);

}  // namespace clab
