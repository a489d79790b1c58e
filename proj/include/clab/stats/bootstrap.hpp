#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clab/reconstruct.hpp"

namespace clab {

struct BootstrapConfig {
  int B = 100;
  double level = 0.95;
  std::uint64_t seed = 42;
  unsigned threads = 1;
};

struct SkippedReplicate {
  int index = 0;
  std::string reason;
};

struct BootstrapResult {
  double point = 0.0;
  /// Successful replicates in replicate-index order.
  std::vector<double> replicates;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
  std::uint64_t seed = 0;
  int B = 0;
  int B_effective = 0;
  std::vector<SkippedReplicate> skipped;

  double median() const;
};

/// Percentile interval: order statistics of `replicates` at (1-level)/2 and (1+level)/2.
std::pair<double, double> percentile_interval(std::vector<double> replicates, double level);

/// Generic nonparametric bootstrap over n units. `statistic` receives the
/// resampled indices and returns nullopt (or throws clab::Error) to skip a
/// replicate. Replicate b draws from stream_rng(seed, b).
BootstrapResult bootstrap(std::size_t n, double point,
                          const std::function<std::optional<double>(std::span<const std::size_t>)>& statistic,
                          const BootstrapConfig& cfg);

/// Resamples banks with replacement and recomputes lambda2 of the reconstructed network.
BootstrapResult bootstrap_lambda2(std::span<const double> assets, const ReconstructionConfig& recon,
                                  const BootstrapConfig& cfg);

}  // namespace clab
