#include "clab/stats/bootstrap.hpp"

#include <algorithm>
#include <random>

#include "clab/error.hpp"
#include "clab/parallel.hpp"
#include "clab/pipeline.hpp"
#include "clab/quantile.hpp"

namespace clab {

double BootstrapResult::median() const {
  require(!replicates.empty(), Errc::InsufficientData, "no bootstrap replicates");
  return quantile_type7(replicates, 0.5);
}

std::pair<double, double> percentile_interval(std::vector<double> replicates, double level) {
  require(level > 0.0 && level < 1.0, Errc::InvalidArgument, "confidence level must lie in (0,1)");
  require(!replicates.empty(), Errc::InsufficientData, "no bootstrap replicates");
  std::sort(replicates.begin(), replicates.end());
  const double alpha = 1.0 - level;
  return {order_statistic_at(replicates, alpha / 2.0), order_statistic_at(replicates, 1.0 - alpha / 2.0)};
}

BootstrapResult bootstrap(std::size_t n, double point,
                          const std::function<std::optional<double>(std::span<const std::size_t>)>& statistic,
                          const BootstrapConfig& cfg) {
  require(n >= 1, Errc::InsufficientData, "bootstrap needs at least one unit");
  require(cfg.B >= 1, Errc::InvalidArgument, "B must be positive");
  require(cfg.level > 0.0 && cfg.level < 1.0, Errc::InvalidArgument, "confidence level must lie in (0,1)");

  const auto B = static_cast<std::size_t>(cfg.B);
  std::vector<std::optional<double>> values(B);
  std::vector<std::string> reasons(B);
  parallel_for(B, cfg.threads, [&](std::size_t b) {
    auto rng = stream_rng(cfg.seed, b);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = pick(rng);
    try {
      values[b] = statistic(idx);
      if (!values[b]) reasons[b] = "statistic undefined";
    } catch (const Error& e) {
      reasons[b] = e.what();
    }
  });

  BootstrapResult out;
  out.point = point;
  out.level = cfg.level;
  out.seed = cfg.seed;
  out.B = cfg.B;
  for (std::size_t b = 0; b < B; ++b) {
    if (values[b]) {
      out.replicates.push_back(*values[b]);
    } else {
      out.skipped.push_back({static_cast<int>(b), reasons[b]});
    }
  }
  out.B_effective = static_cast<int>(out.replicates.size());
  require(out.B_effective > 0, Errc::InsufficientData, "every bootstrap replicate was skipped");
  std::tie(out.ci_low, out.ci_high) = percentile_interval(out.replicates, cfg.level);
  return out;
}

BootstrapResult bootstrap_lambda2(std::span<const double> assets, const ReconstructionConfig& recon,
                                  const BootstrapConfig& cfg) {
  require(assets.size() >= 3, Errc::TooSmall, "bootstrap needs at least 3 banks");
  require(cfg.B >= 10, Errc::InvalidArgument, "bootstrap needs B >= 10");
  const double point = lambda2_for_assets(assets, recon);
  auto statistic = [&](std::span<const std::size_t> idx) -> std::optional<double> {
    std::vector<double> sample(idx.size());
    double total = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      sample[k] = assets[idx[k]];
      total += sample[k];
    }
    if (!(total > 0.0)) fail(Errc::ZeroTotal, "DegenerateReplicate: resample has zero total assets");
    return lambda2_for_assets(sample, recon);
  };
  return bootstrap(assets.size(), point, statistic, cfg);
}

}  // namespace clab
