#include "clab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "clab/error.hpp"
#include "clab/parallel.hpp"
#include "clab/quantile.hpp"

namespace clab {

CrossSection analyze_cross_section(std::span<const double> assets, const ReconstructionConfig& cfg,
                                   std::vector<std::string> bank_ids, const SpectrumOptions& spectrum) {
  CrossSection cs;
  cs.exposures = reconstruct(assets, cfg, std::move(bank_ids));
  cs.network = build_network(cs.exposures, cfg.min_edge_threshold);
  cs.spectrum = laplacian_spectrum(cs.network, spectrum);
  return cs;
}

double lambda2_for_assets(std::span<const double> assets, const ReconstructionConfig& cfg,
                          const SpectrumOptions& spectrum) {
  return analyze_cross_section(assets, cfg, {}, spectrum).spectrum.lambda2;
}

YearReport analyze_year(const YearSlice& slice, const AnalysisConfig& cfg) {
  try {
    CrossSection cs = analyze_cross_section(slice.assets, cfg.recon, slice.bank_ids, cfg.spectrum);
    YearReport r;
    r.year = slice.year;
    r.n_banks = slice.assets.size();
    r.edges = cs.network.edge_count();
    r.lambda2 = cs.spectrum.lambda2;
    r.kappa_eff = effective_decay(r.lambda2, cfg.diffusion);
    r.d_star = critical_distance(r.kappa_eff, cfg.critical_epsilon);
    r.gamma = cfg.diffusion.D * r.lambda2 + cfg.diffusion.kappa;
    r.network_share = dominance_share(r.lambda2, cfg.diffusion);
    r.marginals_fitted = cs.exposures.marginals_fitted;
    r.bank_ids = slice.bank_ids;
    try {
      r.topology = topology_report(cs.network);
    } catch (const Error& e) {
      if (e.code() != Errc::TooSmall) throw;
    }
    r.spectrum = std::move(cs.spectrum);
    return r;
  } catch (const Error& e) {
    throw with_context(e, "year " + std::to_string(slice.year));
  }
}

std::vector<YearChange> year_changes(const std::vector<YearReport>& years) {
  std::vector<YearChange> out;
  auto change = [](const YearReport& a, const YearReport& b) {
    YearChange c;
    c.from = a.year;
    c.to = b.year;
    c.d_lambda2 = b.lambda2 - a.lambda2;
    c.pct_lambda2 = 100.0 * (b.lambda2 / a.lambda2 - 1.0);
    c.d_kappa = b.kappa_eff - a.kappa_eff;
    c.kappa_ratio = b.kappa_eff / a.kappa_eff;
    c.pct_kappa = 100.0 * (c.kappa_ratio - 1.0);
    return c;
  };
  for (std::size_t i = 1; i < years.size(); ++i) out.push_back(change(years[i - 1], years[i]));
  if (years.size() >= 3) out.push_back(change(years.front(), years.back()));
  return out;
}

namespace {

BankPanel prepare_panel(const BankPanel& panel, const std::vector<int>& years, bool balanced) {
  BankPanel p = years.empty() ? panel : panel.select_years(years);
  require(!p.empty(), Errc::EmptyResult, "no observations in the selected years");
  return balanced ? balanced_panel(p) : p;
}

}  // namespace

AnalysisResult analyze_panel(const BankPanel& panel, const AnalysisConfig& cfg) {
  cfg.recon.validate();
  cfg.diffusion.validate();
  for (int y : cfg.years) {
    if (!panel.has_year(y)) fail(Errc::YearAbsent, "year " + std::to_string(y) + " is not in the panel");
  }
  const BankPanel p = prepare_panel(panel, cfg.years, cfg.balanced);
  AnalysisResult out;
  out.years.resize(p.years().size());
  parallel_for(out.years.size(), cfg.threads,
               [&](std::size_t i) { out.years[i] = analyze_year(p.year_slice(p.years()[i]), cfg); });
  out.changes = year_changes(out.years);
  return out;
}

void SweepConfig::validate() const {
  require(rho_min > 0.0 && rho_max < 1.0 && rho_min <= rho_max, Errc::InvalidArgument,
          "sweep bounds must satisfy 0 < min <= max < 1");
  require(steps >= 1, Errc::InvalidArgument, "sweep needs at least one step");
}

std::vector<double> SweepConfig::grid() const {
  validate();
  if (steps == 1 || rho_min == rho_max) return {rho_min};
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    g[static_cast<std::size_t>(k)] = rho_min + (rho_max - rho_min) * k / (steps - 1);
  }
  g.back() = rho_max;
  return g;
}

SweepResult ratio_sweep(const BankPanel& panel, const AnalysisConfig& cfg, const SweepConfig& sweep) {
  const BankPanel p = prepare_panel(panel, cfg.years, cfg.balanced);
  SweepResult out;
  out.rhos = sweep.grid();
  out.years = p.years();
  std::vector<YearSlice> slices;
  for (int y : out.years) slices.push_back(p.year_slice(y));

  const std::size_t R = out.rhos.size(), Y = out.years.size();
  out.lambda2.assign(R, std::vector<double>(Y, 0.0));
  parallel_for(R * Y, cfg.threads, [&](std::size_t k) {
    const std::size_t r = k / Y, y = k % Y;
    ReconstructionConfig rc = cfg.recon;
    rc.ratio_rule = RatioRule::fixed_ratio(out.rhos[r]);
    try {
      out.lambda2[r][y] = lambda2_for_assets(slices[y].assets, rc, cfg.spectrum);
    } catch (const Error& e) {
      throw with_context(e, "rho " + std::to_string(out.rhos[r]) + ", year " + std::to_string(out.years[y]));
    }
  });

  if (Y >= 2) {
    for (std::size_t r = 0; r < R; ++r) out.pct_change.push_back(100.0 * (out.lambda2[r][Y - 1] / out.lambda2[r][0] - 1.0));
    const auto [lo, hi] = std::minmax_element(out.pct_change.begin(), out.pct_change.end());
    out.pct_change_spread = *hi - *lo;
  }
  if (R >= 2) {
    std::vector<double> lx(R), ly(R);
    for (std::size_t y = 0; y < Y; ++y) {
      for (std::size_t r = 0; r < R; ++r) {
        lx[r] = std::log(out.rhos[r]);
        ly[r] = std::log(out.lambda2[r][y]);
      }
      out.scaling_exponent.push_back(ols_slope(lx, ly));
    }
  }
  return out;
}

BankPanel synth_panel(const SynthConfig& cfg) {
  require(cfg.n_banks >= 3, Errc::InvalidArgument, "synthetic panel needs at least 3 banks");
  require(!cfg.years.empty(), Errc::InvalidArgument, "synthetic panel needs at least one year");
  require(std::is_sorted(cfg.years.begin(), cfg.years.end()) &&
              std::adjacent_find(cfg.years.begin(), cfg.years.end()) == cfg.years.end(),
          Errc::InvalidArgument, "years must be strictly increasing");
  require(cfg.log_sd >= 0.0 && cfg.noise_sd >= 0.0, Errc::InvalidArgument, "standard deviations must be >= 0");
  require(cfg.shrinkage >= 0.0 && cfg.shrinkage < 1.0, Errc::InvalidArgument, "shrinkage must lie in [0,1)");
  require(cfg.treated_quantile > 0.0 && cfg.treated_quantile < 1.0, Errc::InvalidArgument,
          "treated quantile must lie in (0,1)");

  static const char* const countries[] = {"DE", "FR", "IT", "ES", "NL", "BE", "AT", "SE", "FI", "IE"};
  const auto n = static_cast<std::size_t>(cfg.n_banks);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> size(n);
  for (auto& s : size) s = std::exp(cfg.log_mean + cfg.log_sd * normal(rng));
  const double cut = quantile_type7(size, cfg.treated_quantile);
  const int base = cfg.years.front();

  std::vector<BankRecord> records;
  records.reserve(n * cfg.years.size());
  for (std::size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "BANK%04zu", i + 1);
    const bool treated = size[i] > cut;
    for (int year : cfg.years) {
      const double e = normal(rng);
      double a = size[i];
      if (year != base) {
        a *= std::exp(cfg.trend * (year - base) + cfg.noise_sd * e);
        if (treated && year >= cfg.shrink_year) a *= 1.0 - cfg.shrinkage;
      }
      records.push_back({id, year, a, countries[i % std::size(countries)], std::nullopt});
    }
  }
  return BankPanel(std::move(records));
}

LeaveOneOut leave_one_out(std::span<const double> assets, const ReconstructionConfig& cfg, unsigned threads) {
  require(assets.size() >= 4, Errc::TooSmall, "leave-one-out needs at least 4 banks");
  LeaveOneOut out;
  out.baseline = lambda2_for_assets(assets, cfg);
  out.lambda2.assign(assets.size(), 0.0);
  parallel_for(assets.size(), threads, [&](std::size_t k) {
    std::vector<double> rest;
    rest.reserve(assets.size() - 1);
    for (std::size_t i = 0; i < assets.size(); ++i) {
      if (i != k) rest.push_back(assets[i]);
    }
    out.lambda2[k] = lambda2_for_assets(rest, cfg);
  });
  for (std::size_t k = 0; k < assets.size(); ++k) {
    out.pct_change.push_back(100.0 * (out.lambda2[k] / out.baseline - 1.0));
    if (std::abs(out.pct_change.back()) > out.max_abs_pct) {
      out.max_abs_pct = std::abs(out.pct_change.back());
      out.worst_bank = k;
    }
  }
  return out;
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, Errc::InsufficientData, "slope needs at least 2 paired points");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  require(sxx > 0.0, Errc::ZeroVariance, "regressor has zero variance");
  return sxy / sxx;
}

}  // namespace clab
