#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "clab/error.hpp"
#include "clab/stats/bootstrap.hpp"
#include "clab/stats/chow.hpp"
#include "clab/stats/did.hpp"
#include "clab/stats/distfit.hpp"
#include "clab/stats/permutation.hpp"
#include "run_config.hpp"

namespace clab::cli {

namespace fs = std::filesystem;

namespace {

BankPanel load_input(const RunConfig& cfg) {
  require(!cfg.input.empty(), Errc::Usage, "--input is required");
  CsvSchema schema;
  schema.bank_id = cfg.col_bank;
  schema.year = cfg.col_year;
  schema.total_assets = cfg.col_assets;
  schema.delimiter = cfg.delimiter_char();
  BankPanel panel = load_panel_file(cfg.input, schema);
  for (int y : cfg.years) {
    if (!panel.has_year(y)) fail(Errc::YearAbsent, "year " + std::to_string(y) + " is not in " + cfg.input);
  }
  if (!cfg.years.empty()) panel = panel.select_years(cfg.years);
  if (cfg.balanced) panel = balanced_panel(panel);
  return panel;
}

void write_report(const RunConfig& cfg, Json results) {
  write_file_atomic(fs::path(cfg.output_dir) / (cfg.command + ".json"),
                    dump_json(envelope(cfg.command, cfg.to_json(), std::move(results))));
}

template <class Writer>
void write_csv(const RunConfig& cfg, const std::string& name, Writer&& writer) {
  std::ostringstream os;
  writer(os);
  write_file_atomic(fs::path(cfg.output_dir) / name, os.str());
}

int pick_year(const BankPanel& panel, int requested, bool latest) {
  if (requested != 0) {
    if (!panel.has_year(requested)) fail(Errc::YearAbsent, "year " + std::to_string(requested) + " is not in the panel");
    return requested;
  }
  return latest ? panel.years().back() : panel.years().front();
}

int cmd_analyze(const RunConfig& cfg) {
  const BankPanel panel = load_input(cfg);
  AnalysisConfig ac = cfg.analysis();
  ac.years.clear();
  ac.balanced = false;
  const AnalysisResult result = analyze_panel(panel, ac);
  Json results = to_json(result);

  std::optional<ChowResult> chow;
  if (cfg.break_year != 0) {
    std::map<int, double> series;
    for (const auto& y : result.years) series[y.year] = y.lambda2;
    chow = chow_test(series, cfg.break_year);
    results["chow"] = to_json(*chow);
  }
  write_report(cfg, std::move(results));
  write_csv(cfg, "analyze_years.csv", [&](std::ostream& os) { write_years_csv(os, result); });
  write_csv(cfg, "analyze_changes.csv", [&](std::ostream& os) { write_changes_csv(os, result); });
  if (cfg.write_exposures) {
    for (int y : panel.years()) {
      const YearSlice s = panel.year_slice(y);
      const ExposureMatrix X = reconstruct(s.assets, ac.recon, s.bank_ids);
      write_csv(cfg, "exposures_" + std::to_string(y) + ".csv", [&](std::ostream& os) { write_exposure_csv(os, X); });
    }
  }

  if (!cfg.trajectory_source.empty()) {
    require(cfg.time_points >= 2, Errc::Usage, "--time-points must be at least 2");
    require(cfg.horizon >= 0.0, Errc::Usage, "--horizon must be non-negative");
    for (int y : panel.years()) {
      const YearSlice s = panel.year_slice(y);
      const auto at = std::find(s.bank_ids.begin(), s.bank_ids.end(), cfg.trajectory_source);
      require(at != s.bank_ids.end(), Errc::Usage,
              "bank " + cfg.trajectory_source + " is not in year " + std::to_string(y));
      const CrossSection cs = analyze_cross_section(s.assets, ac.recon, s.bank_ids, ac.spectrum);
      const double gamma = ac.diffusion.D * cs.spectrum.lambda2 + ac.diffusion.kappa;
      require(cfg.horizon > 0.0 || gamma > 0.0, Errc::Usage, "--horizon needed when the decay rate is zero");
      const double end = cfg.horizon > 0.0 ? cfg.horizon : 5.0 / gamma;
      std::vector<double> times;
      for (int k = 0; k < cfg.time_points; ++k) times.push_back(end * k / (cfg.time_points - 1));
      DistressState u0;
      u0.u = Eigen::VectorXd::Zero(cs.network.size());
      u0.u(at - s.bank_ids.begin()) = 1.0;
      const auto states = DiffusionSolver(cs.network, ac.diffusion).trajectory(u0, times);
      write_csv(cfg, "trajectory_" + std::to_string(y) + ".csv",
                [&](std::ostream& os) { write_trajectory_csv(os, s.bank_ids, states); });
    }
  }

  if (cfg.table) {
    std::cout << table(result);
    if (chow) std::cout << '\n' << table(*chow);
  } else {
    for (const auto& y : result.years) {
      std::cout << y.year << ": lambda2 " << format_double(y.lambda2) << ", kappa_eff " << format_double(y.kappa_eff)
                << ", d* " << format_double(y.d_star) << '\n';
    }
  }
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  const BankPanel panel = load_input(cfg);
  AnalysisConfig ac = cfg.analysis();
  ac.years.clear();
  ac.balanced = false;
  SweepConfig sc;
  sc.rho_min = cfg.rho_min;
  sc.rho_max = cfg.rho_max;
  sc.steps = cfg.steps;
  sc.validate();
  const SweepResult result = ratio_sweep(panel, ac, sc);
  write_report(cfg, to_json(result));
  write_csv(cfg, "sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, result); });
  if (cfg.table) {
    std::cout << table(result);
  } else {
    for (std::size_t y = 0; y < result.scaling_exponent.size(); ++y) {
      std::cout << result.years[y] << ": scaling exponent " << format_double(result.scaling_exponent[y]) << '\n';
    }
    if (!result.pct_change.empty()) {
      std::cout << "change spread across rho: " << format_double(result.pct_change_spread) << " pp\n";
    }
  }
  return 0;
}

int cmd_bootstrap(const RunConfig& cfg) {
  const BankPanel panel = load_input(cfg);
  const ReconstructionConfig rc = cfg.reconstruction();
  BootstrapConfig bc;
  bc.B = cfg.B;
  bc.level = cfg.level;
  bc.seed = cfg.seed;
  bc.threads = cfg.thread_count();
  std::vector<int> years = cfg.year != 0 ? std::vector<int>{pick_year(panel, cfg.year, false)} : panel.years();

  Json results = Json::array();
  for (int y : years) {
    const YearSlice s = panel.year_slice(y);
    BootstrapResult b;
    try {
      b = bootstrap_lambda2(s.assets, rc, bc);
    } catch (const Error& e) {
      throw with_context(e, "year " + std::to_string(y));
    }
    Json entry = to_json(b);
    entry["year"] = y;
    results.push_back(std::move(entry));
    write_csv(cfg, "bootstrap_" + std::to_string(y) + ".csv",
              [&](std::ostream& os) { write_values_csv(os, "lambda2", b.replicates); });
    if (cfg.table) {
      std::cout << "Year " << y << '\n' << table(b);
    } else {
      std::cout << y << ": lambda2 " << format_double(b.point) << " [" << format_double(b.ci_low) << ", "
                << format_double(b.ci_high) << "] B_effective " << b.B_effective << '\n';
    }
  }
  write_report(cfg, std::move(results));
  return 0;
}

int cmd_permute(const RunConfig& cfg) {
  const BankPanel panel = load_input(cfg);
  const int a = pick_year(panel, cfg.year_a, false);
  const int b = pick_year(panel, cfg.year_b, true);
  const auto result = panel_permutation_test(panel, a, b, cfg.reconstruction(), cfg.n_perm, cfg.seed,
                                             cfg.thread_count());
  write_report(cfg, to_json(result));
  if (cfg.table) {
    std::cout << table(result);
  } else {
    std::cout << a << " vs " << b << ": T " << format_double(result.observed) << ", p "
              << format_double(result.p_value) << '\n';
  }
  return 0;
}

int cmd_placebo(const RunConfig& cfg) {
  const BankPanel panel = load_input(cfg);
  const int y = pick_year(panel, cfg.year, true);
  const YearSlice s = panel.year_slice(y);
  const CrossSection cs = analyze_cross_section(s.assets, cfg.reconstruction(), s.bank_ids);
  const PlaceboResult result = placebo_null(cs.network, cfg.draws, cfg.seed, cfg.thread_count());
  Json results = to_json(result);
  results["year"] = y;
  write_report(cfg, std::move(results));
  if (cfg.table) {
    std::cout << "Year " << y << '\n' << table(result);
  } else {
    std::cout << y << ": observed lambda2 " << format_double(result.observed) << ", percentile "
              << (result.ties_undefined ? std::string("tied") : format_double(result.percentile)) << '\n';
  }
  return 0;
}

std::map<std::string, std::map<std::string, double>> load_covariates(const std::string& path, char delimiter) {
  std::ifstream in(path);
  if (!in) fail(Errc::Io, "cannot open covariate file " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::MissingColumn, path + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_delimited(line, delimiter);
  require(!header.empty() && header[0] == "bank_id", Errc::MissingColumn, path + ": first column must be bank_id");
  std::map<std::string, std::map<std::string, double>> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_delimited(line, delimiter);
    require(cells.size() == header.size(), Errc::MalformedRow, path + ":" + std::to_string(line_no) + ": wrong field count");
    for (std::size_t c = 1; c < cells.size(); ++c) {
      try {
        out[header[c]][cells[0]] = std::stod(cells[c]);
      } catch (const std::exception&) {
        fail(Errc::MalformedRow, path + ":" + std::to_string(line_no) + ": '" + cells[c] + "' is not a number");
      }
    }
  }
  return out;
}

int cmd_did(const RunConfig& cfg) {
  const BankPanel panel = load_input(cfg);
  const int base = pick_year(panel, cfg.base_year, false);
  const TreatmentAssignment treatment = assign_treatment(panel, base, cfg.quantile);
  DidSpec spec;
  spec.post_years = cfg.post_years;
  spec.interactions = cfg.interactions;
  if (!cfg.interactions.empty()) {
    require(!cfg.covariates.empty(), Errc::Usage, "--interactions needs --covariates");
    spec.covariates = load_covariates(cfg.covariates, cfg.delimiter_char());
  }
  require(cfg.outcome == "log" || cfg.outcome == "level", Errc::Usage, "--outcome must be log or level");
  spec.log_outcome = cfg.outcome == "log";
  require(cfg.estimator == "within" || cfg.estimator == "dummy", Errc::Usage, "--estimator must be within or dummy");
  spec.estimator = cfg.estimator == "within" ? FeEstimator::Within : FeEstimator::Dummy;

  const DidResult result = did_regress(panel, treatment, spec);
  Json results = to_json(result);
  results["treatment"] = {{"base_year", base},
                          {"quantile", cfg.quantile},
                          {"threshold", treatment.threshold},
                          {"treated", treatment.treated_count()}};
  write_report(cfg, std::move(results));
  if (cfg.table) {
    std::cout << table(result);
  } else {
    for (const auto& t : result.terms) {
      std::cout << t << ": " << format_double(result.coefficients.at(t)) << " (SE "
                << format_double(result.clustered_se.at(t)) << ")\n";
    }
  }
  return 0;
}

int cmd_fit(const RunConfig& cfg) {
  std::vector<double> sample;
  if (cfg.year != 0) {
    const BankPanel panel = load_input(cfg);
    const int y = pick_year(panel, cfg.year, true);
    const YearSlice s = panel.year_slice(y);
    const CrossSection cs = analyze_cross_section(s.assets, cfg.reconstruction(), s.bank_ids);
    const Eigen::VectorXd deg = degree_sequence(cs.network, true);
    for (Eigen::Index i = 0; i < deg.size(); ++i) {
      if (deg(i) > 0.0) sample.push_back(deg(i));
    }
  } else {
    require(!cfg.input.empty(), Errc::Usage, "--input is required");
    std::ifstream in(cfg.input);
    if (!in) fail(Errc::Io, "cannot open input file " + cfg.input);
    sample = read_numeric_column(in, cfg.column, cfg.delimiter_char());
  }
  FitOptions opts;
  if (cfg.x_min > 0.0) opts.x_min = cfg.x_min;
  opts.scan_x_min = cfg.scan_xmin;
  const FitComparison result = fit_distributions(sample, opts);
  write_report(cfg, to_json(result));
  if (cfg.table) {
    std::cout << table(result);
  } else {
    std::cout << "alpha " << format_double(result.alpha_hat) << ", LR PL vs LN " << format_double(result.lr_pl_vs_ln)
              << ", p " << format_double(result.p_value) << '\n';
    std::cout << "Best Fit: " << result.best_fit << '\n';
  }
  return 0;
}

int cmd_synth(const RunConfig& cfg) {
  SynthConfig sc;
  sc.n_banks = cfg.n_banks;
  if (!cfg.years.empty()) sc.years = cfg.years;
  sc.seed = cfg.seed;
  sc.log_mean = cfg.log_mean;
  sc.log_sd = cfg.log_sd;
  sc.noise_sd = cfg.noise_sd;
  sc.trend = cfg.trend;
  sc.shrinkage = cfg.shrinkage;
  sc.shrink_year = cfg.shrink_year;
  sc.treated_quantile = cfg.quantile;
  const BankPanel panel = synth_panel(sc);
  const fs::path out = cfg.output.empty() ? fs::path(cfg.output_dir) / "synth_panel.csv" : fs::path(cfg.output);
  std::ostringstream os;
  write_panel_csv(os, panel);
  write_file_atomic(out, os.str());

  const TreatmentAssignment t = assign_treatment(panel, sc.years.front(), sc.treated_quantile);
  RunConfig echo = cfg;
  echo.years = sc.years;
  write_report(echo, Json{{"records", panel.size()},
                          {"banks", panel.bank_ids().size()},
                          {"years", panel.years()},
                          {"treated", t.treated_count()},
                          {"threshold", t.threshold}});
  std::cout << "wrote " << out.string() << " (" << panel.bank_ids().size() << " banks, " << panel.years().size()
            << " years, " << t.treated_count() << " treated)\n";
  return 0;
}

}  // namespace

int run_command(const RunConfig& cfg) {
  if (cfg.command == "analyze") return cmd_analyze(cfg);
  if (cfg.command == "sweep") return cmd_sweep(cfg);
  if (cfg.command == "bootstrap") return cmd_bootstrap(cfg);
  if (cfg.command == "permute") return cmd_permute(cfg);
  if (cfg.command == "placebo") return cmd_placebo(cfg);
  if (cfg.command == "did") return cmd_did(cfg);
  if (cfg.command == "fit") return cmd_fit(cfg);
  if (cfg.command == "synth") return cmd_synth(cfg);
  fail(Errc::Usage, "unknown command " + cfg.command);
}

}  // namespace clab::cli
