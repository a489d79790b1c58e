#include "run_config.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "clab/error.hpp"

namespace clab::cli {

ReconstructionConfig RunConfig::reconstruction() const {
  ReconstructionConfig rc;
  rc.method = parse_method(method);
  switch (parse_ratio_kind(ratio_kind)) {
    case RatioKind::Fixed:
      rc.ratio_rule = RatioRule::fixed_ratio(rho);
      break;
    case RatioKind::SizeThreshold:
      rc.ratio_rule = RatioRule::size_threshold(rho_large, rho_small, size_quantile);
      break;
    case RatioKind::LinearLog:
      rc.ratio_rule = RatioRule::linear_log(intercept, slope);
      break;
    case RatioKind::Tiered:
      rc.ratio_rule = RatioRule::tiered(tier_quantiles, tier_ratios);
      break;
  }
  rc.fitness_alpha = fitness_alpha;
  rc.min_edge_threshold = epsilon;
  rc.validate();
  return rc;
}

DiffusionParams RunConfig::diffusion() const {
  DiffusionParams p;
  p.D = D;
  p.kappa = kappa;
  p.validate();
  return p;
}

AnalysisConfig RunConfig::analysis() const {
  AnalysisConfig a;
  a.recon = reconstruction();
  a.diffusion = diffusion();
  a.critical_epsilon = critical_epsilon;
  a.years = years;
  a.balanced = balanced;
  a.threads = thread_count();
  return a;
}

unsigned RunConfig::thread_count() const {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

char RunConfig::delimiter_char() const {
  if (delimiter == "\\t" || delimiter == "tab") return '\t';
  require(delimiter.size() == 1, Errc::Usage, "delimiter must be a single character");
  return delimiter[0];
}

Json RunConfig::to_json() const {
  Json j;
  j["input"] = input;
  j["years"] = years;
  j["balanced"] = balanced;
  if (command == "synth") {
    j["n_banks"] = n_banks;
    j["seed"] = seed;
    j["log_mean"] = log_mean;
    j["log_sd"] = log_sd;
    j["noise_sd"] = noise_sd;
    j["trend"] = trend;
    j["shrinkage"] = shrinkage;
    j["shrink_year"] = shrink_year;
    j["quantile"] = quantile;
    j.erase("input");
    j.erase("balanced");
    return j;
  }
  if (command == "fit") {
    j["column"] = column;
    j["x_min"] = x_min;
    j["scan_xmin"] = scan_xmin;
    if (year == 0) return j;
  }
  j["reconstruction"] = clab::to_json(reconstruction());
  if (command == "analyze") {
    j["diffusion"] = clab::to_json(diffusion());
    j["critical_epsilon"] = critical_epsilon;
    j["break_year"] = break_year;
    if (!trajectory_source.empty()) {
      j["trajectory_source"] = trajectory_source;
      j["horizon"] = horizon;
      j["time_points"] = time_points;
    }
  } else if (command == "sweep") {
    j["rho_min"] = rho_min;
    j["rho_max"] = rho_max;
    j["steps"] = steps;
  } else if (command == "bootstrap") {
    j["B"] = B;
    j["level"] = level;
    j["seed"] = seed;
    j["year"] = year;
  } else if (command == "permute") {
    j["year_a"] = year_a;
    j["year_b"] = year_b;
    j["n_perm"] = n_perm;
    j["seed"] = seed;
  } else if (command == "placebo") {
    j["year"] = year;
    j["draws"] = draws;
    j["seed"] = seed;
  } else if (command == "did") {
    j.erase("reconstruction");
    j["base_year"] = base_year;
    j["quantile"] = quantile;
    j["post_years"] = post_years;
    j["interactions"] = interactions;
    j["covariates"] = covariates;
    j["outcome"] = outcome;
    j["estimator"] = estimator;
  } else if (command == "fit") {
    j["year"] = year;
  }
  return j;
}

namespace {

std::string key_of(const std::string& flag) {
  std::string k = flag.substr(flag.find_first_not_of('-'));
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

}  // namespace

Parser::Parser(RunConfig& cfg) : cfg_(cfg), app_(std::make_unique<CLI::App>()) {
  auto& app = *app_;
  app.name("contagion-lab");
  app.description("Interbank network reconstruction, spectral connectivity and contagion statistics");
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Per-year reconstruction, spectrum, contagion parameters and topology");
  add_common(analyze, true);
  add_reconstruction(analyze);
  bind(analyze, "--D", cfg_.D, "Diffusion coefficient");
  bind(analyze, "--kappa", cfg_.kappa, "Intrinsic decay rate");
  bind(analyze, "--critical-epsilon", cfg_.critical_epsilon, "Distress fraction defining the critical distance");
  bind(analyze, "--break-year", cfg_.break_year, "Run a Chow test on the lambda2 series at this year");
  bind(analyze, "--write-exposures", cfg_.write_exposures, "Write each year's exposure matrix as CSV");
  bind(analyze, "--trajectory-source", cfg_.trajectory_source,
       "Bank id hit by a unit shock; writes trajectory_<year>.csv (node,t,u)");
  bind(analyze, "--horizon", cfg_.horizon, "Trajectory end time (default 5 / (D lambda2 + kappa))");
  bind(analyze, "--time-points", cfg_.time_points, "Evenly spaced trajectory times including 0");

  auto* sweep = app.add_subcommand("sweep", "Lambda2 over a grid of fixed interbank ratios");
  add_common(sweep, true);
  add_reconstruction(sweep);
  bind(sweep, "--rho-min", cfg_.rho_min, "Smallest ratio");
  bind(sweep, "--rho-max", cfg_.rho_max, "Largest ratio");
  bind(sweep, "--steps", cfg_.steps, "Grid points");

  auto* boot = app.add_subcommand("bootstrap", "Bank-resampling bootstrap of lambda2");
  add_common(boot, true);
  add_reconstruction(boot);
  bind(boot, "--B", cfg_.B, "Replicates");
  bind(boot, "--level", cfg_.level, "Confidence level");
  bind(boot, "--seed", cfg_.seed, "Master seed");
  bind(boot, "--year", cfg_.year, "Single year (default: every selected year)");

  auto* perm = app.add_subcommand("permute", "Year-label permutation test on the lambda2 difference");
  add_common(perm, true);
  add_reconstruction(perm);
  bind(perm, "--year-a", cfg_.year_a, "First year (default: earliest)");
  bind(perm, "--year-b", cfg_.year_b, "Second year (default: latest)");
  bind(perm, "--n-perm", cfg_.n_perm, "Permutations");
  bind(perm, "--seed", cfg_.seed, "Master seed");

  auto* placebo = app.add_subcommand("placebo", "Lambda2 null under shuffled edge weights");
  add_common(placebo, true);
  add_reconstruction(placebo);
  bind(placebo, "--year", cfg_.year, "Year (default: latest)");
  bind(placebo, "--draws", cfg_.draws, "Null draws");
  bind(placebo, "--seed", cfg_.seed, "Master seed");

  auto* did = app.add_subcommand("did", "Two-way fixed-effects difference-in-differences on bank assets");
  add_common(did, true);
  bind(did, "--base-year", cfg_.base_year, "Treatment assignment year (default: earliest)");
  bind(did, "--quantile", cfg_.quantile, "Treated: base-year assets above this quantile");
  bind(did, "--post-years", cfg_.post_years, "Effect-period start years (default: every year after the base)");
  bind(did, "--interactions", cfg_.interactions, "Covariate names for triple interactions");
  bind(did, "--covariates", cfg_.covariates, "CSV with bank_id and covariate columns");
  bind(did, "--outcome", cfg_.outcome, "log or level");
  bind(did, "--estimator", cfg_.estimator, "within or dummy");

  auto* fit = app.add_subcommand("fit", "Power-law, lognormal and exponential fits with likelihood-ratio tests");
  add_common(fit, false);
  add_reconstruction(fit);
  bind(fit, "--column", cfg_.column, "Numeric column (default: first)");
  bind(fit, "--x-min", cfg_.x_min, "Lower cutoff (default: sample minimum)");
  bind(fit, "--scan-xmin", cfg_.scan_xmin, "Choose x_min by minimising the power-law KS distance");
  bind(fit, "--year", cfg_.year, "Treat the input as a panel and fit this year's network degrees");

  auto* synth = app.add_subcommand("synth", "Write a synthetic lognormal bank panel");
  bind(synth, "--config", cfg_.config_path, "JSON config file");
  bind(synth, "--output-dir", cfg_.output_dir, "Directory for reports");
  bind(synth, "--output", cfg_.output, "Panel CSV path (default: <output-dir>/synth_panel.csv)");
  bind(synth, "--n-banks", cfg_.n_banks, "Banks");
  bind(synth, "--years", cfg_.years, "Years (default: 2018 2021 2023)");
  bind(synth, "--seed", cfg_.seed, "Seed");
  bind(synth, "--log-mean", cfg_.log_mean, "Mean of log assets");
  bind(synth, "--log-sd", cfg_.log_sd, "Standard deviation of log assets");
  bind(synth, "--noise-sd", cfg_.noise_sd, "Bank-year log noise after the base year");
  bind(synth, "--trend", cfg_.trend, "Common log growth per year");
  bind(synth, "--shrinkage", cfg_.shrinkage, "Treated-bank asset cut from the shrink year on");
  bind(synth, "--shrink-year", cfg_.shrink_year, "First year of the treated-bank cut");
  bind(synth, "--quantile", cfg_.quantile, "Treated: base-year size above this quantile");
  bind(synth, "--table", cfg_.table, "Print a plain-text summary");
}

Parser::~Parser() = default;

CLI::App& Parser::app() { return *app_; }

template <class T>
void Parser::bind(CLI::App* sub, const std::string& flag, T& field, const std::string& help) {
  CLI::Option* opt = nullptr;
  if constexpr (std::is_same_v<T, bool>) {
    opt = sub->add_flag(flag, field, help);
  } else if constexpr (std::is_same_v<T, std::vector<int>> || std::is_same_v<T, std::vector<double>> ||
                       std::is_same_v<T, std::vector<std::string>>) {
    opt = sub->add_option(flag, field, help)->delimiter(',');
  } else {
    opt = sub->add_option(flag, field, help);
  }
  const std::string key = key_of(flag);
  bindings_.push_back({sub, opt, key, [&field, flag](const Json& j) {
                         try {
                           field = j.get<T>();
                         } catch (const nlohmann::json::exception&) {
                           fail(Errc::Usage, "config value for " + flag + " has the wrong type");
                         }
                       }});
}

void Parser::add_common(CLI::App* sub, bool panel_input) {
  bind(sub, "--input", cfg_.input, panel_input ? "Bank panel CSV" : "CSV with a numeric column");
  bind(sub, "--config", cfg_.config_path, "JSON config file");
  bind(sub, "--output-dir", cfg_.output_dir, "Directory for reports");
  bind(sub, "--years", cfg_.years, "Years to analyse (default: all)");
  bind(sub, "--balanced", cfg_.balanced, "Keep only banks present in every selected year");
  bind(sub, "--delimiter", cfg_.delimiter, "CSV delimiter");
  bind(sub, "--col-bank", cfg_.col_bank, "Bank id column");
  bind(sub, "--col-year", cfg_.col_year, "Year column");
  bind(sub, "--col-assets", cfg_.col_assets, "Total assets column");
  bind(sub, "--threads", cfg_.threads, "Worker threads (0: all cores)");
  bind(sub, "--table", cfg_.table, "Print plain-text tables");
}

void Parser::add_reconstruction(CLI::App* sub) {
  bind(sub, "--method", cfg_.method, "maxent, kde, fitness or mindensity");
  bind(sub, "--ratio-kind", cfg_.ratio_kind, "fixed, size, linearlog or tiered");
  bind(sub, "--rho", cfg_.rho, "Fixed interbank ratio");
  bind(sub, "--rho-large", cfg_.rho_large, "Ratio for large banks (size rule)");
  bind(sub, "--rho-small", cfg_.rho_small, "Ratio for small banks (size rule)");
  bind(sub, "--size-quantile", cfg_.size_quantile, "Size cutoff quantile (size rule)");
  bind(sub, "--intercept", cfg_.intercept, "Intercept (linearlog rule)");
  bind(sub, "--slope", cfg_.slope, "Slope (linearlog rule)");
  bind(sub, "--tier-quantiles", cfg_.tier_quantiles, "Descending cutoffs (tiered rule)");
  bind(sub, "--tier-ratios", cfg_.tier_ratios, "Ratios per tier (tiered rule)");
  bind(sub, "--fitness-alpha", cfg_.fitness_alpha, "Fitness exponent");
  bind(sub, "--epsilon", cfg_.epsilon, "Edge threshold on symmetric exposures");
}

void Parser::finalize() {
  CLI::App* active = nullptr;
  for (auto* sub : app_->get_subcommands()) active = sub;
  require(active != nullptr, Errc::Usage, "no subcommand given");
  cfg_.command = active->get_name();

  if (!cfg_.config_path.empty()) {
    std::ifstream in(cfg_.config_path);
    if (!in) fail(Errc::Io, "cannot open config file " + cfg_.config_path);
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::Usage, "config file " + cfg_.config_path + " is not valid JSON: " + e.what());
    }
    require(doc.is_object(), Errc::Usage, "config file must hold a JSON object");
    for (const auto& b : bindings_) {
      if (b.sub != active || b.option->count() > 0 || b.key == "config") continue;
      if (doc.contains(b.key)) b.assign(doc[b.key]);
    }
  }

  bool output_flag = false;
  for (const auto& b : bindings_) {
    if (b.sub == active && b.key == "output_dir" && b.option->count() > 0) output_flag = true;
  }
  if (!output_flag) {
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) cfg_.output_dir = env;
  }

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg_.output_dir, ec);
  if (!fs::is_directory(cfg_.output_dir)) fail(Errc::Io, "cannot create output directory " + cfg_.output_dir);
  const fs::path probe = fs::path(cfg_.output_dir) / ".contagion-lab-probe";
  {
    std::ofstream out(probe);
    if (!out) fail(Errc::Io, "output directory " + cfg_.output_dir + " is not writable");
  }
  fs::remove(probe, ec);
}

}  // namespace clab::cli
