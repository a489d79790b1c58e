#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "clab/pipeline.hpp"
#include "clab/report.hpp"

namespace CLI {
class App;
class Option;
}  // namespace CLI

namespace clab::cli {

inline constexpr const char* kOutputDirEnv = "CONTAGION_LAB_OUTPUT_DIR";

/// Every setting a subcommand can take. Precedence: flags, then the output
/// directory environment variable, then the JSON config file, then defaults.
struct RunConfig {
  std::string command;
  std::string input;
  std::string config_path;
  std::string output_dir = ".";
  std::vector<int> years;
  bool balanced = false;
  std::string delimiter = ",";
  std::string col_bank = "bank_id";
  std::string col_year = "year";
  std::string col_assets = "total_assets";
  unsigned threads = 0;  // 0: hardware concurrency
  bool table = false;

  // reconstruction
  std::string method = "maxent";
  std::string ratio_kind = "fixed";
  double rho = 0.05;
  double rho_large = 0.03;
  double rho_small = 0.07;
  double size_quantile = 0.75;
  double intercept = 0.08;
  double slope = -0.03;
  std::vector<double> tier_quantiles{0.95, 0.75};
  std::vector<double> tier_ratios{0.02, 0.05, 0.08};
  double fitness_alpha = 1.0;
  double epsilon = 1.0;

  // contagion
  double D = 1.0;
  double kappa = 0.0;
  double critical_epsilon = 0.1;
  int break_year = 0;
  bool write_exposures = false;
  std::string trajectory_source;  // bank id of a unit shock; empty: no trajectory output
  double horizon = 0.0;           // 0: 5 / gamma of each year
  int time_points = 21;

  // sweep
  double rho_min = 0.01;
  double rho_max = 0.10;
  int steps = 10;

  // resampling
  std::uint64_t seed = 42;
  int B = 100;
  double level = 0.95;
  int year = 0;
  int year_a = 0;
  int year_b = 0;
  int n_perm = 1000;
  int draws = 1000;

  // did
  int base_year = 0;
  double quantile = 0.75;
  std::vector<int> post_years;
  std::vector<std::string> interactions;
  std::string covariates;
  std::string outcome = "log";
  std::string estimator = "within";

  // fit
  std::string column;
  double x_min = 0.0;  // 0: sample minimum
  bool scan_xmin = false;

  // synth
  int n_banks = 70;
  double log_mean = 11.5;
  double log_sd = 1.2;
  double noise_sd = 0.05;
  double trend = 0.0;
  double shrinkage = 0.0;
  int shrink_year = 2021;
  std::string output;

  ReconstructionConfig reconstruction() const;
  DiffusionParams diffusion() const;
  AnalysisConfig analysis() const;
  unsigned thread_count() const;
  char delimiter_char() const;
  /// Resolved settings echoed into reports (paths to outputs excluded).
  Json to_json() const;
};

/// Builds the CLI11 application; `finalize` must run after a successful parse.
class Parser {
 public:
  explicit Parser(RunConfig& cfg);
  ~Parser();
  CLI::App& app();
  /// Applies config-file and environment values to options not given as flags
  /// and validates the output directory.
  void finalize();

 private:
  struct Binding {
    CLI::App* sub;
    CLI::Option* option;
    std::string key;
    std::function<void(const Json&)> assign;
  };
  RunConfig& cfg_;
  std::unique_ptr<CLI::App> app_;
  std::vector<Binding> bindings_;

  template <class T>
  void bind(CLI::App* sub, const std::string& flag, T& field, const std::string& help);
  void add_common(CLI::App* sub, bool panel_input);
  void add_reconstruction(CLI::App* sub);
};

int run_command(const RunConfig& cfg);

}  // namespace clab::cli
