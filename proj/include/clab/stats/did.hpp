#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "clab/ingest.hpp"

namespace clab {

/// Long panel with regressors of interest; bank and year effects are implicit.
struct PanelDesign {
  std::vector<std::string> bank;
  std::vector<int> year;
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> names;
};

enum class FeEstimator { Within, Dummy };

struct RegressionResult {
  std::vector<std::string> names;
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  Eigen::VectorXd t_stat;
  Eigen::VectorXd p_value;
  double r_squared = 0.0;
  double within_r_squared = 0.0;
  double rss = 0.0;
  int n_obs = 0;
  int n_banks = 0;
  int n_years = 0;
  int n_params = 0;  // regressors + year effects + constant
  bool degenerate = false;
};

/// Two-way fixed-effects OLS with bank-clustered CR0 errors scaled by
/// G/(G-1) (N-1)/(N-K). Within and dummy estimators give the same coefficients.
RegressionResult twoway_fe(const PanelDesign& design, FeEstimator estimator = FeEstimator::Within);

struct DidSpec {
  /// Effect-period start years; Treated x Post_y is 1 for years >= y.
  /// Empty: every panel year after the base year.
  std::vector<int> post_years;
  /// Bank-level covariates interacted with Treated x Post and Post.
  std::vector<std::string> interactions;
  std::map<std::string, std::map<std::string, double>> covariates;
  bool log_outcome = true;
  FeEstimator estimator = FeEstimator::Within;
};

struct DidResult {
  std::vector<std::string> terms;
  std::map<std::string, double> coefficients;
  std::map<std::string, double> clustered_se;
  std::map<std::string, double> t_stats;
  std::map<std::string, double> p_values;
  double r_squared = 0.0;
  double within_r_squared = 0.0;
  int n_obs = 0;
  int n_banks = 0;
  int n_treated = 0;
  int n_params = 0;
  bool degenerate = false;
};

std::string post_term(int year);
std::string treated_post_term(int year);

/// Y_it = a_i + g_t + sum_y d_y Treated_i Post_y_t (+ interactions) + e_it,
/// clustered by bank. Banks missing from the treatment map are dropped.
DidResult did_regress(const BankPanel& panel, const TreatmentAssignment& treatment, const DidSpec& spec = {});

}  // namespace clab
