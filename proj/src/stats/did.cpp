#include "clab/stats/did.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "clab/error.hpp"

namespace clab {

namespace {

struct Groups {
  std::vector<int> bank;  // cluster index per row
  std::vector<int> year;  // year index per row
  int n_banks = 0;
  int n_years = 0;
};

Groups index_groups(const PanelDesign& d) {
  Groups g;
  std::unordered_map<std::string, int> bank_index;
  std::vector<int> years = d.year;
  std::sort(years.begin(), years.end());
  years.erase(std::unique(years.begin(), years.end()), years.end());
  for (std::size_t i = 0; i < d.bank.size(); ++i) {
    auto [it, inserted] = bank_index.emplace(d.bank[i], static_cast<int>(bank_index.size()));
    g.bank.push_back(it->second);
    g.year.push_back(static_cast<int>(std::lower_bound(years.begin(), years.end(), d.year[i]) - years.begin()));
  }
  g.n_banks = static_cast<int>(bank_index.size());
  g.n_years = static_cast<int>(years.size());
  return g;
}

Eigen::MatrixXd demean_by_bank(const Eigen::MatrixXd& M, const Groups& g) {
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(g.n_banks, M.cols());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(g.n_banks);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    sums.row(g.bank[static_cast<std::size_t>(i)]) += M.row(i);
    counts(g.bank[static_cast<std::size_t>(i)]) += 1.0;
  }
  Eigen::MatrixXd out = M;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    const int b = g.bank[static_cast<std::size_t>(i)];
    out.row(i) -= sums.row(b) / counts(b);
  }
  return out;
}

struct Ols {
  Eigen::VectorXd beta;
  Eigen::VectorXd resid;
};

Ols least_squares(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const std::vector<std::string>& names) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
  qr.setThreshold(1e-10);
  if (qr.rank() < Z.cols()) {
    std::string msg = "design has rank " + std::to_string(qr.rank()) + " < " + std::to_string(Z.cols()) +
                      " after absorbing fixed effects";
    if (!names.empty()) {
      msg += " (terms:";
      for (const auto& n : names) msg += " " + n;
      msg += ")";
    }
    fail(Errc::CollinearDesign, msg);
  }
  Ols out;
  out.beta = qr.solve(y);
  out.resid = y - Z * out.beta;
  return out;
}

}  // namespace

RegressionResult twoway_fe(const PanelDesign& d, FeEstimator estimator) {
  const auto N = static_cast<Eigen::Index>(d.y.size());
  require(d.X.rows() == N && static_cast<Eigen::Index>(d.bank.size()) == N &&
              static_cast<Eigen::Index>(d.year.size()) == N,
          Errc::DimensionMismatch, "panel design arrays differ in length");
  require(static_cast<Eigen::Index>(d.names.size()) == d.X.cols(), Errc::DimensionMismatch,
          "one name per regressor required");
  require(d.y.allFinite() && d.X.allFinite(), Errc::InvalidArgument, "design contains non-finite values");
  const Groups g = index_groups(d);
  require(g.n_banks >= 2, Errc::TooFewClusters, "clustered errors need at least 2 banks");
  require(g.n_years >= 2, Errc::InsufficientData, "panel needs at least 2 years");

  const Eigen::Index p = d.X.cols();
  const Eigen::Index T1 = g.n_years - 1;
  Eigen::MatrixXd year_dummies = Eigen::MatrixXd::Zero(N, T1);
  for (Eigen::Index i = 0; i < N; ++i) {
    const int t = g.year[static_cast<std::size_t>(i)];
    if (t > 0) year_dummies(i, t - 1) = 1.0;
  }

  Eigen::MatrixXd Z;
  Eigen::VectorXd y;
  if (estimator == FeEstimator::Within) {
    Eigen::MatrixXd raw(N, p + T1);
    raw << d.X, year_dummies;
    Z = demean_by_bank(raw, g);
    y = demean_by_bank(d.y, g);
  } else {
    Z = Eigen::MatrixXd::Zero(N, p + T1 + g.n_banks);
    Z.leftCols(p) = d.X;
    Z.middleCols(p, T1) = year_dummies;
    for (Eigen::Index i = 0; i < N; ++i) Z(i, p + T1 + g.bank[static_cast<std::size_t>(i)]) = 1.0;
    y = d.y;
  }
  const Ols fit = least_squares(Z, y, d.names);

  RegressionResult out;
  out.names = d.names;
  out.n_obs = static_cast<int>(N);
  out.n_banks = g.n_banks;
  out.n_years = g.n_years;
  out.n_params = static_cast<int>(p + T1 + 1);
  require(N > out.n_params, Errc::InsufficientData, "fewer observations than parameters");
  out.coef = fit.beta.head(p);
  out.rss = fit.resid.squaredNorm();

  // Cluster-robust sandwich. Bank effects are nested in the clusters, so they
  // are not counted in K and their score blocks vanish.
  const Eigen::MatrixXd bread = (Z.transpose() * Z).ldlt().solve(Eigen::MatrixXd::Identity(Z.cols(), Z.cols()));
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(g.n_banks, Z.cols());
  for (Eigen::Index i = 0; i < N; ++i) {
    scores.row(g.bank[static_cast<std::size_t>(i)]) += Z.row(i) * fit.resid(i);
  }
  const double G = g.n_banks;
  const double c = G / (G - 1.0) * (static_cast<double>(N) - 1.0) / static_cast<double>(N - out.n_params);
  const Eigen::MatrixXd V = c * bread * (scores.transpose() * scores) * bread;

  const boost::math::students_t tdist(G - 1.0);
  out.se.resize(p);
  out.t_stat.resize(p);
  out.p_value.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    out.se(j) = std::sqrt(std::max(0.0, V(j, j)));
    if (out.se(j) <= 1e-10 * std::max(1.0, std::abs(out.coef(j)))) {
      out.degenerate = true;
      out.t_stat(j) = std::numeric_limits<double>::quiet_NaN();
      out.p_value(j) = std::numeric_limits<double>::quiet_NaN();
    } else {
      out.t_stat(j) = out.coef(j) / out.se(j);
      out.p_value(j) = 2.0 * boost::math::cdf(boost::math::complement(tdist, std::abs(out.t_stat(j))));
    }
  }

  const double tss = (d.y.array() - d.y.mean()).square().sum();
  out.r_squared = tss > 0.0 ? std::clamp(1.0 - out.rss / tss, 0.0, 1.0) : 0.0;
  // Within R^2 relative to the fixed-effects-only model.
  const Eigen::MatrixXd Dw = demean_by_bank(year_dummies, g);
  const Eigen::VectorXd yw = demean_by_bank(d.y, g);
  const Eigen::VectorXd fe_resid = yw - Dw * Dw.colPivHouseholderQr().solve(yw);
  const double fe_rss = fe_resid.squaredNorm();
  out.within_r_squared = fe_rss > 0.0 ? std::clamp(1.0 - out.rss / fe_rss, 0.0, 1.0) : 0.0;
  return out;
}

std::string post_term(int year) { return "post" + std::to_string(year); }
std::string treated_post_term(int year) { return "treated_x_post" + std::to_string(year); }

DidResult did_regress(const BankPanel& panel, const TreatmentAssignment& treatment, const DidSpec& spec) {
  const auto& years = panel.years();
  require(years.size() >= 2, Errc::InsufficientData, "DID needs at least 2 years");
  std::vector<int> post = spec.post_years;
  if (post.empty()) {
    for (int y : years) {
      if (y > treatment.base_year) post.push_back(y);
    }
  }
  require(!post.empty(), Errc::InsufficientData, "no post-treatment years after the base year");
  std::sort(post.begin(), post.end());
  for (int y : post) {
    require(y > years.front() && y <= years.back(), Errc::InvalidArgument,
            "post year " + std::to_string(y) + " outside the panel's post-base range");
  }

  PanelDesign d;
  for (int y : post) d.names.push_back(treated_post_term(y));
  for (const auto& c : spec.interactions) {
    require(spec.covariates.count(c) > 0, Errc::InvalidArgument, "no values for covariate '" + c + "'");
    for (int y : post) {
      d.names.push_back(treated_post_term(y) + "_x_" + c);
      d.names.push_back(post_term(y) + "_x_" + c);
    }
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> ys;
  std::map<std::string, bool> present;
  for (const auto& r : panel.records()) {
    const auto it = treatment.treated.find(r.bank_id);
    if (it == treatment.treated.end()) continue;
    const double treated = it->second ? 1.0 : 0.0;
    double outcome = r.total_assets;
    if (spec.log_outcome) {
      require(r.total_assets > 0.0, Errc::InvalidArgument,
              "log outcome needs positive assets (" + r.bank_id + ", " + std::to_string(r.year) + ")");
      outcome = std::log(r.total_assets);
    }
    std::vector<double> x;
    for (int y : post) x.push_back(treated * (r.year >= y ? 1.0 : 0.0));
    for (const auto& c : spec.interactions) {
      const auto& values = spec.covariates.at(c);
      const auto v = values.find(r.bank_id);
      require(v != values.end(), Errc::InvalidArgument, "covariate '" + c + "' missing for bank " + r.bank_id);
      for (int y : post) {
        const double p = r.year >= y ? 1.0 : 0.0;
        x.push_back(treated * p * v->second);
        x.push_back(p * v->second);
      }
    }
    present[r.bank_id] = it->second;
    d.bank.push_back(r.bank_id);
    d.year.push_back(r.year);
    ys.push_back(outcome);
    rows.push_back(std::move(x));
  }
  int treated_banks = 0, control_banks = 0;
  for (const auto& [bank, is_treated] : present) (is_treated ? treated_banks : control_banks)++;
  require(treated_banks >= 1 && control_banks >= 1, Errc::InsufficientData,
          "DID needs treated and control banks (treated " + std::to_string(treated_banks) + ", control " +
              std::to_string(control_banks) + ")");

  d.y = Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  d.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d.names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }

  const RegressionResult fit = twoway_fe(d, spec.estimator);
  DidResult out;
  out.terms = fit.names;
  for (std::size_t j = 0; j < fit.names.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    out.coefficients[fit.names[j]] = fit.coef(k);
    out.clustered_se[fit.names[j]] = fit.se(k);
    out.t_stats[fit.names[j]] = fit.t_stat(k);
    out.p_values[fit.names[j]] = fit.p_value(k);
  }
  out.r_squared = fit.r_squared;
  out.within_r_squared = fit.within_r_squared;
  out.n_obs = fit.n_obs;
  out.n_banks = fit.n_banks;
  out.n_treated = treated_banks;
  out.n_params = fit.n_params;
  out.degenerate = fit.degenerate;
  return out;
}

}  // namespace clab
