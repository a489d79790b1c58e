#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "clab/error.hpp"
#include "clab/network.hpp"
#include "clab/spectrum.hpp"
#include "clab/stats/bootstrap.hpp"
#include "clab/stats/chow.hpp"
#include "clab/stats/correlation.hpp"
#include "clab/stats/did.hpp"
#include "clab/stats/distfit.hpp"
#include "clab/stats/permutation.hpp"
#include "oracles.hpp"

using namespace clab;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::Usage;
}

BankPanel panel_of(const std::vector<std::tuple<std::string, int, double>>& rows) {
  std::vector<BankRecord> recs;
  for (const auto& [id, y, a] : rows) recs.push_back({id, y, a, std::nullopt, std::nullopt});
  return BankPanel(recs);
}

}  // namespace

TEST_CASE("percentile interval picks order statistics") {
  std::vector<double> r(100);
  std::iota(r.begin(), r.end(), 1.0);
  std::shuffle(r.begin(), r.end(), std::mt19937_64(1));
  const auto [lo, hi] = percentile_interval(r, 0.95);
  CHECK(lo == 3.0);
  CHECK(hi == 98.0);
  const auto [lo90, hi90] = percentile_interval(r, 0.90);
  CHECK(lo90 >= lo);
  CHECK(hi90 <= hi);
  CHECK(code_of([] { percentile_interval({}, 0.9); }) == Errc::InsufficientData);
}

TEST_CASE("bootstrap of identical banks has zero width") {
  const std::vector<double> assets(6, 500.0);
  ReconstructionConfig recon;
  recon.min_edge_threshold = 0.0;
  BootstrapConfig cfg;
  cfg.B = 20;
  const auto r = bootstrap_lambda2(assets, recon, cfg);
  CHECK(r.B_effective == 20);
  for (double x : r.replicates) CHECK(x == doctest::Approx(r.point).epsilon(1e-12));
  CHECK(r.ci_high - r.ci_low <= 1e-9 * r.point);
  cfg.B = 5;
  CHECK(code_of([&] { bootstrap_lambda2(assets, recon, cfg); }) == Errc::InvalidArgument);
  cfg.B = 20;
  const std::vector<double> two{1.0, 2.0};
  CHECK(code_of([&] { bootstrap_lambda2(two, recon, cfg); }) == Errc::TooSmall);
}

TEST_CASE("bootstrap is reproducible across runs and thread counts") {
  std::mt19937_64 rng(8);
  std::lognormal_distribution<double> size(6.0, 1.0);
  std::vector<double> assets(25);
  for (auto& a : assets) a = size(rng);
  ReconstructionConfig recon;
  recon.min_edge_threshold = 0.0;
  BootstrapConfig cfg;
  cfg.B = 40;
  cfg.seed = 2024;
  const auto a = bootstrap_lambda2(assets, recon, cfg);
  const auto b = bootstrap_lambda2(assets, recon, cfg);
  cfg.threads = 4;
  const auto c = bootstrap_lambda2(assets, recon, cfg);
  CHECK(a.replicates == b.replicates);
  CHECK(a.replicates == c.replicates);
  CHECK(a.ci_low <= a.median());
  CHECK(a.median() <= a.ci_high);
  cfg.seed = 2025;
  CHECK(bootstrap_lambda2(assets, recon, cfg).replicates != a.replicates);

  cfg.level = 0.5;
  const auto narrow = bootstrap_lambda2(assets, recon, cfg);
  cfg.level = 0.99;
  const auto wide = bootstrap_lambda2(assets, recon, cfg);
  CHECK(wide.ci_low <= narrow.ci_low);
  CHECK(wide.ci_high >= narrow.ci_high);
}

TEST_CASE("generic bootstrap logs skipped replicates") {
  BootstrapConfig cfg;
  cfg.B = 30;
  const auto r = bootstrap(5, 0.0, [](std::span<const std::size_t> idx) -> std::optional<double> {
    if (idx[0] == 0) return std::nullopt;
    if (idx[0] == 1) fail(Errc::ZeroTotal, "DegenerateReplicate");
    return static_cast<double>(idx[0]);
  }, cfg);
  CHECK(r.B_effective + static_cast<int>(r.skipped.size()) == 30);
  CHECK_FALSE(r.skipped.empty());
  for (const auto& s : r.skipped) CHECK_FALSE(s.reason.empty());
}

TEST_CASE("permutation test hand cases") {
  const std::vector<double> lo{0, 0, 0}, hi{10, 10, 10};
  const auto ex = permutation_test(lo, hi, 1000, 1);
  CHECK(ex.exhaustive);
  CHECK(ex.evaluated == 19);
  CHECK(ex.p_value == doctest::Approx(2.0 / 21.0));
  CHECK(ex.observed == -10.0);

  const std::vector<double> same{1, 2, 3, 4, 5, 6, 7, 8};
  const auto eq = permutation_test(same, same, 200, 3);
  CHECK_FALSE(eq.exhaustive);
  CHECK(eq.p_value == 1.0);

  const auto r1 = permutation_test(lo, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9}, 50, 77);
  const auto r2 = permutation_test(lo, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9}, 50, 77, 3);
  CHECK_FALSE(r1.exhaustive);
  CHECK(r1.p_value == r2.p_value);
  CHECK(r1.p_value * 51 == doctest::Approx(std::round(r1.p_value * 51)));
  CHECK(code_of([&] { permutation_test({}, lo, 10, 1); }) == Errc::InsufficientData);
}

TEST_CASE("permutation p-values are not anti-conservative under the null") {
  std::mt19937_64 rng(606);
  std::normal_distribution<double> z;
  int rejections = 0;
  constexpr int sims = 200;
  for (int s = 0; s < sims; ++s) {
    std::vector<double> a(12), b(12);
    for (auto& x : a) x = z(rng);
    for (auto& x : b) x = z(rng);
    if (permutation_test(a, b, 199, static_cast<std::uint64_t>(s)).p_value <= 0.05) ++rejections;
  }
  CHECK(rejections <= 0.09 * sims);
}

TEST_CASE("panel permutation") {
  std::vector<std::tuple<std::string, int, double>> rows;
  for (int i = 0; i < 8; ++i) {
    rows.emplace_back("B" + std::to_string(i), 2018, 100.0 + 10 * i);
    rows.emplace_back("B" + std::to_string(i), 2023, 100.0 + 10 * i);
  }
  rows.emplace_back("X", 2018, 40.0);
  const auto panel = panel_of(rows);
  ReconstructionConfig recon;
  recon.min_edge_threshold = 0.0;
  const auto r = panel_permutation_test(panel, 2018, 2023, recon, 30, 5);
  CHECK(r.swappable_banks == 8);
  CHECK(r.null.size() == 30);
  const auto r2 = panel_permutation_test(panel, 2018, 2023, recon, 30, 5, 4);
  CHECK(r.null == r2.null);
  CHECK(r.p_value == r2.p_value);
  CHECK(r.p_value > 0.0);
  CHECK(r.p_value <= 1.0);
  CHECK(code_of([&] { panel_permutation_test(panel, 2018, 2018, recon, 10, 1); }) == Errc::InvalidArgument);
}

TEST_CASE("placebo null") {
  const auto flat = placebo_null(graphs::complete(5, 2.0), 20, 1);
  CHECK(flat.ties_undefined);
  for (double x : flat.null) CHECK(x == doctest::Approx(flat.observed));

  // Path with weights {1, 9}: exactly two configurations, which are mirror
  // images with the same spectrum.
  MatrixXd W = MatrixXd::Zero(3, 3);
  W(0, 1) = W(1, 0) = 1.0;
  W(1, 2) = W(2, 1) = 9.0;
  const WeightedNetwork net(W);
  MatrixXd swapped = MatrixXd::Zero(3, 3);
  swapped(0, 1) = swapped(1, 0) = 9.0;
  swapped(1, 2) = swapped(2, 1) = 1.0;
  const double l_obs = laplacian_spectrum(net).lambda2;
  const double l_swap = laplacian_spectrum(WeightedNetwork(swapped)).lambda2;
  const auto p = placebo_null(net, 50, 9);
  for (double x : p.null) {
    const bool one_of = std::abs(x - l_obs) < 1e-9 || std::abs(x - l_swap) < 1e-9;
    CHECK(one_of);
  }

  // Star hub plus one extra edge: the two weight layouts differ.
  MatrixXd S = MatrixXd::Zero(4, 4);
  S(0, 1) = S(1, 0) = 1.0;
  S(0, 2) = S(2, 0) = 1.0;
  S(0, 3) = S(3, 0) = 9.0;
  const auto q = placebo_null(WeightedNetwork(S), 200, 4);
  const auto q2 = placebo_null(WeightedNetwork(S), 200, 4, 3);
  CHECK(q.null == q2.null);
  CHECK(q.percentile >= 0.0);
  CHECK(q.percentile <= 100.0);
  CHECK(code_of([] { placebo_null(graphs::complete(2), 10, 1); }) == Errc::TooSmall);
}

TEST_CASE("power-law MLE") {
  const std::vector<double> x{2, 4, 8};
  CHECK(power_law_alpha(x, 2.0) == doctest::Approx(1.0 + 1.0 / std::log(2.0)).epsilon(1e-14));
  CHECK(power_law_alpha(x, 2.0) == doctest::Approx(2.4427).epsilon(1e-4));

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double alpha : {1.8, 2.5, 3.2}) {
    std::vector<double> s(10000);
    for (auto& v : s) v = 1.5 * std::pow(1.0 - u(rng), -1.0 / (alpha - 1.0));
    CHECK(std::abs(power_law_alpha(s, 1.5) - alpha) < 0.05);
  }
}

TEST_CASE("distribution comparison") {
  std::mt19937_64 rng(77);
  std::lognormal_distribution<double> ln(2.0, 0.6);
  std::vector<double> s(5000);
  for (auto& v : s) v = ln(rng);
  const auto fit = fit_distributions(s);
  CHECK(fit.best_fit == "Lognormal");
  CHECK(fit.lr_pl_vs_ln < 0.0);
  CHECK(fit.p_value < 0.01);
  CHECK(fit.alpha_hat > 1.0);
  CHECK(fit.lognormal_sigma == doctest::Approx(0.6).epsilon(0.05));
  CHECK(fit.ks_lognormal < fit.ks_stat);
  CHECK(fit.n_tail == 5000);

  std::vector<double> pareto(3000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& v : pareto) v = std::pow(1.0 - u(rng), -1.0 / 1.5);
  const auto pf = fit_distributions(pareto);
  CHECK(pf.best_fit == "Power Law");
  CHECK(pf.lr_pl_vs_ln > 0.0);

  FitOptions scan;
  scan.scan_x_min = true;
  const auto sf = fit_distributions(pareto, scan);
  CHECK(sf.n_tail >= 10);
  CHECK(sf.ks_stat <= pf.ks_stat + 1e-15);

  const std::vector<double> constant(20, 3.0);
  CHECK(code_of([&] { fit_distributions(constant); }) == Errc::TooFewPoints);
  std::vector<double> neg(20, 1.0);
  neg[3] = -1.0;
  CHECK(code_of([&] { fit_distributions(neg); }) == Errc::NonPositiveSample);
  CHECK(code_of([&] { fit_distributions(std::vector<double>{1, 2, 3}); }) == Errc::TooFewPoints);
}

TEST_CASE("Chow test") {
  const std::map<int, double> t3{{2018, 2284}, {2021, 2170}, {2023, 1259}};
  const auto c = chow_test(t3, 2021);
  CHECK(c.regime_means.first == doctest::Approx(2227));
  CHECK(c.regime_means.second == doctest::Approx(1259));
  CHECK(c.low_power);
  CHECK(c.df1 == 1);
  CHECK(c.df2 == 1);
  CHECK(c.f_stat > 0.0);

  std::map<int, double> linear;
  for (int y = 2010; y < 2020; ++y) linear[y] = 3.0 * y - 100.0;
  const auto l = chow_test(linear, 2014);
  CHECK(l.f_stat == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_FALSE(l.low_power);

  // Step series against a direct least-squares oracle.
  const std::map<int, double> step{{2015, 1.0}, {2016, 1.3}, {2017, 0.8}, {2018, 50.2}, {2019, 49.7}, {2020, 50.4}};
  auto fit_rss = [](const std::vector<std::pair<int, double>>& pts) {
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (const auto& [t, v] : pts) {
      X.push_back({1.0, static_cast<double>(t) - 2017.5});
      y.push_back(v);
    }
    const auto b = oracle::normal_equations(X, y);
    double rss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) rss += std::pow(y[i] - b[0] - b[1] * X[i][1], 2);
    return rss;
  };
  std::vector<std::pair<int, double>> all(step.begin(), step.end());
  const double pooled = fit_rss(all);
  const double split = fit_rss({all.begin(), all.begin() + 3}) + fit_rss({all.begin() + 3, all.end()});
  const double f = ((pooled - split) / 2.0) / (split / 2.0);
  const auto s = chow_test(step, 2017);
  CHECK(s.f_stat == doctest::Approx(f).epsilon(1e-8));
  CHECK(s.p_value < 0.01);
  CHECK(s.df2 == 2);

  std::map<int, double> affine;
  for (const auto& [y, v] : step) affine[y] = -4.0 * v + 1000.0;
  CHECK(chow_test(affine, 2017).f_stat == doctest::Approx(s.f_stat).epsilon(1e-8));

  CHECK(code_of([&] { chow_test(t3, 2023); }) == Errc::InsufficientData);
  CHECK(code_of([] { chow_test({{1, 1.0}, {2, 2.0}}, 1); }) == Errc::InsufficientData);
}

TEST_CASE("correlation modes") {
  const std::vector<double> a{1, 3, 2, 7};
  std::vector<double> twice, neg;
  for (double x : a) {
    twice.push_back(2 * x);
    neg.push_back(-x);
  }
  for (auto m : {CorrelationMode::Levels, CorrelationMode::Changes, CorrelationMode::PctChanges}) {
    CHECK(series_correlation(a, twice, m) == doctest::Approx(1.0));
  }
  CHECK(series_correlation(a, neg, CorrelationMode::Levels) == doctest::Approx(-1.0));
  CHECK(series_correlation(a, neg, CorrelationMode::Changes) == doctest::Approx(-1.0));

  const std::vector<double> fixed{114.19, 108.48, 62.95}, kde{16693.30, 14041.94, 11695.98};
  CHECK(series_correlation(fixed, kde, CorrelationMode::Levels) == doctest::Approx(0.897).epsilon(5e-4));

  const std::vector<double> flat{2, 2, 2};
  CHECK(code_of([&] { series_correlation(flat, fixed, CorrelationMode::Levels); }) == Errc::ZeroVariance);
  CHECK(code_of([&] { series_correlation(std::vector<double>{1, 2}, std::vector<double>{1, 3},
                                         CorrelationMode::Changes); }) == Errc::InsufficientData);
  CHECK(parse_correlation_mode("changes") == CorrelationMode::Changes);
}

TEST_CASE("DID 2x2 hand example") {
  const auto panel = panel_of({{"C", 2018, 1}, {"C", 2021, 2}, {"T", 2018, 3}, {"T", 2021, 5}});
  TreatmentAssignment tr;
  tr.treated = {{"C", false}, {"T", true}};
  tr.base_year = 2018;
  DidSpec spec;
  spec.log_outcome = false;
  for (auto est : {FeEstimator::Within, FeEstimator::Dummy}) {
    spec.estimator = est;
    const auto r = did_regress(panel, tr, spec);
    CHECK(r.coefficients.at(treated_post_term(2021)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.n_obs == 4);
    CHECK(r.n_treated == 1);
  }
}

TEST_CASE("DID constant outcome is degenerate") {
  std::vector<std::tuple<std::string, int, double>> rows;
  for (int i = 0; i < 6; ++i)
    for (int y : {2018, 2021, 2023}) rows.emplace_back("B" + std::to_string(i), y, 10.0);
  const auto panel = panel_of(rows);
  const auto tr = assign_treatment(panel, 2018, 0.5);
  TreatmentAssignment manual = tr;
  for (int i = 0; i < 6; ++i) manual.treated["B" + std::to_string(i)] = i < 3;
  const auto r = did_regress(panel, manual);
  CHECK(r.degenerate);
  for (const auto& [term, coef] : r.coefficients) CHECK(std::abs(coef) < 1e-12);
  for (const auto& [term, t] : r.t_stats) CHECK(std::isnan(t));
}

TEST_CASE("within and dummy estimators agree") {
  std::mt19937_64 rng(2718);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 30; ++trial) {
    const int banks = 3 + trial % 8;
    const int T = 2 + trial % 3;
    PanelDesign d;
    const int p = 1 + trial % 2;
    std::vector<double> rows_y;
    std::vector<std::vector<double>> rows_x;
    for (int i = 0; i < banks; ++i) {
      for (int t = 0; t < T; ++t) {
        if (trial % 3 == 0 && i == 0 && t == 0 && banks > 3) continue;  // unbalanced
        d.bank.push_back("b" + std::to_string(i));
        d.year.push_back(2000 + t);
        std::vector<double> x(static_cast<std::size_t>(p));
        for (auto& v : x) v = z(rng);
        rows_x.push_back(x);
        rows_y.push_back(0.5 * i + 0.3 * t + x[0] + z(rng));
      }
    }
    const auto N = static_cast<Eigen::Index>(rows_y.size());
    d.y = VectorXd(N);
    d.X = MatrixXd(N, p);
    for (Eigen::Index r = 0; r < N; ++r) {
      d.y(r) = rows_y[static_cast<std::size_t>(r)];
      for (int c = 0; c < p; ++c) d.X(r, c) = rows_x[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < p; ++c) d.names.push_back("x" + std::to_string(c));
    if (N <= banks + T - 1 + p) continue;
    const auto w = twoway_fe(d, FeEstimator::Within);
    const auto f = twoway_fe(d, FeEstimator::Dummy);
    CHECK((w.coef - f.coef).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((w.se - f.se).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(w.r_squared == doctest::Approx(f.r_squared).epsilon(1e-9));
    CHECK(w.r_squared >= 0.0);
    CHECK(w.r_squared <= 1.0);
  }
}

TEST_CASE("DID clustered errors against a dense oracle") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> z;
  PanelDesign d;
  const int G = 7, T = 3;
  std::vector<double> ys, xs;
  for (int i = 0; i < G; ++i)
    for (int t = 0; t < T; ++t) {
      d.bank.push_back(std::to_string(i));
      d.year.push_back(t);
      const double x = z(rng);
      xs.push_back(x);
      ys.push_back(i + 0.2 * t + 2.0 * x + z(rng));
    }
  const int N = G * T;
  d.y = Eigen::Map<VectorXd>(ys.data(), N);
  d.X = Eigen::Map<MatrixXd>(xs.data(), N, 1);
  d.names = {"x"};
  const auto r = twoway_fe(d);

  // Full dummy design: x, constant, bank dummies 1..G-1, year dummies 1..T-1.
  const int K = 1 + 1 + (G - 1) + (T - 1);
  MatrixXd X = MatrixXd::Zero(N, K);
  for (int row = 0; row < N; ++row) {
    const int i = row / T, t = row % T;
    X(row, 0) = xs[static_cast<std::size_t>(row)];
    X(row, 1) = 1.0;
    if (i > 0) X(row, 1 + i) = 1.0;
    if (t > 0) X(row, G + t) = 1.0;
  }
  const MatrixXd XtXi = (X.transpose() * X).inverse();
  const VectorXd beta = XtXi * X.transpose() * d.y;
  const VectorXd e = d.y - X * beta;
  MatrixXd meat = MatrixXd::Zero(K, K);
  for (int i = 0; i < G; ++i) {
    VectorXd s = VectorXd::Zero(K);
    for (int t = 0; t < T; ++t) s += X.row(i * T + t).transpose() * e(i * T + t);
    meat += s * s.transpose();
  }
  // Regressors of interest plus year effects plus one constant.
  const double k_corr = 1 + (T - 1) + 1;
  const double c = G / (G - 1.0) * (N - 1.0) / (N - k_corr);
  const double se = std::sqrt(c * (XtXi * meat * XtXi)(0, 0));
  CHECK(r.coef(0) == doctest::Approx(beta(0)).epsilon(1e-10));
  CHECK(r.se(0) == doctest::Approx(se).epsilon(1e-8));
  CHECK(r.n_params == static_cast<int>(k_corr));
}

TEST_CASE("DID design errors") {
  const auto one_bank = panel_of({{"A", 2018, 1}, {"A", 2021, 2}});
  TreatmentAssignment tr;
  tr.treated = {{"A", true}, {"Z", false}};
  tr.base_year = 2018;
  CHECK(code_of([&] { did_regress(one_bank, tr); }) == Errc::InsufficientData);

  const auto p = panel_of({{"A", 2018, 1}, {"A", 2021, 2}, {"B", 2018, 3}, {"B", 2021, 4}, {"C", 2018, 2},
                           {"C", 2021, 6}});
  TreatmentAssignment t2;
  t2.treated = {{"A", true}, {"B", false}, {"C", false}};
  DidSpec spec;
  spec.post_years = {2021};
  spec.interactions = {"size"};
  spec.covariates["size"] = {{"A", 1.0}, {"B", 1.0}, {"C", 1.0}};
  CHECK(code_of([&] { did_regress(p, t2, spec); }) == Errc::CollinearDesign);
  spec.covariates["size"] = {{"A", 1.0}};
  CHECK(code_of([&] { did_regress(p, t2, spec); }) == Errc::InvalidArgument);
  CHECK(post_term(2021) == "post2021");
  CHECK(treated_post_term(2023) == "treated_x_post2023");
}
