#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "clab/error.hpp"
#include "clab/pipeline.hpp"
#include "clab/stats/did.hpp"

using namespace clab;

namespace {

AnalysisConfig base_config() {
  AnalysisConfig cfg;
  cfg.recon.min_edge_threshold = 0.0;
  return cfg;
}

BankPanel repeat_year(const BankPanel& p, int from, int to) {
  std::vector<BankRecord> recs;
  for (const auto& r : p.records()) {
    if (r.year != from) continue;
    recs.push_back(r);
    BankRecord copy = r;
    copy.year = to;
    recs.push_back(copy);
  }
  return BankPanel(recs);
}

}  // namespace

TEST_CASE("synthetic panel shape and determinism") {
  SynthConfig sc;
  sc.n_banks = 20;
  const auto a = synth_panel(sc);
  const auto b = synth_panel(sc);
  CHECK(a.size() == 60);
  CHECK(a.years() == std::vector<int>{2018, 2021, 2023});
  std::ostringstream sa, sb;
  write_panel_csv(sa, a);
  write_panel_csv(sb, b);
  CHECK(sa.str() == sb.str());
  sc.seed = 2;
  std::ostringstream sc2;
  write_panel_csv(sc2, synth_panel(sc));
  CHECK(sc2.str() != sa.str());

  SynthConfig tiny;
  tiny.n_banks = 3;
  std::ostringstream st;
  write_panel_csv(st, synth_panel(tiny));
  std::istringstream in(st.str());
  CHECK(load_panel(in).size() == 9);

  tiny.n_banks = 2;
  CHECK_THROWS_AS(synth_panel(tiny), Error);
}

TEST_CASE("zero noise keeps untreated banks fixed and shrinks treated ones") {
  SynthConfig sc;
  sc.n_banks = 16;
  sc.noise_sd = 0.0;
  sc.shrinkage = 0.2;
  const auto p = synth_panel(sc);
  const auto tr = assign_treatment(p, 2018, 0.75);
  const auto base_slice = p.year_slice(2018);
  std::map<std::string, double> base_assets;
  for (std::size_t i = 0; i < base_slice.bank_ids.size(); ++i) base_assets[base_slice.bank_ids[i]] = base_slice.assets[i];
  for (const auto& r : p.records()) {
    const double base = base_assets.at(r.bank_id);
    const double factor = tr.treated.at(r.bank_id) && r.year >= 2021 ? 0.8 : 1.0;
    CHECK(r.total_assets == doctest::Approx(base * factor).epsilon(1e-14));
  }
}

TEST_CASE("analyze_panel year reports") {
  SynthConfig sc;
  sc.n_banks = 30;
  const auto panel = synth_panel(sc);
  auto cfg = base_config();
  const auto r = analyze_panel(panel, cfg);
  REQUIRE(r.years.size() == 3);
  REQUIRE(r.changes.size() == 3);
  CHECK(r.changes[2].from == 2018);
  CHECK(r.changes[2].to == 2023);
  for (const auto& y : r.years) {
    CHECK(y.kappa_eff == effective_decay(y.lambda2, cfg.diffusion));
    CHECK(y.d_star == critical_distance(y.kappa_eff, 0.1));
    CHECK(y.n_banks == 30);
    CHECK(y.topology.has_value());
  }
  const auto& c = r.changes[0];
  CHECK(c.kappa_ratio == doctest::Approx(kappa_ratio(r.years[1].lambda2, r.years[0].lambda2)));
  CHECK(c.pct_lambda2 == doctest::Approx(100.0 * (r.years[1].lambda2 / r.years[0].lambda2 - 1.0)));

  cfg.threads = 3;
  const auto t = analyze_panel(panel, cfg);
  for (std::size_t i = 0; i < 3; ++i) CHECK(t.years[i].lambda2 == r.years[i].lambda2);

  cfg.years = {2021};
  const auto single = analyze_panel(panel, cfg);
  CHECK(single.years.size() == 1);
  CHECK(single.changes.empty());

  cfg.years = {1999};
  CHECK_THROWS_AS(analyze_panel(panel, cfg), Error);
}

TEST_CASE("identical years give zero change") {
  SynthConfig sc;
  sc.n_banks = 12;
  const auto p = repeat_year(synth_panel(sc), 2018, 2019);
  const auto r = analyze_panel(p, base_config());
  REQUIRE(r.changes.size() == 1);
  CHECK(r.changes[0].d_lambda2 == 0.0);
  CHECK(r.changes[0].kappa_ratio == 1.0);
}

TEST_CASE("errors carry the year") {
  std::vector<BankRecord> recs{{"A", 2020, 100, {}, {}}, {"B", 2020, 1, {}, {}}, {"C", 2020, 1, {}, {}}};
  try {
    analyze_panel(BankPanel(recs), base_config());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InfeasibleMarginals);
    CHECK(std::string(e.what()).find("year 2020") != std::string::npos);
  }
}

TEST_CASE("ratio sweep is linear in rho without thresholding") {
  SynthConfig sc;
  sc.n_banks = 25;
  const auto panel = synth_panel(sc);
  const auto cfg = base_config();
  SweepConfig sw;
  const auto r = ratio_sweep(panel, cfg, sw);
  CHECK(r.rhos.size() == 10);
  CHECK(r.rhos.front() == 0.01);
  CHECK(r.rhos.back() == 0.10);
  for (double e : r.scaling_exponent) CHECK(std::abs(e - 1.0) < 1e-6);
  CHECK(r.pct_change_spread < 0.1);

  sw.rho_min = sw.rho_max = 0.05;
  const auto one = ratio_sweep(panel, cfg, sw);
  CHECK(one.rhos.size() == 1);
  CHECK(one.scaling_exponent.empty());

  sw.rho_min = 0.2;
  sw.rho_max = 0.1;
  CHECK_THROWS_AS(ratio_sweep(panel, cfg, sw), Error);
}

TEST_CASE("synthetic shrinkage is recovered by DID") {
  SynthConfig sc;
  sc.n_banks = 70;
  sc.shrinkage = 0.15;
  const auto panel = synth_panel(sc);
  const auto tr = assign_treatment(panel, 2018, 0.75);
  DidSpec spec;
  spec.post_years = {2021};
  const auto d = did_regress(panel, tr, spec);
  const double est = d.coefficients.at(treated_post_term(2021));
  CHECK(std::abs(est - std::log(0.85)) < 3.0 * d.clustered_se.at(treated_post_term(2021)));
}

TEST_CASE("leave one out") {
  const std::vector<double> assets{10, 12, 15, 20, 25, 30};
  ReconstructionConfig rc;
  rc.min_edge_threshold = 0.0;
  const auto l = leave_one_out(assets, rc);
  CHECK(l.lambda2.size() == 6);
  double worst = 0.0;
  for (double p : l.pct_change) worst = std::max(worst, std::abs(p));
  CHECK(l.max_abs_pct == worst);
  CHECK(std::abs(l.pct_change[l.worst_bank]) == worst);
  CHECK(l.baseline == doctest::Approx(lambda2_for_assets(assets, rc)));
  CHECK(leave_one_out(assets, rc, 4).lambda2 == l.lambda2);
  const std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(leave_one_out(three, rc), Error);
}

TEST_CASE("ols slope") {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  CHECK(ols_slope(x, y) == doctest::Approx(2.0));
  const std::vector<double> flat{1, 1, 1, 1};
  CHECK_THROWS_AS(ols_slope(flat, y), Error);
}
