#include "clab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "clab/error.hpp"
#include "clab/ingest.hpp"

namespace clab {

namespace {

Json vec(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json mat(const Eigen::MatrixXd& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Eigen::VectorXd to_vector(const Json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

std::string fixed(double x, int digits) {
  if (!std::isfinite(x)) return std::isnan(x) ? "n/a" : (x > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string signed_pct(double x) {
  if (!std::isfinite(x)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.1f%%", x);
  return buf;
}

}  // namespace

Json envelope(const std::string& command, Json config, Json results) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["config"] = std::move(config);
  j["results"] = std::move(results);
  return j;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json to_json(const ReconstructionConfig& cfg) {
  const RatioRule& r = cfg.ratio_rule;
  Json rule;
  rule["kind"] = std::string(ratio_kind_name(r.kind));
  switch (r.kind) {
    case RatioKind::Fixed:
      rule["rho"] = r.fixed;
      break;
    case RatioKind::SizeThreshold:
      rule["rho_large"] = r.rho_large;
      rule["rho_small"] = r.rho_small;
      rule["size_quantile"] = r.size_quantile;
      break;
    case RatioKind::LinearLog:
      rule["intercept"] = r.intercept;
      rule["slope"] = r.slope;
      break;
    case RatioKind::Tiered:
      rule["tier_quantiles"] = r.tier_quantiles;
      rule["tier_ratios"] = r.tier_ratios;
      break;
  }
  Json j;
  j["method"] = std::string(method_name(cfg.method));
  j["ratio_rule"] = std::move(rule);
  j["fitness_alpha"] = cfg.fitness_alpha;
  j["min_edge_threshold"] = cfg.min_edge_threshold;
  return j;
}

Json to_json(const DiffusionParams& p) {
  Json j;
  j["D"] = p.D;
  j["kappa"] = p.kappa;
  return j;
}

Json to_json(const ExposureMatrix& X) {
  Json j;
  j["method"] = X.method;
  j["bank_ids"] = X.bank_ids;
  j["matrix"] = mat(X.X);
  j["row_targets"] = vec(X.row_targets);
  j["col_targets"] = vec(X.col_targets);
  j["edges"] = X.edge_count();
  j["max_marginal_error"] = X.max_marginal_error();
  j["marginals_fitted"] = X.marginals_fitted;
  j["converged"] = X.converged;
  j["ipf_sweeps"] = X.ipf_sweeps;
  j["thresholded"] = X.thresholded;
  j["threshold"] = X.threshold;
  j["all_zero"] = X.all_zero;
  j["uniform_fallback"] = X.uniform_fallback;
  j["bandwidth_fallback"] = X.bandwidth_fallback;
  j["bandwidth"] = X.bandwidth;
  return j;
}

ExposureMatrix exposure_from_json(const Json& j) {
  try {
    ExposureMatrix X;
    X.method = j.at("method").get<std::string>();
    X.bank_ids = j.at("bank_ids").get<std::vector<std::string>>();
    const Json& rows = j.at("matrix");
    const auto n = static_cast<Eigen::Index>(rows.size());
    X.X.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Json& r = rows[static_cast<std::size_t>(i)];
      require(static_cast<Eigen::Index>(r.size()) == n, Errc::MalformedRow, "exposure matrix is not square");
      for (Eigen::Index k = 0; k < n; ++k) X.X(i, k) = r[static_cast<std::size_t>(k)].get<double>();
    }
    X.row_targets = to_vector(j.at("row_targets"));
    X.col_targets = to_vector(j.at("col_targets"));
    X.marginals_fitted = j.value("marginals_fitted", true);
    X.converged = j.value("converged", true);
    X.ipf_sweeps = j.value("ipf_sweeps", 0);
    X.thresholded = j.value("thresholded", false);
    X.threshold = j.value("threshold", 0.0);
    X.all_zero = j.value("all_zero", false);
    X.uniform_fallback = j.value("uniform_fallback", false);
    X.bandwidth_fallback = j.value("bandwidth_fallback", false);
    X.bandwidth = j.value("bandwidth", 0.0);
    return X;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::MalformedRow, std::string("exposure JSON: ") + e.what());
  }
}

Json to_json(const SpectrumResult& s) {
  Json j;
  j["solver"] = s.solver;
  j["lambda2"] = s.lambda2;
  j["lambda_max"] = s.lambda_max();
  j["full_spectrum"] = s.full_spectrum;
  j["zero_eigenvalues"] = s.zero_count();
  j["component_sizes"] = s.component_sizes;
  j["eigenvalues"] = vec(s.eigenvalues);
  j["fiedler_vector"] = vec(s.fiedler_vector);
  return j;
}

Json to_json(const TopologyReport& t) {
  Json j;
  j["nodes"] = t.nodes;
  j["edges"] = t.edges;
  j["density"] = t.density;
  j["weighted_avg_degree"] = t.weighted_avg_degree;
  j["gini"] = t.gini;
  j["hhi"] = t.hhi;
  j["cr3"] = t.cr3;
  Json top = Json::object();
  for (const auto& [k, v] : t.top_k_share) top["top" + std::to_string(k)] = v;
  j["top_k_share"] = std::move(top);
  j["assortativity"] = t.assortativity ? Json(*t.assortativity) : Json(nullptr);
  j["spectral_radius"] = t.spectral_radius;
  j["lambda2"] = t.lambda2;
  j["lambda_n"] = t.lambda_n;
  j["spectral_gap"] = t.spectral_gap;
  j["effective_resistance"] = t.effective_resistance;
  j["centralization"] = {{"degree", t.centralization.degree},
                         {"betweenness", t.centralization.betweenness},
                         {"eigenvector", t.centralization.eigenvector}};
  return j;
}

Json to_json(const YearReport& r) {
  Json j;
  j["year"] = r.year;
  j["n_banks"] = r.n_banks;
  j["edges"] = r.edges;
  j["lambda2"] = r.lambda2;
  j["kappa_eff"] = r.kappa_eff;
  j["d_star"] = r.d_star;
  j["gamma"] = r.gamma;
  j["network_share"] = r.network_share;
  j["marginals_fitted"] = r.marginals_fitted;
  j["topology"] = r.topology ? to_json(*r.topology) : Json(nullptr);
  j["spectrum"] = to_json(r.spectrum);
  j["bank_ids"] = r.bank_ids;
  return j;
}

Json to_json(const YearChange& c) {
  Json j;
  j["from"] = c.from;
  j["to"] = c.to;
  j["d_lambda2"] = c.d_lambda2;
  j["pct_lambda2"] = c.pct_lambda2;
  j["d_kappa"] = c.d_kappa;
  j["pct_kappa"] = c.pct_kappa;
  j["kappa_ratio"] = c.kappa_ratio;
  return j;
}

Json to_json(const AnalysisResult& a) {
  Json years = Json::array(), changes = Json::array();
  for (const auto& y : a.years) years.push_back(to_json(y));
  for (const auto& c : a.changes) changes.push_back(to_json(c));
  return Json{{"years", std::move(years)}, {"changes", std::move(changes)}};
}

Json to_json(const SweepResult& s) {
  Json j;
  j["rhos"] = s.rhos;
  j["years"] = s.years;
  j["lambda2"] = s.lambda2;
  j["pct_change"] = s.pct_change;
  j["pct_change_spread"] = s.pct_change_spread;
  j["scaling_exponent"] = s.scaling_exponent;
  return j;
}

Json to_json(const BootstrapResult& b) {
  Json j;
  j["point"] = b.point;
  j["ci_low"] = b.ci_low;
  j["ci_high"] = b.ci_high;
  j["level"] = b.level;
  j["seed"] = b.seed;
  j["B"] = b.B;
  j["B_effective"] = b.B_effective;
  Json skipped = Json::array();
  for (const auto& s : b.skipped) skipped.push_back({{"index", s.index}, {"reason", s.reason}});
  j["skipped"] = std::move(skipped);
  j["replicates"] = b.replicates;
  return j;
}

Json to_json(const PermutationResult& p) {
  Json j;
  j["observed"] = p.observed;
  j["p_value"] = p.p_value;
  j["n_perm"] = p.n_perm;
  j["evaluated"] = p.evaluated;
  j["extreme"] = p.extreme;
  j["exhaustive"] = p.exhaustive;
  return j;
}

Json to_json(const PanelPermutationResult& p) {
  Json j;
  j["year_a"] = p.year_a;
  j["year_b"] = p.year_b;
  j["lambda2_a"] = p.lambda2_a;
  j["lambda2_b"] = p.lambda2_b;
  j["observed"] = p.observed;
  j["p_value"] = p.p_value;
  j["n_perm"] = p.n_perm;
  j["swappable_banks"] = p.swappable_banks;
  j["null"] = p.null;
  return j;
}

Json to_json(const PlaceboResult& p) {
  Json j;
  j["observed"] = p.observed;
  j["percentile"] = p.ties_undefined ? Json(nullptr) : Json(p.percentile);
  j["ties_undefined"] = p.ties_undefined;
  j["edges"] = p.edges;
  j["null"] = p.null;
  return j;
}

Json to_json(const FitComparison& f) {
  Json j;
  j["x_min"] = f.x_min;
  j["n_tail"] = f.n_tail;
  j["alpha_hat"] = f.alpha_hat;
  j["lognormal_mu"] = f.lognormal_mu;
  j["lognormal_sigma"] = f.lognormal_sigma;
  j["exp_rate"] = f.exp_rate;
  j["loglik"] = {{"power_law", f.loglik_power_law},
                 {"lognormal", f.loglik_lognormal},
                 {"exponential", f.loglik_exponential}};
  j["lr_pl_vs_ln"] = f.lr_pl_vs_ln;
  j["vuong_z"] = f.vuong_z;
  j["p_value"] = f.p_value;
  j["lr_ln_vs_exp"] = f.lr_ln_vs_exp;
  j["vuong_z_ln_vs_exp"] = f.vuong_z_ln_vs_exp;
  j["p_value_ln_vs_exp"] = f.p_value_ln_vs_exp;
  j["ks_stat"] = f.ks_stat;
  j["ks_lognormal"] = f.ks_lognormal;
  j["ks_exponential"] = f.ks_exponential;
  j["best_fit"] = f.best_fit;
  return j;
}

Json to_json(const ChowResult& c) {
  Json j;
  j["break_candidate"] = c.break_candidate;
  j["f_stat"] = c.f_stat;
  j["p_value"] = c.p_value;
  j["df1"] = c.df1;
  j["df2"] = c.df2;
  j["regime_means"] = {c.regime_means.first, c.regime_means.second};
  j["regime_sizes"] = {c.regime_sizes.first, c.regime_sizes.second};
  j["rss_pooled"] = c.rss_pooled;
  j["rss_split"] = c.rss_split;
  j["low_power"] = c.low_power;
  return j;
}

Json to_json(const DidResult& d) {
  Json terms = Json::array();
  for (const auto& t : d.terms) {
    terms.push_back({{"term", t},
                     {"coefficient", d.coefficients.at(t)},
                     {"clustered_se", d.clustered_se.at(t)},
                     {"t_stat", d.t_stats.at(t)},
                     {"p_value", d.p_values.at(t)}});
  }
  Json j;
  j["terms"] = std::move(terms);
  j["r_squared"] = d.r_squared;
  j["within_r_squared"] = d.within_r_squared;
  j["n_obs"] = d.n_obs;
  j["n_banks"] = d.n_banks;
  j["n_treated"] = d.n_treated;
  j["n_params"] = d.n_params;
  j["degenerate"] = d.degenerate;
  return j;
}

Json to_json(const CascadeTrace& c) {
  Json j;
  j["size"] = c.size;
  j["steps"] = c.steps;
  j["members"] = c.members;
  j["entry_step"] = c.entry_step;
  j["final_distress"] = vec(c.final_distress);
  return j;
}

Json to_json(const LeaveOneOut& l) {
  Json j;
  j["baseline"] = l.baseline;
  j["max_abs_pct"] = l.max_abs_pct;
  j["worst_bank"] = l.worst_bank;
  j["lambda2"] = l.lambda2;
  j["pct_change"] = l.pct_change;
  return j;
}

void write_exposure_csv(std::ostream& out, const ExposureMatrix& X) {
  const auto n = X.size();
  auto id = [&](Eigen::Index i) {
    return static_cast<std::size_t>(i) < X.bank_ids.size() ? X.bank_ids[static_cast<std::size_t>(i)]
                                                           : std::to_string(i);
  };
  out << "bank_id";
  for (Eigen::Index j = 0; j < n; ++j) out << ',' << csv_field(id(j));
  out << '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    out << csv_field(id(i));
    for (Eigen::Index j = 0; j < n; ++j) out << ',' << format_double(X.X(i, j));
    out << '\n';
  }
}

ExposureMatrix read_exposure_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::MissingColumn, "exposure CSV is empty");
  auto header = split_delimited(line, ',');
  require(!header.empty() && header[0] == "bank_id", Errc::MissingColumn, "exposure CSV must start with bank_id");
  ExposureMatrix X;
  X.bank_ids.assign(header.begin() + 1, header.end());
  const auto n = static_cast<Eigen::Index>(X.bank_ids.size());
  X.X = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index row = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_delimited(line, ',');
    require(row < n && static_cast<Eigen::Index>(cells.size()) == n + 1, Errc::MalformedRow,
            "line " + std::to_string(line_no) + ": expected " + std::to_string(n + 1) + " fields");
    for (Eigen::Index j = 0; j < n; ++j) {
      try {
        std::size_t used = 0;
        X.X(row, j) = std::stod(cells[static_cast<std::size_t>(j + 1)], &used);
      } catch (const std::exception&) {
        fail(Errc::MalformedRow, "line " + std::to_string(line_no) + ": non-numeric exposure");
      }
    }
    ++row;
  }
  require(row == n, Errc::MalformedRow, "exposure CSV has " + std::to_string(row) + " rows for " +
                                            std::to_string(n) + " banks");
  X.row_targets = X.X.rowwise().sum();
  X.col_targets = X.X.colwise().sum().transpose();
  X.method = "csv";
  return X;
}

void write_years_csv(std::ostream& out, const AnalysisResult& a) {
  out << "year,n_banks,edges,lambda2,kappa_eff,d_star,gamma,network_share\n";
  for (const auto& y : a.years) {
    out << y.year << ',' << y.n_banks << ',' << y.edges << ',' << format_double(y.lambda2) << ','
        << format_double(y.kappa_eff) << ',' << format_double(y.d_star) << ',' << format_double(y.gamma) << ','
        << format_double(y.network_share) << '\n';
  }
}

void write_changes_csv(std::ostream& out, const AnalysisResult& a) {
  out << "from,to,d_lambda2,pct_lambda2,d_kappa,pct_kappa,kappa_ratio\n";
  for (const auto& c : a.changes) {
    out << c.from << ',' << c.to << ',' << format_double(c.d_lambda2) << ',' << format_double(c.pct_lambda2) << ','
        << format_double(c.d_kappa) << ',' << format_double(c.pct_kappa) << ',' << format_double(c.kappa_ratio)
        << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& s) {
  out << "rho";
  for (int y : s.years) out << ",lambda2_" << y;
  if (!s.pct_change.empty()) out << ",pct_change";
  out << '\n';
  for (std::size_t r = 0; r < s.rhos.size(); ++r) {
    out << format_double(s.rhos[r]);
    for (double v : s.lambda2[r]) out << ',' << format_double(v);
    if (!s.pct_change.empty()) out << ',' << format_double(s.pct_change[r]);
    out << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const std::vector<std::string>& bank_ids,
                          const std::vector<DistressState>& states) {
  out << "node,t,u\n";
  for (const auto& s : states) {
    require(static_cast<std::size_t>(s.u.size()) == bank_ids.size(), Errc::DimensionMismatch,
            "trajectory state does not match the bank list");
    for (Eigen::Index i = 0; i < s.u.size(); ++i) {
      out << csv_field(bank_ids[static_cast<std::size_t>(i)]) << ',' << format_double(s.t) << ',' << format_double(s.u(i)) << '\n';
    }
  }
}

void write_values_csv(std::ostream& out, const std::string& header, const std::vector<double>& values) {
  out << "index," << header << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) out << i << ',' << format_double(values[i]) << '\n';
}

std::vector<double> read_numeric_column(std::istream& in, const std::string& column, char delimiter) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::MissingColumn, "input is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_delimited(line, delimiter);
  std::size_t col = 0;
  if (!column.empty()) {
    const auto it = std::find(header.begin(), header.end(), column);
    require(it != header.end(), Errc::MissingColumn, "column '" + column + "' not found");
    col = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<double> values;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_delimited(line, delimiter);
    require(col < cells.size(), Errc::MalformedRow, "line " + std::to_string(line_no) + ": missing field");
    try {
      std::size_t used = 0;
      values.push_back(std::stod(cells[col], &used));
      require(used == cells[col].size(), Errc::MalformedRow, "trailing characters");
    } catch (const std::exception&) {
      fail(Errc::MalformedRow, "line " + std::to_string(line_no) + ": '" + cells[col] + "' is not a number");
    }
  }
  return values;
}

std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string cell = c < r.size() ? r[c] : "";
      const std::string pad(width[c] - cell.size(), ' ');
      if (c > 0) os << "  ";
      os << (c == 0 ? cell + pad : pad + cell);
    }
    os << '\n';
  };
  emit(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& r : rows) emit(r);
  return os.str();
}

std::string table(const AnalysisResult& a) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < a.years.size(); ++i) {
    const auto& y = a.years[i];
    std::vector<std::string> r{std::to_string(y.year), std::to_string(y.n_banks), fixed(y.lambda2, 2),
                               fixed(y.kappa_eff, 2), fixed(y.d_star, 4)};
    if (a.years.size() > 1) {
      if (i == 0) {
        r.insert(r.end(), {"-", "-"});
      } else {
        const auto& c = a.changes[i - 1];
        r.push_back(signed_pct(c.pct_lambda2));
        r.push_back(signed_pct(c.pct_kappa));
      }
    }
    rows.push_back(std::move(r));
  }
  std::vector<std::string> header{"Year", "Banks", "lambda2", "kappa_eff", "d*"};
  if (a.years.size() > 1) header.insert(header.end(), {"d_lambda2", "d_kappa"});
  std::string out = render_table(header, rows);
  if (a.years.size() >= 3) {
    const auto& c = a.changes.back();
    out += "Overall " + std::to_string(c.from) + "->" + std::to_string(c.to) + ": lambda2 " +
           signed_pct(c.pct_lambda2) + ", kappa_eff " + signed_pct(c.pct_kappa) + "\n";
  }
  return out;
}

std::string table(const SweepResult& s) {
  std::vector<std::string> header{"rho"};
  for (int y : s.years) header.push_back(std::to_string(y));
  if (!s.pct_change.empty()) header.push_back("change");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t r = 0; r < s.rhos.size(); ++r) {
    std::vector<std::string> row{fixed(s.rhos[r], 4)};
    for (double v : s.lambda2[r]) row.push_back(fixed(v, 2));
    if (!s.pct_change.empty()) row.push_back(signed_pct(s.pct_change[r]));
    rows.push_back(std::move(row));
  }
  std::string out = render_table(header, rows);
  for (std::size_t y = 0; y < s.scaling_exponent.size(); ++y) {
    out += "Scaling exponent " + std::to_string(s.years[y]) + ": " + fixed(s.scaling_exponent[y], 6) + "\n";
  }
  return out;
}

std::string table(const BootstrapResult& b) {
  char level[32];
  std::snprintf(level, sizeof level, "%g%%", 100.0 * b.level);
  return render_table({"Estimate", "Point", "CI low", "CI high", "Level", "B", "B_eff"},
                      {{"lambda2", fixed(b.point, 2), fixed(b.ci_low, 2), fixed(b.ci_high, 2), level,
                        std::to_string(b.B), std::to_string(b.B_effective)}});
}

std::string table(const PanelPermutationResult& p) {
  return render_table({"Test", "lambda2 a", "lambda2 b", "T_obs", "p-value", "Permutations"},
                      {{std::to_string(p.year_a) + " vs " + std::to_string(p.year_b), fixed(p.lambda2_a, 2),
                        fixed(p.lambda2_b, 2), fixed(p.observed, 2), fixed(p.p_value, 4),
                        std::to_string(p.n_perm)}});
}

std::string table(const PlaceboResult& p) {
  double lo = p.null.empty() ? 0.0 : *std::min_element(p.null.begin(), p.null.end());
  double hi = p.null.empty() ? 0.0 : *std::max_element(p.null.begin(), p.null.end());
  return render_table({"Observed", "Null min", "Null max", "Percentile", "Draws"},
                      {{fixed(p.observed, 2), fixed(lo, 2), fixed(hi, 2),
                        p.ties_undefined ? "tied" : fixed(p.percentile, 1), std::to_string(p.null.size())}});
}

std::string table(const FitComparison& f) {
  std::string out = render_table(
      {"Distribution", "Parameters", "Log-lik", "KS"},
      {{"Power law", "alpha=" + fixed(f.alpha_hat, 3) + " x_min=" + fixed(f.x_min, 3), fixed(f.loglik_power_law, 2),
        fixed(f.ks_stat, 4)},
       {"Lognormal", "mu=" + fixed(f.lognormal_mu, 3) + " sigma=" + fixed(f.lognormal_sigma, 3),
        fixed(f.loglik_lognormal, 2), fixed(f.ks_lognormal, 4)},
       {"Exponential", "rate=" + fixed(f.exp_rate, 6), fixed(f.loglik_exponential, 2), fixed(f.ks_exponential, 4)}});
  out += "LR: PL vs. Lognormal " + fixed(f.lr_pl_vs_ln, 2) + " (z=" + fixed(f.vuong_z, 2) +
         ", p=" + fixed(f.p_value, 4) + ")\n";
  out += "Best Fit: " + f.best_fit + "\n";
  return out;
}

std::string table(const ChowResult& c) {
  std::string out = render_table({"Break", "Mean before", "Mean after", "F", "p-value"},
                                 {{std::to_string(c.break_candidate), fixed(c.regime_means.first, 2),
                                   fixed(c.regime_means.second, 2), fixed(c.f_stat, 3), fixed(c.p_value, 4)}});
  if (c.low_power) out += "Intercept-only regimes (fewer than 3 points in a regime); low power.\n";
  return out;
}

std::string table(const DidResult& d) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : d.terms) {
    rows.push_back({t, fixed(d.coefficients.at(t), 4), fixed(d.clustered_se.at(t), 4), fixed(d.t_stats.at(t), 2),
                    fixed(d.p_values.at(t), 4)});
  }
  std::string out = render_table({"Term", "Coef", "SE", "t", "p"}, rows);
  out += "Observations " + std::to_string(d.n_obs) + ", banks " + std::to_string(d.n_banks) + " (treated " +
         std::to_string(d.n_treated) + "), R^2 " + fixed(d.r_squared, 4) + ", within R^2 " +
         fixed(d.within_r_squared, 4) + "\n";
  if (d.degenerate) out += "Degenerate: at least one clustered SE is zero.\n";
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::Io, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) fail(Errc::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(Errc::Io, "cannot move report into place at " + path.string());
  }
}

}  // namespace clab
