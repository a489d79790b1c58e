#include "clab/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "clab/error.hpp"
#include "clab/quantile.hpp"

namespace clab {

std::string_view method_name(ReconstructionMethod m) noexcept {
  switch (m) {
    case ReconstructionMethod::MaxEntropy: return "maxent";
    case ReconstructionMethod::Kde: return "kde";
    case ReconstructionMethod::Fitness: return "fitness";
    case ReconstructionMethod::MinDensity: return "mindensity";
  }
  return "maxent";
}

ReconstructionMethod parse_method(std::string_view name) {
  if (name == "maxent" || name == "max_entropy" || name == "MaxEntropy") return ReconstructionMethod::MaxEntropy;
  if (name == "kde" || name == "KDE") return ReconstructionMethod::Kde;
  if (name == "fitness" || name == "Fitness") return ReconstructionMethod::Fitness;
  if (name == "mindensity" || name == "min_density" || name == "MinDensity") return ReconstructionMethod::MinDensity;
  fail(Errc::InvalidArgument, "unknown reconstruction method '" + std::string(name) + "'");
}

std::string_view ratio_kind_name(RatioKind k) noexcept {
  switch (k) {
    case RatioKind::Fixed: return "fixed";
    case RatioKind::SizeThreshold: return "size";
    case RatioKind::LinearLog: return "linearlog";
    case RatioKind::Tiered: return "tiered";
  }
  return "fixed";
}

RatioKind parse_ratio_kind(std::string_view name) {
  if (name == "fixed") return RatioKind::Fixed;
  if (name == "size" || name == "size_threshold") return RatioKind::SizeThreshold;
  if (name == "linearlog" || name == "linear_log") return RatioKind::LinearLog;
  if (name == "tiered") return RatioKind::Tiered;
  fail(Errc::InvalidArgument, "unknown ratio rule '" + std::string(name) + "'");
}

RatioRule RatioRule::fixed_ratio(double rho) {
  RatioRule r;
  r.kind = RatioKind::Fixed;
  r.fixed = rho;
  return r;
}

RatioRule RatioRule::size_threshold(double large, double small, double quantile) {
  RatioRule r;
  r.kind = RatioKind::SizeThreshold;
  r.rho_large = large;
  r.rho_small = small;
  r.size_quantile = quantile;
  return r;
}

RatioRule RatioRule::linear_log(double intercept, double slope) {
  RatioRule r;
  r.kind = RatioKind::LinearLog;
  r.intercept = intercept;
  r.slope = slope;
  return r;
}

RatioRule RatioRule::tiered(std::vector<double> quantiles, std::vector<double> ratios) {
  RatioRule r;
  r.kind = RatioKind::Tiered;
  r.tier_quantiles = std::move(quantiles);
  r.tier_ratios = std::move(ratios);
  return r;
}

std::vector<double> RatioRule::ratios(std::span<const double> assets) const {
  std::vector<double> rho(assets.size());
  switch (kind) {
    case RatioKind::Fixed:
      std::fill(rho.begin(), rho.end(), fixed);
      break;
    case RatioKind::SizeThreshold: {
      const double cut = quantile_type7(assets, size_quantile);
      for (std::size_t i = 0; i < assets.size(); ++i) rho[i] = assets[i] > cut ? rho_large : rho_small;
      break;
    }
    case RatioKind::LinearLog: {
      const double avg = mean(assets);
      for (std::size_t i = 0; i < assets.size(); ++i) rho[i] = intercept + slope * std::log(assets[i] / avg);
      break;
    }
    case RatioKind::Tiered: {
      require(tier_ratios.size() == tier_quantiles.size() + 1, Errc::InvalidArgument,
              "tiered rule needs one more ratio than quantile cutoffs");
      std::vector<double> cuts;
      for (double q : tier_quantiles) cuts.push_back(quantile_type7(assets, q));
      for (std::size_t i = 0; i < assets.size(); ++i) {
        std::size_t tier = 0;
        while (tier < cuts.size() && !(assets[i] > cuts[tier])) ++tier;
        rho[i] = tier_ratios[tier];
      }
      break;
    }
  }
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0 && rho[i] < 1.0)) {
      fail(Errc::InvalidRatio, "ratio for bank " + std::to_string(i) + " is " + std::to_string(rho[i]) +
                                   ", outside (0,1)");
    }
  }
  return rho;
}

void ReconstructionConfig::validate() const {
  if (method == ReconstructionMethod::Fitness) {
    require(fitness_alpha > 0.0, Errc::InvalidArgument, "fitness_alpha must be positive");
  }
  require(min_edge_threshold >= 0.0, Errc::InvalidArgument, "min_edge_threshold must be non-negative");
}

double ExposureMatrix::max_marginal_error() const {
  const double rows = (X.rowwise().sum() - row_targets).cwiseAbs().maxCoeff();
  const double cols = (X.colwise().sum().transpose() - col_targets).cwiseAbs().maxCoeff();
  return std::max(rows, cols);
}

std::size_t ExposureMatrix::edge_count() const { return static_cast<std::size_t>((X.array() > 0.0).count()); }

Aggregates interbank_aggregates(std::span<const double> assets, const RatioRule& rule) {
  require(!assets.empty(), Errc::InvalidArgument, "no assets supplied");
  for (double t : assets) {
    require(std::isfinite(t) && t > 0.0, Errc::InvalidArgument, "assets must be strictly positive");
  }
  Aggregates out;
  out.ratios = rule.ratios(assets);
  out.A.resize(static_cast<Eigen::Index>(assets.size()));
  for (std::size_t i = 0; i < assets.size(); ++i) out.A(static_cast<Eigen::Index>(i)) = out.ratios[i] * assets[i];
  out.L = out.A;
  return out;
}

namespace {

void check_marginals(const Eigen::VectorXd& A, const Eigen::VectorXd& L) {
  require(A.size() == L.size(), Errc::DimensionMismatch, "row and column targets differ in length");
  require(A.size() >= 2, Errc::InvalidArgument, "need at least two banks");
  require(A.allFinite() && L.allFinite() && A.minCoeff() >= 0.0 && L.minCoeff() >= 0.0, Errc::InvalidArgument,
          "targets must be finite and non-negative");
  const double total = A.sum();
  if (!(total > 0.0)) fail(Errc::ZeroTotal, "aggregate exposures sum to zero");
  require(std::abs(total - L.sum()) <= 1e-9 * total, Errc::InvalidArgument,
          "row and column targets must have equal totals");
}

ExposureMatrix empty_result(const Eigen::VectorXd& A, const Eigen::VectorXd& L, std::string method) {
  ExposureMatrix out;
  out.X = Eigen::MatrixXd::Zero(A.size(), A.size());
  out.row_targets = A;
  out.col_targets = L;
  out.method = std::move(method);
  return out;
}

}  // namespace

ExposureMatrix max_entropy(const Eigen::VectorXd& A, const Eigen::VectorXd& L, const IpfOptions& opts) {
  check_marginals(A, L);
  const Eigen::Index n = A.size();
  const double total = A.sum();
  ExposureMatrix out = empty_result(A, L, "maxent");

  // With a zero diagonal, bank k can place at most total - L_k and absorb at
  // most total - A_k, so A_k + L_k <= total. Equality forces a unique star.
  const double slack = 1e-12 * total;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double load = A(k) + L(k);
    if (load > total + slack) {
      fail(Errc::InfeasibleMarginals, "bank " + std::to_string(k) +
                                          " holds more than half of all exposures; no zero-diagonal matrix exists");
    }
    if (load >= total - slack) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == k) continue;
        out.X(k, j) = L(j);
        out.X(j, k) = A(j);
      }
      out.ipf_sweeps = 0;
      return out;
    }
  }

  out.X = A * L.transpose() / total;
  out.X.diagonal().setZero();
  const double tol = opts.tolerance * A.maxCoeff();
  out.converged = false;
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    const Eigen::VectorXd rows = out.X.rowwise().sum();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (rows(i) > 0.0) out.X.row(i) *= A(i) / rows(i);
    }
    const Eigen::VectorXd cols = out.X.colwise().sum().transpose();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (cols(j) > 0.0) out.X.col(j) *= L(j) / cols(j);
    }
    out.ipf_sweeps = sweep;
    const double row_err = (out.X.rowwise().sum() - A).cwiseAbs().maxCoeff();
    if (row_err <= tol) {
      out.converged = true;
      break;
    }
  }
  if (A == L) {
    const Eigen::MatrixXd sym = 0.5 * (out.X + out.X.transpose());
    out.X = sym;
  }
  return out;
}

double silverman_bandwidth(std::span<const double> sample) {
  require(sample.size() >= 2, Errc::InvalidArgument, "bandwidth needs at least two points");
  const double sd = sample_sd(sample);
  const double iqr = quantile_type7(sample, 0.75) - quantile_type7(sample, 0.25);
  return 0.9 * std::min(sd, iqr / 1.34) * std::pow(static_cast<double>(sample.size()), -0.2);
}

double gaussian_kde(std::span<const double> sample, double bandwidth, double x) {
  require(bandwidth > 0.0, Errc::DegenerateBandwidth, "bandwidth must be positive");
  const double norm = 1.0 / (static_cast<double>(sample.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  double acc = 0.0;
  for (double s : sample) {
    const double z = (x - s) / bandwidth;
    acc += std::exp(-0.5 * z * z);
  }
  return norm * acc;
}

ExposureMatrix kde_weights(std::span<const double> assets, double total_interbank, const KdeOptions& opts) {
  require(assets.size() >= 2, Errc::InvalidArgument, "KDE weighting needs at least two banks");
  require(total_interbank > 0.0 && std::isfinite(total_interbank), Errc::InvalidArgument,
          "total interbank exposure must be positive");
  for (double t : assets) require(std::isfinite(t) && t > 0.0, Errc::InvalidArgument, "assets must be positive");
  const auto n = static_cast<Eigen::Index>(assets.size());

  ExposureMatrix out;
  out.method = "kde";
  out.marginals_fitted = false;

  Eigen::VectorXd density = Eigen::VectorXd::Ones(n);
  double h = silverman_bandwidth(assets);
  if (!(h > 0.0)) {
    if (!opts.allow_fallback) fail(Errc::DegenerateBandwidth, "Silverman bandwidth is zero");
    const double sd = sample_sd(assets);
    h = 0.9 * sd * std::pow(static_cast<double>(n), -0.2);
    out.bandwidth_fallback = true;
    if (!(h > 0.0)) {
      out.uniform_fallback = true;
      h = 0.0;
    }
  }
  out.bandwidth = h;
  if (!out.uniform_fallback) {
    for (Eigen::Index i = 0; i < n; ++i) density(i) = gaussian_kde(assets, h, assets[static_cast<std::size_t>(i)]);
  }

  Eigen::MatrixXd w = density * density.transpose();
  w.diagonal().setZero();
  out.X = w * (total_interbank / w.sum());
  out.row_targets = out.X.rowwise().sum();
  out.col_targets = out.X.colwise().sum().transpose();
  return out;
}

ExposureMatrix fitness_model(std::span<const double> assets, double alpha, double total_interbank) {
  require(assets.size() >= 2, Errc::InvalidArgument, "fitness model needs at least two banks");
  require(alpha >= 0.0 && std::isfinite(alpha), Errc::InvalidArgument, "fitness exponent must be finite and >= 0");
  require(total_interbank > 0.0, Errc::InvalidArgument, "total interbank exposure must be positive");
  const auto n = static_cast<Eigen::Index>(assets.size());
  Eigen::VectorXd eta(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = assets[static_cast<std::size_t>(i)];
    require(std::isfinite(t) && t > 0.0, Errc::InvalidArgument, "assets must be positive");
    eta(i) = std::pow(t, alpha);
  }
  // Rescale for range safety; the normalisation removes the factor.
  eta /= eta.maxCoeff();
  Eigen::MatrixXd w = eta * eta.transpose();
  w.diagonal().setZero();

  ExposureMatrix out;
  out.method = "fitness";
  out.X = w * (total_interbank / w.sum());
  out.row_targets = out.X.rowwise().sum();
  out.col_targets = out.X.colwise().sum().transpose();
  return out;
}

ExposureMatrix min_density(const Eigen::VectorXd& A, const Eigen::VectorXd& L) {
  check_marginals(A, L);
  const Eigen::Index n = A.size();
  ExposureMatrix out = empty_result(A, L, "mindensity");
  const double total = A.sum();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (A(k) + L(k) > total * (1.0 + 1e-12)) {
      fail(Errc::InfeasibleMarginals, "bank " + std::to_string(k) + " holds more than half of all exposures");
    }
  }

  Eigen::VectorXd r = A;
  Eigen::VectorXd c = L * (total / L.sum());
  const double tol = 1e-13 * std::max(A.maxCoeff(), L.maxCoeff());
  const auto max_steps = 4 * n + 4;
  for (Eigen::Index step = 0; step < max_steps && r.sum() > tol; ++step) {
    // Pivot on the bank with the largest combined residual: a residual problem
    // stays feasible iff r_k + c_k <= sum(r) for every k.
    const Eigen::VectorXd load = r + c;
    Eigen::Index pivot = 0;
    load.maxCoeff(&pivot);
    Eigen::Index i = 0;
    Eigen::Index j = 0;
    if (r(pivot) >= c(pivot) && r(pivot) > tol) {
      i = pivot;
      Eigen::VectorXd cc = c;
      cc(pivot) = -1.0;
      cc.maxCoeff(&j);
    } else {
      j = pivot;
      Eigen::VectorXd rr = r;
      rr(pivot) = -1.0;
      rr.maxCoeff(&i);
    }
    double cap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != i && k != j) cap = std::min(cap, r.sum() - load(k));
    }
    const double m = std::min({r(i), c(j), cap});
    if (!(m > tol)) break;
    out.X(i, j) += m;
    r(i) -= m;
    c(j) -= m;
    if (r(i) <= tol) r(i) = 0.0;
    if (c(j) <= tol) c(j) = 0.0;
  }
  return out;
}

ExposureMatrix apply_threshold(const ExposureMatrix& X, double epsilon) {
  require(epsilon >= 0.0, Errc::InvalidArgument, "threshold must be non-negative");
  ExposureMatrix out = X;
  out.threshold = epsilon;
  out.thresholded = true;
  bool removed = false;
  const Eigen::Index n = X.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double s = X.X(i, j) + X.X(j, i);
      if (s <= epsilon && s > 0.0) {
        out.X(i, j) = 0.0;
        out.X(j, i) = 0.0;
        removed = true;
      }
    }
  }
  if (removed) out.marginals_fitted = false;
  out.all_zero = (out.X.array() == 0.0).all();
  return out;
}

ExposureMatrix reconstruct(std::span<const double> assets, const ReconstructionConfig& cfg,
                           std::vector<std::string> bank_ids) {
  cfg.validate();
  const auto agg = interbank_aggregates(assets, cfg.ratio_rule);
  ExposureMatrix out;
  switch (cfg.method) {
    case ReconstructionMethod::MaxEntropy: out = max_entropy(agg.A, agg.L); break;
    case ReconstructionMethod::Kde: out = kde_weights(assets, agg.A.sum()); break;
    case ReconstructionMethod::Fitness: out = fitness_model(assets, cfg.fitness_alpha, agg.A.sum()); break;
    case ReconstructionMethod::MinDensity: out = min_density(agg.A, agg.L); break;
  }
  if (bank_ids.empty()) {
    for (std::size_t i = 0; i < assets.size(); ++i) bank_ids.push_back(std::to_string(i));
  }
  require(bank_ids.size() == assets.size(), Errc::DimensionMismatch, "bank_ids and assets differ in length");
  out.bank_ids = std::move(bank_ids);
  return out;
}

}  // namespace clab
