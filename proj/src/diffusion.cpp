#include "clab/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "clab/error.hpp"
#include "clab/spectrum.hpp"

namespace clab {

void DiffusionParams::validate() const {
  require(D > 0.0 && std::isfinite(D), Errc::InvalidArgument, "diffusion coefficient D must be positive");
  require(kappa >= 0.0 && std::isfinite(kappa), Errc::InvalidArgument, "kappa must be non-negative");
}

double effective_decay(double lambda2, const DiffusionParams& params) {
  params.validate();
  if (!(lambda2 > 0.0)) fail(Errc::NonPositiveLambda2, "lambda2 must be positive");
  return std::sqrt(lambda2 / params.D) + params.kappa;
}

double critical_distance(double kappa_eff, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail(Errc::InvalidEpsilon, "epsilon must lie in (0,1)");
  require(kappa_eff > 0.0, Errc::InvalidArgument, "kappa_eff must be positive");
  return -std::log(epsilon) / kappa_eff;
}

double kappa_ratio(double lambda2_new, double lambda2_old) {
  require(lambda2_new > 0.0 && lambda2_old > 0.0, Errc::NonPositiveLambda2, "lambda2 values must be positive");
  return std::sqrt(lambda2_new / lambda2_old);
}

double prediction_proportional(double d_lambda_rel, double d_D_rel) {
  require(d_lambda_rel > -1.0 && d_D_rel > -1.0, Errc::InvalidArgument, "relative changes must exceed -1");
  return 0.5 * (d_lambda_rel - d_D_rel);
}

double prediction_exact(double d_lambda_rel, double d_D_rel) {
  require(d_lambda_rel > -1.0 && d_D_rel > -1.0, Errc::InvalidArgument, "relative changes must exceed -1");
  return std::sqrt((1.0 + d_lambda_rel) / (1.0 + d_D_rel)) - 1.0;
}

double dominance_share(double lambda2, const DiffusionParams& params) {
  params.validate();
  if (!(lambda2 > 0.0)) fail(Errc::NonPositiveLambda2, "lambda2 must be positive");
  const double network = std::sqrt(lambda2 / params.D);
  return network / (network + params.kappa);
}

DiffusionSolver::DiffusionSolver(const WeightedNetwork& net, const DiffusionParams& params) : params_(params) {
  params_.validate();
  for (const auto& [key, value] : params_.forcing) {
    if (value != 0.0) fail(Errc::UnsupportedForcing, "nonzero forcing terms are not integrated");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(net.laplacian());
  require(eig.info() == Eigen::Success, Errc::NotConverged, "dense eigensolver failed");
  lambda_ = eig.eigenvalues();
  Q_ = eig.eigenvectors();
}

DistressState DiffusionSolver::solve(const DistressState& u0, double t) const {
  require(u0.u.size() == Q_.rows(), Errc::DimensionMismatch,
          "initial state has " + std::to_string(u0.u.size()) + " entries, network has " + std::to_string(Q_.rows()));
  require(t >= 0.0 && std::isfinite(t), Errc::InvalidArgument, "time must be finite and >= 0");
  require(u0.u.allFinite(), Errc::InvalidArgument, "initial state must be finite");
  if (t == 0.0) return {u0.u, u0.t};
  const Eigen::VectorXd decay = (-(params_.D * lambda_.array() + params_.kappa) * t).exp();
  const Eigen::VectorXd coeff = Q_.transpose() * u0.u;
  return {Q_ * decay.cwiseProduct(coeff), u0.t + t};
}

std::vector<DistressState> DiffusionSolver::trajectory(const DistressState& u0, const std::vector<double>& times) const {
  std::vector<DistressState> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(solve(u0, t));
  return out;
}

DistressState solve_diffusion(const WeightedNetwork& net, const DiffusionParams& params, const DistressState& u0,
                              double t) {
  return DiffusionSolver(net, params).solve(u0, t);
}

double temporal_decay_rate(const WeightedNetwork& net, const DiffusionParams& params) {
  params.validate();
  require(net.size() >= 2, Errc::TooSmall, "network needs at least two nodes");
  if (net.components().size() != 1) fail(Errc::Disconnected, "network is not connected");
  SpectrumOptions dense;
  dense.solver = EigenSolverKind::Dense;
  return params.D * laplacian_spectrum(net, dense).lambda2 + params.kappa;
}

DecayFit verify_decay_rate(const WeightedNetwork& net, const DiffusionParams& params, Eigen::Index source) {
  require(source >= 0 && source < net.size(), Errc::InvalidArgument, "source index out of range");
  DecayFit fit;
  fit.gamma = temporal_decay_rate(net, params);
  const DiffusionSolver solver(net, params);
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  const Eigen::MatrixXd& Q = solver.eigenvectors();
  const Eigen::Index n = net.size();
  const double gamma = fit.gamma;

  if (n >= 3) {
    const double gap = params.D * (lambda(2) - lambda(1));
    if (gap > 1e-9 * gamma) {
      // Higher modes fall below 1e-4 of the slope's scale after t0.
      fit.burn_in = std::max(0.0, std::log(gap / gamma / 1e-4)) / gap;
    }
    // keep exp(-gamma t) far from double underflow
    fit.burn_in = std::min(fit.burn_in, 600.0 / gamma);
  }

  // Residual dynamics in eigen-coordinates with the uniform mode removed, so
  // late-time values do not cancel against the much larger mean.
  Eigen::VectorXd u0 = Eigen::VectorXd::Zero(n);
  u0(source) = 1.0;
  Eigen::VectorXd coeff = Q.transpose() * u0;
  coeff(0) = 0.0;

  const double lo = 0.01 / gamma;
  const double hi = 5.0 / gamma;
  constexpr int points = 20;
  for (int k = 0; k < points; ++k) {
    const double t = fit.burn_in + lo * std::pow(hi / lo, static_cast<double>(k) / (points - 1));
    const Eigen::VectorXd decay = (-(params.D * lambda.array() + params.kappa) * t).exp();
    Eigen::VectorXd r = Q * decay.cwiseProduct(coeff);
    r.array() -= r.mean();
    fit.times.push_back(t);
    fit.log_residual.push_back(std::log(r.norm()));
  }

  const double tm = std::accumulate(fit.times.begin(), fit.times.end(), 0.0) / points;
  const double ym = std::accumulate(fit.log_residual.begin(), fit.log_residual.end(), 0.0) / points;
  double sxy = 0.0, sxx = 0.0;
  for (int k = 0; k < points; ++k) {
    sxy += (fit.times[static_cast<std::size_t>(k)] - tm) * (fit.log_residual[static_cast<std::size_t>(k)] - ym);
    sxx += (fit.times[static_cast<std::size_t>(k)] - tm) * (fit.times[static_cast<std::size_t>(k)] - tm);
  }
  fit.fitted_slope = sxy / sxx;
  return fit;
}

}  // namespace clab
