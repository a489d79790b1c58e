#pragma once

#include <Eigen/Dense>
#include <map>
#include <utility>
#include <vector>

#include "clab/network.hpp"

namespace clab {

/// du/dt = -D L u - kappa u + f. Only f = 0 is integrated.
struct DiffusionParams {
  double D = 1.0;
  double kappa = 0.0;
  std::map<std::pair<Eigen::Index, double>, double> forcing;

  void validate() const;
};

struct DistressState {
  Eigen::VectorXd u;
  double t = 0.0;
};

/// sqrt(lambda2 / D) + kappa.
double effective_decay(double lambda2, const DiffusionParams& params);

/// -ln(epsilon) / kappa_eff.
double critical_distance(double kappa_eff, double epsilon);

/// sqrt(lambda2_new / lambda2_old).
double kappa_ratio(double lambda2_new, double lambda2_old);

/// First-order relative change in kappa: (dlambda/lambda - dD/D) / 2.
double prediction_proportional(double d_lambda_rel, double d_D_rel);

/// Exact counterpart: sqrt((1 + dlambda) / (1 + dD)) - 1.
double prediction_exact(double d_lambda_rel, double d_D_rel);

/// sqrt(lambda2 / D) / (sqrt(lambda2 / D) + kappa).
double dominance_share(double lambda2, const DiffusionParams& params);

/// Spectral propagator exp(-(D L + kappa I) t) built once per network.
class DiffusionSolver {
 public:
  DiffusionSolver(const WeightedNetwork& net, const DiffusionParams& params);

  DistressState solve(const DistressState& u0, double t) const;
  /// States at each time in `times`, all propagated from u0.
  std::vector<DistressState> trajectory(const DistressState& u0, const std::vector<double>& times) const;

  const Eigen::VectorXd& eigenvalues() const noexcept { return lambda_; }
  const Eigen::MatrixXd& eigenvectors() const noexcept { return Q_; }

 private:
  DiffusionParams params_;
  Eigen::VectorXd lambda_;
  Eigen::MatrixXd Q_;
};

DistressState solve_diffusion(const WeightedNetwork& net, const DiffusionParams& params, const DistressState& u0,
                              double t);

/// gamma = D lambda2 + kappa; throws Disconnected unless the whole network is connected.
double temporal_decay_rate(const WeightedNetwork& net, const DiffusionParams& params);

struct DecayFit {
  double gamma = 0.0;         // D lambda2 + kappa from the spectrum
  double fitted_slope = 0.0;  // slope of log ||u(t) - mean(u(t))||
  double burn_in = 0.0;
  std::vector<double> times;
  std::vector<double> log_residual;

  double relative_error() const { return std::abs(-fitted_slope - gamma) / gamma; }
};

/// Propagates a unit impulse at `source` and regresses the log-norm of the
/// uniform-orthogonal residual on time over a 20-point geometric grid on
/// [t0 + 0.01/gamma, t0 + 5/gamma]. t0 is a burn-in that lets the second
/// mode dominate the faster ones (zero when lambda3 == lambda2).
DecayFit verify_decay_rate(const WeightedNetwork& net, const DiffusionParams& params, Eigen::Index source);

}  // namespace clab
