#include "clab/cascade.hpp"

#include <cmath>

#include "clab/error.hpp"

namespace clab {

void CascadeConfig::validate(Eigen::Index n) const {
  require(source >= 0 && source < n, Errc::InvalidArgument, "cascade source out of range");
  require(s0 > 0.0 && std::isfinite(s0), Errc::InvalidArgument, "initial shock must be positive");
  require(theta > 0.0 && std::isfinite(theta), Errc::InvalidArgument, "threshold must be positive");
  require(kappa >= 0.0 && kappa < 1.0, Errc::InvalidArgument, "cascade decay must lie in [0,1)");
}

CascadeTrace cascade_trace(const WeightedNetwork& net, const CascadeConfig& cfg) {
  const Eigen::Index n = net.size();
  cfg.validate(n);
  const auto& W = net.weights();

  CascadeTrace trace;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  u(cfg.source) = cfg.s0;
  std::vector<bool> in_cascade(static_cast<std::size_t>(n), false);

  for (int step = 0;; ++step) {
    std::vector<Eigen::Index> entrants;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!in_cascade[static_cast<std::size_t>(i)] && u(i) > cfg.theta) entrants.push_back(i);
    }
    if (entrants.empty()) {
      trace.steps = step;
      break;
    }
    Eigen::VectorXd transfer = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i : entrants) {
      in_cascade[static_cast<std::size_t>(i)] = true;
      trace.members.push_back(i);
      trace.entry_step.push_back(step);
      transfer += W.col(i) * u(i);
    }
    u = (1.0 - cfg.kappa) * (u + transfer);
  }
  trace.size = trace.members.size();
  trace.final_distress = u;
  return trace;
}

std::size_t cascade(const WeightedNetwork& net, const CascadeConfig& cfg) { return cascade_trace(net, cfg).size; }

}  // namespace clab
