#pragma once

#include <Eigen/Dense>
#include <vector>

#include "clab/network.hpp"

namespace clab {

struct CascadeConfig {
  Eigen::Index source = 0;
  double s0 = 1.0;
  double theta = 0.5;
  double kappa = 0.0;  // per-step decay in [0, 1)

  void validate(Eigen::Index n) const;
};

struct CascadeTrace {
  std::size_t size = 0;
  /// Nodes in the order they joined (ascending index within one sweep).
  std::vector<Eigen::Index> members;
  /// Sweep in which each member joined.
  std::vector<int> entry_step;
  Eigen::VectorXd final_distress;
  int steps = 0;
};

/// Threshold cascade: each sweep adds every node above theta that is not yet
/// in the cascade; each new member transfers w_ij times its entry distress to
/// its neighbours exactly once, then all distress decays by (1 - kappa).
CascadeTrace cascade_trace(const WeightedNetwork& net, const CascadeConfig& cfg);

std::size_t cascade(const WeightedNetwork& net, const CascadeConfig& cfg);

}  // namespace clab
