#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

namespace clab {

/// y = A x for a symmetric operator A.
using SymmetricOperator = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

struct LanczosOptions {
  int nev = 5;
  /// Krylov basis size before a restart; 0 picks max(2 nev + 20, 40).
  int max_basis = 0;
  int max_restarts = 1000;
  /// Converged when every wanted residual is <= tol * max(1, |theta|_max).
  double tol = 1e-11;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

struct LanczosResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
  Eigen::VectorXd residuals;
  int restarts = 0;
  int matvecs = 0;
  bool converged = false;
};

/// Smallest eigenpairs of a symmetric operator restricted to the orthogonal
/// complement of `deflate` (orthonormal columns, may be empty). Thick-restart
/// Lanczos with full reorthogonalisation.
LanczosResult lanczos_smallest(const SymmetricOperator& op, Eigen::Index n, const Eigen::MatrixXd& deflate,
                               const LanczosOptions& opts = {});

}  // namespace clab
