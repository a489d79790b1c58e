#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "clab/lanczos.hpp"
#include "clab/network.hpp"

namespace clab {

enum class EigenSolverKind { Auto, Dense, Iterative };

struct SpectrumOptions {
  EigenSolverKind solver = EigenSolverKind::Auto;
  /// Auto uses the dense solver up to this many nodes.
  Eigen::Index dense_limit = 100;
  LanczosOptions lanczos{};
};

/// Eigenvalue counted as zero when below this fraction of max(1, lambda_n).
inline constexpr double kZeroEigenTolerance = 1e-6;

struct SpectrumResult {
  /// Ascending. Dense path: the full Laplacian spectrum. Iterative path: one
  /// zero per component followed by the smallest nonzero eigenvalues of the
  /// largest component (full_spectrum = false).
  Eigen::VectorXd eigenvalues;
  /// Unit Fiedler vector of the largest component embedded in all n nodes
  /// (zero elsewhere), oriented so its first nonzero entry is positive.
  Eigen::VectorXd fiedler_vector;
  std::vector<std::size_t> component_sizes;
  std::vector<Eigen::Index> component_nodes;
  double lambda2 = 0.0;
  bool full_spectrum = true;
  std::string solver;

  double lambda_max() const { return eigenvalues.size() ? eigenvalues.maxCoeff() : 0.0; }
  std::size_t zero_count() const;
};

SpectrumResult laplacian_spectrum(const WeightedNetwork& net, const SpectrumOptions& opts = {});

struct FiedlerPartition {
  std::vector<Eigen::Index> positive;  // includes zero entries
  std::vector<Eigen::Index> negative;
};

FiedlerPartition fiedler_partition(const SpectrumResult& spec);

}  // namespace clab
