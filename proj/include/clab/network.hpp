#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "clab/reconstruct.hpp"

namespace clab {

/// Undirected weighted graph on banks: W symmetric, zero diagonal, W >= 0.
class WeightedNetwork {
 public:
  WeightedNetwork() = default;
  /// Validates symmetry, a zero diagonal and non-negative finite weights.
  WeightedNetwork(std::vector<std::string> bank_ids, Eigen::MatrixXd weights);
  explicit WeightedNetwork(Eigen::MatrixXd weights);

  const std::vector<std::string>& bank_ids() const noexcept { return bank_ids_; }
  const Eigen::MatrixXd& weights() const noexcept { return W_; }
  Eigen::Index size() const noexcept { return W_.rows(); }

  Eigen::VectorXd degrees() const { return W_.rowwise().sum(); }
  /// L = D - W.
  Eigen::MatrixXd laplacian() const;
  std::size_t edge_count() const;

  /// Connected components (edges with positive weight), each sorted ascending,
  /// ordered by decreasing size then smallest member.
  std::vector<std::vector<Eigen::Index>> components() const;
  std::vector<Eigen::Index> largest_component() const;

  /// Induced subgraph on `nodes` (in the given order).
  WeightedNetwork subgraph(const std::vector<Eigen::Index>& nodes) const;

 private:
  std::vector<std::string> bank_ids_;
  Eigen::MatrixXd W_;
};

/// w_ij = x_ij + x_ji for pairs whose symmetric sum exceeds epsilon.
WeightedNetwork build_network(const ExposureMatrix& X, double epsilon);

/// Weighted degrees sum_j w_ij, or counts of positive entries.
Eigen::VectorXd degree_sequence(const WeightedNetwork& net, bool weighted);

namespace graphs {
WeightedNetwork complete(Eigen::Index n, double w = 1.0);
WeightedNetwork path(Eigen::Index n, double w = 1.0);
/// Node 0 is the hub.
WeightedNetwork star(Eigen::Index n, double w = 1.0);
}  // namespace graphs

}  // namespace clab
