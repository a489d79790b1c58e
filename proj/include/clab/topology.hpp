#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <span>

#include "clab/network.hpp"

namespace clab {

struct Centralization {
  double degree = 0.0;
  double betweenness = 0.0;
  double eigenvector = 0.0;
};

/// Concentration, mixing and spectral summaries of the largest component.
struct TopologyReport {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double gini = 0.0;
  double hhi = 0.0;
  std::map<int, double> top_k_share;
  double cr3 = 0.0;
  /// Empty when the degree variance across edge endpoints is zero.
  std::optional<double> assortativity;
  double spectral_radius = 0.0;
  double lambda2 = 0.0;
  double lambda_n = 0.0;
  double spectral_gap = 0.0;
  double effective_resistance = 0.0;
  double weighted_avg_degree = 0.0;
  double density = 0.0;
  Centralization centralization;
};

double gini_coefficient(std::span<const double> values);
double herfindahl(std::span<const double> values);
/// Share of the k largest values in the total (1 when k >= n).
double top_k_share(std::span<const double> values, int k);

/// Pearson correlation of weighted endpoint degrees over edges, each edge
/// counted in both directions. Empty when either side has zero variance.
std::optional<double> degree_assortativity(const WeightedNetwork& net);

/// Brandes betweenness with edge length 1 / w_ij, unnormalised, undirected.
Eigen::VectorXd weighted_betweenness(const WeightedNetwork& net);

/// Perron eigenvector of W scaled to unit maximum.
Eigen::VectorXd eigenvector_centrality(const WeightedNetwork& net);

/// n * sum_{k >= 2} 1 / lambda_k over a connected Laplacian spectrum.
double effective_resistance(const Eigen::VectorXd& ascending_laplacian_eigenvalues);

TopologyReport topology_report(const WeightedNetwork& net);

}  // namespace clab
