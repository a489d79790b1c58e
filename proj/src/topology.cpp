#include "clab/topology.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "clab/error.hpp"
#include "clab/spectrum.hpp"

namespace clab {

double gini_coefficient(std::span<const double> values) {
  require(!values.empty(), Errc::InvalidArgument, "Gini of empty sequence");
  std::vector<double> x(values.begin(), values.end());
  std::stable_sort(x.begin(), x.end());
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  require(total > 0.0, Errc::ZeroVariance, "Gini undefined for an all-zero sequence");
  const auto n = static_cast<double>(x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (2.0 * static_cast<double>(i + 1) - n - 1.0) * x[i];
  return std::max(0.0, acc / (n * total));
}

double herfindahl(std::span<const double> values) {
  const double total = std::accumulate(values.begin(), values.end(), 0.0);
  require(total > 0.0, Errc::ZeroVariance, "HHI undefined for an all-zero sequence");
  double acc = 0.0;
  for (double v : values) acc += (v / total) * (v / total);
  return acc;
}

double top_k_share(std::span<const double> values, int k) {
  require(k >= 1, Errc::InvalidArgument, "k must be positive");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end(), std::greater<>());
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  require(total > 0.0, Errc::ZeroVariance, "shares undefined for an all-zero sequence");
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), x.size());
  return std::accumulate(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(take), 0.0) / total;
}

std::optional<double> degree_assortativity(const WeightedNetwork& net) {
  const Eigen::VectorXd d = net.degrees();
  const auto& W = net.weights();
  double sx = 0.0, sxx = 0.0, sxy = 0.0, count = 0.0;
  for (Eigen::Index i = 0; i < net.size(); ++i) {
    for (Eigen::Index j = 0; j < net.size(); ++j) {
      if (i == j || W(i, j) <= 0.0) continue;
      // symmetric edge list, so the y-marginal equals the x-marginal
      sx += d(i);
      sxx += d(i) * d(i);
      sxy += d(i) * d(j);
      count += 1.0;
    }
  }
  if (count == 0.0) return std::nullopt;
  const double mean = sx / count;
  const double var = sxx / count - mean * mean;
  if (!(var > 1e-14 * std::max(1.0, sxx / count))) return std::nullopt;
  return std::clamp((sxy / count - mean * mean) / var, -1.0, 1.0);
}

Eigen::VectorXd weighted_betweenness(const WeightedNetwork& net) {
  const Eigen::Index n = net.size();
  const auto& W = net.weights();
  Eigen::VectorXd bc = Eigen::VectorXd::Zero(n);
  constexpr double inf = std::numeric_limits<double>::infinity();

  for (Eigen::Index s = 0; s < n; ++s) {
    std::vector<double> dist(static_cast<std::size_t>(n), inf);
    std::vector<double> sigma(static_cast<std::size_t>(n), 0.0);
    std::vector<std::vector<Eigen::Index>> preds(static_cast<std::size_t>(n));
    std::vector<bool> done(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> order;
    dist[static_cast<std::size_t>(s)] = 0.0;
    sigma[static_cast<std::size_t>(s)] = 1.0;

    // Dense Dijkstra: O(n^2) per source suits the near-complete graphs here.
    for (Eigen::Index step = 0; step < n; ++step) {
      Eigen::Index u = -1;
      for (Eigen::Index v = 0; v < n; ++v) {
        const auto vi = static_cast<std::size_t>(v);
        if (!done[vi] && dist[vi] < inf && (u < 0 || dist[vi] < dist[static_cast<std::size_t>(u)])) u = v;
      }
      if (u < 0) break;
      const auto ui = static_cast<std::size_t>(u);
      done[ui] = true;
      order.push_back(u);
      for (Eigen::Index v = 0; v < n; ++v) {
        const auto vi = static_cast<std::size_t>(v);
        if (v == u || W(u, v) <= 0.0 || done[vi]) continue;
        const double alt = dist[ui] + 1.0 / W(u, v);
        const double tie = 1e-12 * std::max(alt, dist[vi] < inf ? dist[vi] : 0.0);
        if (alt < dist[vi] - tie) {
          dist[vi] = alt;
          sigma[vi] = sigma[ui];
          preds[vi].assign(1, u);
        } else if (std::abs(alt - dist[vi]) <= tie) {
          sigma[vi] += sigma[ui];
          preds[vi].push_back(u);
        }
      }
    }

    std::vector<double> delta(static_cast<std::size_t>(n), 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto wi = static_cast<std::size_t>(*it);
      for (Eigen::Index v : preds[wi]) {
        const auto vi = static_cast<std::size_t>(v);
        delta[vi] += sigma[vi] / sigma[wi] * (1.0 + delta[wi]);
      }
      if (*it != s) bc(*it) += delta[wi];
    }
  }
  return bc / 2.0;
}

Eigen::VectorXd eigenvector_centrality(const WeightedNetwork& net) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(net.weights());
  require(eig.info() == Eigen::Success, Errc::NotConverged, "adjacency eigensolver failed");
  Eigen::VectorXd v = eig.eigenvectors().col(net.size() - 1).cwiseAbs();
  const double top = v.maxCoeff();
  require(top > 0.0, Errc::DegenerateVector, "adjacency has no Perron vector");
  return v / top;
}

double effective_resistance(const Eigen::VectorXd& eigenvalues) {
  require(eigenvalues.size() >= 2, Errc::TooSmall, "need at least two eigenvalues");
  double acc = 0.0;
  for (Eigen::Index k = 1; k < eigenvalues.size(); ++k) {
    require(eigenvalues(k) > 0.0, Errc::Disconnected, "zero eigenvalue beyond the first");
    acc += 1.0 / eigenvalues(k);
  }
  return static_cast<double>(eigenvalues.size()) * acc;
}

TopologyReport topology_report(const WeightedNetwork& full) {
  const auto comp = full.largest_component();
  require(comp.size() >= 3, Errc::TooSmall, "largest component has fewer than 3 nodes");
  const WeightedNetwork net = comp.size() == static_cast<std::size_t>(full.size()) ? full : full.subgraph(comp);
  const auto n = static_cast<double>(net.size());

  TopologyReport rep;
  rep.nodes = static_cast<std::size_t>(net.size());
  rep.edges = net.edge_count();
  rep.density = static_cast<double>(rep.edges) / (n * (n - 1.0) / 2.0);

  const Eigen::VectorXd d = net.degrees();
  const std::span<const double> deg(d.data(), static_cast<std::size_t>(d.size()));
  rep.gini = gini_coefficient(deg);
  rep.hhi = herfindahl(deg);
  for (int k : {1, 3, 5, 10}) rep.top_k_share[k] = top_k_share(deg, k);
  rep.cr3 = rep.top_k_share[3];
  rep.assortativity = degree_assortativity(net);
  rep.weighted_avg_degree = d.mean();

  SpectrumOptions dense;
  dense.solver = EigenSolverKind::Dense;
  const auto spec = laplacian_spectrum(net, dense);
  rep.lambda2 = spec.lambda2;
  rep.lambda_n = spec.lambda_max();
  rep.spectral_gap = spec.eigenvalues(1) - spec.eigenvalues(0);
  rep.effective_resistance = effective_resistance(spec.eigenvalues);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> adj(net.weights(), Eigen::EigenvaluesOnly);
  rep.spectral_radius = adj.eigenvalues().cwiseAbs().maxCoeff();

  const Eigen::VectorXd k = degree_sequence(net, false);
  rep.centralization.degree = (k.maxCoeff() - k.array()).sum() / ((n - 1.0) * (n - 2.0));
  const Eigen::VectorXd b = weighted_betweenness(net) / ((n - 1.0) * (n - 2.0) / 2.0);
  rep.centralization.betweenness = (b.maxCoeff() - b.array()).sum() / (n - 1.0);
  const Eigen::VectorXd e = eigenvector_centrality(net);
  rep.centralization.eigenvector = (1.0 - e.array()).sum() / (n - 2.0);
  return rep;
}

}  // namespace clab
