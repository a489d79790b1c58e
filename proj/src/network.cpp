#include "clab/network.hpp"

#include <algorithm>
#include <cmath>

#include "clab/error.hpp"

namespace clab {

WeightedNetwork::WeightedNetwork(std::vector<std::string> bank_ids, Eigen::MatrixXd weights)
    : bank_ids_(std::move(bank_ids)), W_(std::move(weights)) {
  require(W_.rows() == W_.cols(), Errc::DimensionMismatch, "weight matrix must be square");
  if (bank_ids_.empty()) {
    for (Eigen::Index i = 0; i < W_.rows(); ++i) bank_ids_.push_back(std::to_string(i));
  }
  require(static_cast<Eigen::Index>(bank_ids_.size()) == W_.rows(), Errc::DimensionMismatch,
          "bank_ids and weight matrix differ in size");
  require(W_.allFinite(), Errc::InvalidArgument, "weights must be finite");
  for (Eigen::Index i = 0; i < W_.rows(); ++i) {
    require(W_(i, i) == 0.0, Errc::InvalidArgument, "weight matrix must have a zero diagonal");
    for (Eigen::Index j = i + 1; j < W_.cols(); ++j) {
      require(W_(i, j) == W_(j, i), Errc::InvalidArgument, "weight matrix must be exactly symmetric");
      require(W_(i, j) >= 0.0, Errc::InvalidArgument, "weights must be non-negative");
    }
  }
}

WeightedNetwork::WeightedNetwork(Eigen::MatrixXd weights) : WeightedNetwork({}, std::move(weights)) {}

Eigen::MatrixXd WeightedNetwork::laplacian() const {
  Eigen::MatrixXd L = -W_;
  L.diagonal() = degrees();
  return L;
}

std::size_t WeightedNetwork::edge_count() const {
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < W_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < W_.cols(); ++j)
      if (W_(i, j) > 0.0) ++count;
  return count;
}

std::vector<std::vector<Eigen::Index>> WeightedNetwork::components() const {
  const Eigen::Index n = size();
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<Eigen::Index>> comps;
  for (Eigen::Index s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    const int id = static_cast<int>(comps.size());
    comps.emplace_back();
    std::vector<Eigen::Index> stack{s};
    label[static_cast<std::size_t>(s)] = id;
    while (!stack.empty()) {
      const Eigen::Index u = stack.back();
      stack.pop_back();
      comps.back().push_back(u);
      for (Eigen::Index v = 0; v < n; ++v) {
        if (W_(u, v) > 0.0 && label[static_cast<std::size_t>(v)] < 0) {
          label[static_cast<std::size_t>(v)] = id;
          stack.push_back(v);
        }
      }
    }
    std::sort(comps.back().begin(), comps.back().end());
  }
  std::stable_sort(comps.begin(), comps.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return comps;
}

std::vector<Eigen::Index> WeightedNetwork::largest_component() const {
  auto comps = components();
  if (comps.empty()) return {};
  return comps.front();
}

WeightedNetwork WeightedNetwork::subgraph(const std::vector<Eigen::Index>& nodes) const {
  const auto m = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd sub(m, m);
  std::vector<std::string> ids;
  for (Eigen::Index a = 0; a < m; ++a) {
    ids.push_back(bank_ids_[static_cast<std::size_t>(nodes[static_cast<std::size_t>(a)])]);
    for (Eigen::Index b = 0; b < m; ++b) {
      sub(a, b) = W_(nodes[static_cast<std::size_t>(a)], nodes[static_cast<std::size_t>(b)]);
    }
  }
  return WeightedNetwork(std::move(ids), std::move(sub));
}

WeightedNetwork build_network(const ExposureMatrix& X, double epsilon) {
  require(epsilon >= 0.0, Errc::InvalidArgument, "edge threshold must be non-negative");
  const Eigen::Index n = X.size();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double s = X.X(i, j) + X.X(j, i);
      if (s > epsilon) {
        W(i, j) = s;
        W(j, i) = s;
      }
    }
  }
  return WeightedNetwork(X.bank_ids, std::move(W));
}

Eigen::VectorXd degree_sequence(const WeightedNetwork& net, bool weighted) {
  if (weighted) return net.degrees();
  return (net.weights().array() > 0.0).cast<double>().rowwise().sum();
}

namespace graphs {

WeightedNetwork complete(Eigen::Index n, double w) {
  Eigen::MatrixXd W = Eigen::MatrixXd::Constant(n, n, w);
  W.diagonal().setZero();
  return WeightedNetwork(std::move(W));
}

WeightedNetwork path(Eigen::Index n, double w) {
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) W(i, i + 1) = W(i + 1, i) = w;
  return WeightedNetwork(std::move(W));
}

WeightedNetwork star(Eigen::Index n, double w) {
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) W(0, i) = W(i, 0) = w;
  return WeightedNetwork(std::move(W));
}

}  // namespace graphs

}  // namespace clab
