#include "clab/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "clab/error.hpp"

namespace clab {

namespace {

constexpr double kSignTolerance = 1e-10;

void orient(Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > kSignTolerance) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

std::size_t SpectrumResult::zero_count() const {
  const double tol = kZeroEigenTolerance * std::max(1.0, lambda_max());
  return static_cast<std::size_t>((eigenvalues.array().abs() < tol).count());
}

SpectrumResult laplacian_spectrum(const WeightedNetwork& net, const SpectrumOptions& opts) {
  const Eigen::Index n = net.size();
  require(n >= 2, Errc::TooSmall, "spectrum needs at least two nodes");
  const auto comps = net.components();

  SpectrumResult out;
  for (const auto& c : comps) out.component_sizes.push_back(c.size());
  out.component_nodes = comps.front();
  const auto m = static_cast<Eigen::Index>(out.component_nodes.size());
  if (m < 2) fail(Errc::SingletonGraph, "largest connected component has a single node");

  const bool dense = opts.solver == EigenSolverKind::Dense ||
                     (opts.solver == EigenSolverKind::Auto && n <= opts.dense_limit);
  const WeightedNetwork sub = comps.size() == 1 ? net : net.subgraph(out.component_nodes);
  Eigen::VectorXd q2(m);

  if (dense) {
    out.solver = "dense";
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(net.laplacian(), Eigen::ComputeEigenvectors);
    require(full.info() == Eigen::Success, Errc::NotConverged, "dense eigensolver failed");
    out.eigenvalues = full.eigenvalues();
    if (comps.size() == 1) {
      out.lambda2 = out.eigenvalues(1);
      q2 = full.eigenvectors().col(1);
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> part(sub.laplacian(), Eigen::ComputeEigenvectors);
      require(part.info() == Eigen::Success, Errc::NotConverged, "dense eigensolver failed");
      out.lambda2 = part.eigenvalues()(1);
      q2 = part.eigenvectors().col(1);
    }
  } else {
    out.solver = "lanczos";
    out.full_spectrum = false;
    const Eigen::MatrixXd L = sub.laplacian();
    const SymmetricOperator op = [&L](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = L * x; };
    const Eigen::MatrixXd ones = Eigen::VectorXd::Constant(m, 1.0 / std::sqrt(static_cast<double>(m)));
    const auto res = lanczos_smallest(op, m, ones, opts.lanczos);
    require(res.converged, Errc::NotConverged, "Lanczos did not converge");
    out.lambda2 = res.values(0);
    q2 = res.vectors.col(0);
    out.eigenvalues.resize(static_cast<Eigen::Index>(comps.size()) + res.values.size());
    out.eigenvalues.head(static_cast<Eigen::Index>(comps.size())).setZero();
    out.eigenvalues.tail(res.values.size()) = res.values;
  }

  q2.normalize();
  out.fiedler_vector = Eigen::VectorXd::Zero(n);
  for (Eigen::Index a = 0; a < m; ++a) out.fiedler_vector(out.component_nodes[static_cast<std::size_t>(a)]) = q2(a);
  orient(out.fiedler_vector);
  return out;
}

FiedlerPartition fiedler_partition(const SpectrumResult& spec) {
  const double tol = kZeroEigenTolerance * std::max(1.0, spec.lambda_max());
  require(spec.lambda2 > tol, Errc::DegenerateVector, "algebraic connectivity is zero");
  FiedlerPartition part;
  for (Eigen::Index node : spec.component_nodes) {
    if (spec.fiedler_vector(node) >= -kSignTolerance) {
      part.positive.push_back(node);
    } else {
      part.negative.push_back(node);
    }
  }
  if (part.positive.empty() || part.negative.empty()) {
    fail(Errc::DegenerateVector, "Fiedler vector entries share one sign");
  }
  return part;
}

}  // namespace clab
