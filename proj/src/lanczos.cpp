#include "clab/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "clab/error.hpp"

namespace clab {

namespace {

// Classical Gram-Schmidt applied twice against `basis` (first `k` columns) and
// the deflation space.
void orthogonalize(Eigen::VectorXd& w, const Eigen::MatrixXd& basis, Eigen::Index k, const Eigen::MatrixXd& deflate) {
  for (int pass = 0; pass < 2; ++pass) {
    if (deflate.cols() > 0) w -= deflate * (deflate.transpose() * w);
    if (k > 0) w -= basis.leftCols(k) * (basis.leftCols(k).transpose() * w);
  }
}

}  // namespace

LanczosResult lanczos_smallest(const SymmetricOperator& op, Eigen::Index n, const Eigen::MatrixXd& deflate,
                               const LanczosOptions& opts) {
  require(n >= 1, Errc::InvalidArgument, "operator dimension must be positive");
  require(deflate.cols() == 0 || deflate.rows() == n, Errc::DimensionMismatch, "deflation space has wrong length");
  const Eigen::Index dim = n - deflate.cols();
  require(dim >= 1, Errc::InvalidArgument, "deflation leaves an empty space");
  const Eigen::Index nev = std::min<Eigen::Index>(opts.nev, dim);
  Eigen::Index m = opts.max_basis > 0 ? opts.max_basis : std::max<Eigen::Index>(2 * nev + 20, 40);
  m = std::min(m, dim);
  // Ritz vectors kept across a restart.
  const Eigen::Index keep = std::min<Eigen::Index>(std::max<Eigen::Index>(nev + (m - nev) / 2, nev), m - 1);

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  auto random_direction = [&](const Eigen::MatrixXd& basis, Eigen::Index k) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::VectorXd v(n);
      for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
      orthogonalize(v, basis, k, deflate);
      const double norm = v.norm();
      if (norm > 1e-8) return Eigen::VectorXd(v / norm);
    }
    fail(Errc::NotConverged, "could not extend the Krylov basis");
  };

  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, m);
  Eigen::MatrixXd AV = Eigen::MatrixXd::Zero(n, m);
  LanczosResult result;
  Eigen::Index k = 0;
  Eigen::VectorXd next = random_direction(V, 0);
  double scale = 0.0;

  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    result.restarts = restart;
    while (k < m) {
      V.col(k) = next;
      Eigen::VectorXd w(n);
      op(next, w);
      ++result.matvecs;
      AV.col(k) = w;
      scale = std::max(scale, w.norm());
      ++k;
      orthogonalize(w, V, k, deflate);
      const double beta = w.norm();
      if (k < dim) {
        next = beta > 1e-12 * std::max(scale, 1.0) ? Eigen::VectorXd(w / beta) : random_direction(V, k);
      } else {
        next = Eigen::VectorXd::Zero(n);
      }
    }

    Eigen::MatrixXd T = V.leftCols(k).transpose() * AV.leftCols(k);
    T = 0.5 * (T + T.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(T);
    const Eigen::VectorXd& theta = eig.eigenvalues();
    const Eigen::MatrixXd& S = eig.eigenvectors();

    const Eigen::MatrixXd Y = V.leftCols(k) * S.leftCols(nev);
    const Eigen::MatrixXd AY = AV.leftCols(k) * S.leftCols(nev);
    Eigen::VectorXd res(nev);
    for (Eigen::Index i = 0; i < nev; ++i) res(i) = (AY.col(i) - theta(i) * Y.col(i)).norm();
    const double bound = opts.tol * std::max(1.0, theta.cwiseAbs().maxCoeff());

    result.values = theta.head(nev);
    result.vectors = Y;
    result.residuals = res;
    if (res.maxCoeff() <= bound || k >= dim) {
      result.converged = res.maxCoeff() <= std::max(bound, 1e-8 * std::max(1.0, scale));
      return result;
    }

    // Thick restart: keep the `keep` smallest Ritz pairs; the pending Krylov
    // direction is orthogonal to all of them.
    const Eigen::MatrixXd Vk = V.leftCols(k) * S.leftCols(keep);
    const Eigen::MatrixXd AVk = AV.leftCols(k) * S.leftCols(keep);
    V.leftCols(keep) = Vk;
    AV.leftCols(keep) = AVk;
    k = keep;
    orthogonalize(next, V, k, deflate);
    const double nn = next.norm();
    next = nn > 1e-8 ? Eigen::VectorXd(next / nn) : random_direction(V, k);
  }
  result.converged = false;
  return result;
}

}  // namespace clab
