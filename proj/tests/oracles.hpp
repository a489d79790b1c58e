#pragma once

// Reference implementations used only by the tests. They share no code with
// the library and favour obviousness over speed.

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

/// Cyclic Jacobi rotations; returns ascending eigenvalues of a symmetric matrix.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd A, double tol = 1e-14);

/// Plain RAS from A L^T / sum(A) with a zero diagonal, iterated to `tol`.
Eigen::MatrixXd ras(const std::vector<double>& A, const std::vector<double>& L, double tol, int max_sweeps = 200000);

/// Explicit Euler for du/dt = -(D L + kappa I) u.
Eigen::VectorXd forward_euler(const Eigen::MatrixXd& W, double D, double kappa, Eigen::VectorXd u, double t,
                              double dt);

/// Least squares by Gaussian elimination on the normal equations.
std::vector<double> normal_equations(const std::vector<std::vector<double>>& X, const std::vector<double>& y);

/// Betweenness from Floyd-Warshall distances and shortest-path counts, edge length 1 / w.
std::vector<double> betweenness(const Eigen::MatrixXd& W);

/// Mean absolute difference form of the Gini coefficient.
double gini(const std::vector<double>& x);

/// Hyndman-Fan type 7 quantile written from the definition.
double quantile7(std::vector<double> x, double q);

/// Random symmetric weights on a connected graph: a spanning path plus extra
/// edges with probability p, weights uniform in [lo, hi].
Eigen::MatrixXd random_connected(int n, double p, double lo, double hi, std::mt19937_64& rng);

/// Laplacian D - W.
Eigen::MatrixXd laplacian(const Eigen::MatrixXd& W);

}  // namespace oracle
