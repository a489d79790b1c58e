#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "clab/error.hpp"
#include "clab/reconstruct.hpp"
#include "oracles.hpp"

using namespace clab;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd v(std::initializer_list<double> x) {
  VectorXd out(static_cast<Eigen::Index>(x.size()));
  Eigen::Index i = 0;
  for (double a : x) out(i++) = a;
  return out;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::Usage;
}

void check_marginals(const ExposureMatrix& X, double tol) {
  CHECK((X.X.rowwise().sum() - X.row_targets).cwiseAbs().maxCoeff() <= tol);
  CHECK((X.X.colwise().sum().transpose() - X.col_targets).cwiseAbs().maxCoeff() <= tol);
  CHECK(X.X.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(X.X.minCoeff() >= 0.0);
}

}  // namespace

TEST_CASE("interbank aggregates under each ratio rule") {
  const std::vector<double> T{100, 200};
  const auto fixed = interbank_aggregates(T, RatioRule::fixed_ratio(0.05));
  CHECK(fixed.A(0) == doctest::Approx(5));
  CHECK(fixed.A(1) == doctest::Approx(10));
  CHECK(fixed.L == fixed.A);

  const std::vector<double> T2{100, 1000};
  const auto size = interbank_aggregates(T2, RatioRule::size_threshold(0.03, 0.07, 0.75));
  CHECK(size.A(0) == doctest::Approx(7));
  CHECK(size.A(1) == doctest::Approx(30));

  const std::vector<double> same{50, 50, 50};
  const auto lin = interbank_aggregates(same, RatioRule::linear_log(0.08, -0.03));
  for (double r : lin.ratios) CHECK(r == doctest::Approx(0.08));

  const std::vector<double> T3{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 100};
  const auto tiers = interbank_aggregates(T3, RatioRule::tiered({0.95, 0.75}, {0.02, 0.05, 0.08}));
  CHECK(tiers.ratios.back() == doctest::Approx(0.02));
  CHECK(tiers.ratios.front() == doctest::Approx(0.08));
  CHECK(tiers.ratios[16] == doctest::Approx(0.05));

  CHECK(code_of([&] { interbank_aggregates(T, RatioRule::fixed_ratio(1.5)); }) == Errc::InvalidRatio);
  CHECK(code_of([&] { interbank_aggregates(T2, RatioRule::linear_log(0.01, 0.5)); }) == Errc::InvalidRatio);
}

TEST_CASE("max entropy hand cases") {
  const auto two = max_entropy(v({1, 1}), v({1, 1}));
  CHECK(two.X(0, 1) == doctest::Approx(1.0));
  CHECK(two.X(1, 0) == doctest::Approx(1.0));

  // A_3 + L_3 equals the total: the only zero-diagonal matrix is a star on bank 3.
  const auto star = max_entropy(v({1, 1, 2}), v({1, 1, 2}));
  check_marginals(star, 1e-12);
  const MatrixXd slow = oracle::ras({1, 1, 2}, {1, 1, 2}, 1e-12, 200000);
  CHECK((star.X - slow).cwiseAbs().maxCoeff() < 1e-4);
  CHECK(star.X(0, 1) == 0.0);
  CHECK(star.X(2, 0) == doctest::Approx(1.0));

  CHECK(code_of([] { max_entropy(v({0, 0, 0}), v({0, 0, 0})); }) == Errc::ZeroTotal);
  CHECK(code_of([] { max_entropy(v({1, 1, 5}), v({1, 1, 5})); }) == Errc::InfeasibleMarginals);
}

TEST_CASE("max entropy agrees with a plain RAS oracle") {
  std::mt19937_64 rng(21);
  std::lognormal_distribution<double> size(3.0, 0.8);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 12;
    std::vector<double> A(static_cast<std::size_t>(n)), L;
    double total = 0.0, biggest = 0.0;
    for (auto& a : A) {
      a = size(rng);
      total += a;
      biggest = std::max(biggest, a);
    }
    if (2.0 * biggest >= total) continue;
    L = A;
    std::shuffle(L.begin(), L.end(), rng);
    double lmax = 0.0;
    bool feasible = true;
    for (int k = 0; k < n; ++k) {
      feasible = feasible && A[static_cast<std::size_t>(k)] + L[static_cast<std::size_t>(k)] < 0.95 * total;
      lmax = std::max(lmax, L[static_cast<std::size_t>(k)]);
    }
    if (!feasible) continue;
    const auto X = max_entropy(Eigen::Map<VectorXd>(A.data(), n), Eigen::Map<VectorXd>(L.data(), n));
    CHECK(X.converged);
    check_marginals(X, 1e-9 * biggest);
    const MatrixXd ref = oracle::ras(A, L, 1e-13 * biggest);
    CHECK((X.X - ref).cwiseAbs().maxCoeff() <= 1e-8 * biggest);
  }
}

TEST_CASE("max entropy homogeneity and symmetry") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(1.0, 5.0);
  VectorXd A(8);
  for (auto& a : A) a = u(rng);
  const auto X = max_entropy(A, A);
  CHECK((X.X - X.X.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (double c : {0.5, 3.0, 1e4}) {
    const auto Y = max_entropy(c * A, c * A);
    CHECK((Y.X - c * X.X).cwiseAbs().maxCoeff() <= 1e-10 * c * A.maxCoeff());
  }
}

TEST_CASE("KDE weights") {
  const std::vector<double> eq{5, 5};
  const auto flat = kde_weights(eq, 10.0);
  CHECK(flat.uniform_fallback);
  CHECK_FALSE(flat.marginals_fitted);
  CHECK(flat.X(0, 1) == doctest::Approx(5.0));
  CHECK(flat.X(1, 0) == doctest::Approx(5.0));
  CHECK(code_of([&] { kde_weights(eq, 10.0, {false}); }) == Errc::DegenerateBandwidth);
  CHECK(code_of([&] { kde_weights(eq, 0.0); }) == Errc::InvalidArgument);

  // Hand evaluation for assets {1, 2, 10}: sd = sqrt(30.5), IQR = 6 - 1.5.
  const std::vector<double> x{1, 2, 10};
  const double h = 0.9 * std::min(std::sqrt(30.5), 4.5 / 1.34) * std::pow(3.0, -0.2);
  CHECK(silverman_bandwidth(x) == doctest::Approx(h).epsilon(1e-14));
  double f[3];
  for (int i = 0; i < 3; ++i) {
    f[i] = 0.0;
    for (double s : x) f[i] += std::exp(-0.5 * std::pow((x[static_cast<std::size_t>(i)] - s) / h, 2));
    f[i] /= 3.0 * h * std::sqrt(2.0 * std::numbers::pi);
  }
  double norm = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) norm += f[i] * f[j];
  const auto K = kde_weights(x, 7.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double expect = i == j ? 0.0 : 7.0 * f[i] * f[j] / norm;
      CHECK(K.X(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  CHECK(std::abs(K.X.sum() - 7.0) <= 1e-12 * 7.0);

  // Zero IQR but positive sd: fallback bandwidth.
  const std::vector<double> spike{1, 1, 1, 1, 9};
  const auto S = kde_weights(spike, 1.0);
  CHECK(S.bandwidth_fallback);
  CHECK_FALSE(S.uniform_fallback);
  CHECK(S.bandwidth == doctest::Approx(0.9 * std::sqrt(12.8) * std::pow(5.0, -0.2)));
}

TEST_CASE("fitness model") {
  const std::vector<double> eq{3, 3, 3};
  const auto E = fitness_model(eq, 1.0, 12.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(E.X(i, j) == doctest::Approx(i == j ? 0.0 : 2.0));

  const std::vector<double> mixed{1, 50, 900};
  const auto U = fitness_model(mixed, 0.0, 6.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(U.X(i, j) == doctest::Approx(i == j ? 0.0 : 1.0));

  const std::vector<double> two{1, 2};
  const auto T = fitness_model(two, 1.0, 3.0);
  CHECK(T.X(0, 1) == doctest::Approx(1.5));
  CHECK(T.X(1, 0) == doctest::Approx(1.5));
  CHECK((T.X - T.X.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

namespace {

// Smallest support of a feasible zero-diagonal 3x3 transport plan, by exhaustive search.
int min_support_3x3(const VectorXd& A, const VectorXd& L) {
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) cells.emplace_back(i, j);
  for (int size = 1; size <= 6; ++size) {
    for (int mask = 0; mask < 64; ++mask) {
      if (__builtin_popcount(static_cast<unsigned>(mask)) != size) continue;
      std::vector<int> used;
      for (int c = 0; c < 6; ++c)
        if (mask & (1 << c)) used.push_back(c);
      MatrixXd M = MatrixXd::Zero(6, size);
      VectorXd b(6);
      b << A, L;
      for (int k = 0; k < size; ++k) {
        const auto [i, j] = cells[static_cast<std::size_t>(used[static_cast<std::size_t>(k)])];
        M(i, k) = 1.0;
        M(3 + j, k) = 1.0;
      }
      const VectorXd x = M.completeOrthogonalDecomposition().solve(b);
      if ((M * x - b).norm() < 1e-9 && x.minCoeff() > -1e-12) return size;
    }
  }
  return -1;
}

}  // namespace

TEST_CASE("min density hand cases") {
  const auto two = min_density(v({1, 1}), v({1, 1}));
  CHECK(two.X(0, 1) == doctest::Approx(1.0));
  CHECK(two.edge_count() == 2);

  const auto A = v({3, 2, 1});
  const auto X = min_density(A, A);
  check_marginals(X, 1e-12);
  CHECK(static_cast<int>(X.edge_count()) == min_support_3x3(A, A));

  const auto one = min_density(v({1, 0}), v({0, 1}));
  CHECK(one.X(0, 1) == doctest::Approx(1.0));
  CHECK(one.edge_count() == 1);
  CHECK(code_of([] { min_density(v({0, 0}), v({0, 0})); }) == Errc::ZeroTotal);
}

TEST_CASE("min density stays feasible and sparse on random marginals") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 30;
    VectorXd A(n), L(n);
    for (int i = 0; i < n; ++i) A(i) = u(rng);
    if (trial % 2) {
      L = A;
    } else {
      for (int i = 0; i < n; ++i) L(i) = u(rng);
      L *= A.sum() / L.sum();
    }
    bool feasible = true;
    for (int k = 0; k < n; ++k) feasible = feasible && A(k) + L(k) <= A.sum();
    if (!feasible) continue;
    const auto X = min_density(A, L);
    check_marginals(X, 1e-9 * std::max(A.maxCoeff(), L.maxCoeff()));
    CHECK(static_cast<int>(X.edge_count()) <= 2 * n - 1);
  }
}

TEST_CASE("threshold zeroes weak pairs in both directions") {
  ExposureMatrix X;
  X.X = MatrixXd::Zero(3, 3);
  X.X(0, 1) = 0.4;
  X.X(1, 0) = 0.5;
  X.X(0, 2) = 0.7;
  X.X(2, 0) = 0.6;
  X.X(1, 2) = 2.0;
  X.row_targets = X.X.rowwise().sum();
  X.col_targets = X.X.colwise().sum().transpose();

  const auto same = apply_threshold(X, 0.0);
  CHECK(same.X == X.X);
  const auto cut = apply_threshold(X, 1.0);
  CHECK(cut.X(0, 1) == 0.0);
  CHECK(cut.X(1, 0) == 0.0);
  CHECK(cut.X(0, 2) == 0.7);
  CHECK(cut.X(2, 0) == 0.6);
  CHECK(cut.X(1, 2) == 2.0);
  CHECK_FALSE(cut.marginals_fitted);
  const auto all = apply_threshold(X, 5.0);
  CHECK(all.all_zero);
}

TEST_CASE("reconstruct dispatches and validates") {
  const std::vector<double> T{100, 200, 300, 400};
  ReconstructionConfig cfg;
  for (auto m : {ReconstructionMethod::MaxEntropy, ReconstructionMethod::Kde, ReconstructionMethod::Fitness,
                 ReconstructionMethod::MinDensity}) {
    cfg.method = m;
    const auto X = reconstruct(T, cfg);
    CHECK(X.X.sum() == doctest::Approx(50.0));
    CHECK(X.bank_ids.size() == 4);
    CHECK(parse_method(method_name(m)) == m);
  }
  cfg.min_edge_threshold = -1;
  CHECK(code_of([&] { reconstruct(T, cfg); }) == Errc::InvalidArgument);
  CHECK(code_of([] { parse_method("nope"); }) == Errc::InvalidArgument);
}
