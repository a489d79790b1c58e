#include "clab/stats/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "clab/error.hpp"
#include "clab/parallel.hpp"
#include "clab/pipeline.hpp"
#include "clab/spectrum.hpp"

namespace clab {

namespace {

// C(n, k), saturating at `cap` + 1.
long long capped_binomial(long long n, long long k, long long cap) {
  k = std::min(k, n - k);
  long double c = 1.0L;
  for (long long i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(cap)) return cap + 1;
  }
  return std::llround(c);
}

double mean_difference(const std::vector<double>& pooled, const std::vector<char>& in_a, std::size_t n_a) {
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < pooled.size(); ++i) (in_a[i] ? sa : sb) += pooled[i];
  return sa / static_cast<double>(n_a) - sb / static_cast<double>(pooled.size() - n_a);
}

bool at_least_as_extreme(double t, double observed, double tol) { return std::abs(t) >= std::abs(observed) - tol; }

}  // namespace

PermutationResult permutation_test(std::span<const double> a, std::span<const double> b, int n_perm,
                                   std::uint64_t seed, unsigned threads) {
  require(!a.empty() && !b.empty(), Errc::InsufficientData, "both groups must be non-empty");
  require(n_perm >= 1, Errc::InvalidArgument, "n_perm must be positive");

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n_a = a.size();
  const std::size_t n = pooled.size();
  double scale = 0.0;
  for (double v : pooled) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * std::max(1.0, scale);

  PermutationResult out;
  out.n_perm = n_perm;
  std::vector<char> observed_mask(n, 0);
  std::fill(observed_mask.begin(), observed_mask.begin() + static_cast<std::ptrdiff_t>(n_a), 1);
  out.observed = mean_difference(pooled, observed_mask, n_a);

  const long long splits = capped_binomial(static_cast<long long>(n), static_cast<long long>(n_a), n_perm);
  if (splits <= n_perm) {
    out.exhaustive = true;
    std::vector<char> mask = observed_mask;  // lexicographically largest arrangement
    do {
      if (mask == observed_mask) continue;
      ++out.evaluated;
      if (at_least_as_extreme(mean_difference(pooled, mask, n_a), out.observed, tol)) ++out.extreme;
    } while (std::prev_permutation(mask.begin(), mask.end()));
    out.p_value = static_cast<double>(out.extreme + 1) / static_cast<double>(splits + 1);
    return out;
  }

  std::vector<char> hit(static_cast<std::size_t>(n_perm), 0);
  parallel_for(hit.size(), threads, [&](std::size_t p) {
    auto rng = stream_rng(seed, p);
    std::vector<double> shuffled = pooled;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    hit[p] = at_least_as_extreme(mean_difference(shuffled, observed_mask, n_a), out.observed, tol);
  });
  out.evaluated = n_perm;
  out.extreme = std::count(hit.begin(), hit.end(), 1);
  out.p_value = static_cast<double>(out.extreme + 1) / static_cast<double>(n_perm + 1);
  return out;
}

PanelPermutationResult panel_permutation_test(const BankPanel& panel, int year_a, int year_b,
                                              const ReconstructionConfig& recon, int n_perm, std::uint64_t seed,
                                              unsigned threads) {
  require(n_perm >= 1, Errc::InvalidArgument, "n_perm must be positive");
  require(year_a != year_b, Errc::InvalidArgument, "the two years must differ");
  const YearSlice sa = panel.year_slice(year_a);
  const YearSlice sb = panel.year_slice(year_b);

  // For each bank in year a, the index of its year-b observation (or npos).
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> partner(sa.bank_ids.size(), npos);
  std::vector<std::size_t> back(sb.bank_ids.size(), npos);
  for (std::size_t i = 0; i < sa.bank_ids.size(); ++i) {
    for (std::size_t j = 0; j < sb.bank_ids.size(); ++j) {
      if (sa.bank_ids[i] == sb.bank_ids[j]) {
        partner[i] = j;
        back[j] = i;
        break;
      }
    }
  }

  PanelPermutationResult out;
  out.year_a = year_a;
  out.year_b = year_b;
  out.n_perm = n_perm;
  out.swappable_banks = static_cast<std::size_t>(std::count_if(partner.begin(), partner.end(),
                                                               [&](std::size_t j) { return j != npos; }));
  out.lambda2_a = lambda2_for_assets(sa.assets, recon);
  out.lambda2_b = lambda2_for_assets(sb.assets, recon);
  out.observed = out.lambda2_a - out.lambda2_b;

  out.null.assign(static_cast<std::size_t>(n_perm), 0.0);
  parallel_for(out.null.size(), threads, [&](std::size_t p) {
    auto rng = stream_rng(seed, p);
    std::bernoulli_distribution coin(0.5);
    std::vector<double> xa = sa.assets;
    std::vector<double> xb = sb.assets;
    for (std::size_t i = 0; i < partner.size(); ++i) {
      if (partner[i] == npos) continue;
      if (coin(rng)) std::swap(xa[i], xb[partner[i]]);
    }
    out.null[p] = lambda2_for_assets(xa, recon) - lambda2_for_assets(xb, recon);
  });

  const double tol = 1e-12 * std::max(1.0, std::abs(out.observed));
  const auto r = std::count_if(out.null.begin(), out.null.end(),
                               [&](double t) { return at_least_as_extreme(t, out.observed, tol); });
  out.p_value = static_cast<double>(r + 1) / static_cast<double>(n_perm + 1);
  return out;
}

PlaceboResult placebo_null(const WeightedNetwork& net, int n_draws, std::uint64_t seed, unsigned threads) {
  require(n_draws >= 1, Errc::InvalidArgument, "n_draws must be positive");
  const auto& W = net.weights();
  const Eigen::Index n = net.size();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;
  std::vector<double> weights;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (W(i, j) > 0.0) {
        edges.emplace_back(i, j);
        weights.push_back(W(i, j));
      }
    }
  }
  require(edges.size() >= 2, Errc::TooSmall, "placebo needs at least 2 edges");

  PlaceboResult out;
  out.edges = edges.size();
  out.observed = laplacian_spectrum(net).lambda2;
  out.null.assign(static_cast<std::size_t>(n_draws), 0.0);
  parallel_for(out.null.size(), threads, [&](std::size_t d) {
    auto rng = stream_rng(seed, d);
    std::vector<double> w = weights;
    std::shuffle(w.begin(), w.end(), rng);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      M(edges[e].first, edges[e].second) = w[e];
      M(edges[e].second, edges[e].first) = w[e];
    }
    out.null[d] = laplacian_spectrum(WeightedNetwork(net.bank_ids(), std::move(M))).lambda2;
  });

  const double tol = 1e-9 * std::max(1.0, std::abs(out.observed));
  std::size_t less = 0, equal = 0;
  for (double v : out.null) {
    if (std::abs(v - out.observed) <= tol) {
      ++equal;
    } else if (v < out.observed) {
      ++less;
    }
  }
  out.percentile = 100.0 * (static_cast<double>(less) + 0.5 * static_cast<double>(equal)) /
                   static_cast<double>(out.null.size());
  out.ties_undefined = equal == out.null.size();
  return out;
}

}  // namespace clab
