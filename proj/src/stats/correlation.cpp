#include "clab/stats/correlation.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "clab/error.hpp"

namespace clab {

CorrelationMode parse_correlation_mode(std::string_view name) {
  if (name == "levels") return CorrelationMode::Levels;
  if (name == "changes") return CorrelationMode::Changes;
  if (name == "pct_changes" || name == "pct") return CorrelationMode::PctChanges;
  fail(Errc::InvalidArgument, "unknown correlation mode '" + std::string(name) + "'");
}

double pearson(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), Errc::DimensionMismatch, "series lengths differ");
  require(a.size() >= 2, Errc::InsufficientData, "correlation needs at least 2 points");
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) fail(Errc::ZeroVariance, "series has zero variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

namespace {

std::vector<double> transform(std::span<const double> x, CorrelationMode mode) {
  if (mode == CorrelationMode::Levels) return {x.begin(), x.end()};
  std::vector<double> out;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (mode == CorrelationMode::Changes) {
      out.push_back(x[i] - x[i - 1]);
    } else {
      require(x[i - 1] != 0.0, Errc::InvalidArgument, "percentage change from a zero level");
      out.push_back((x[i] - x[i - 1]) / x[i - 1]);
    }
  }
  return out;
}

}  // namespace

double series_correlation(std::span<const double> a, std::span<const double> b, CorrelationMode mode) {
  require(a.size() == b.size(), Errc::DimensionMismatch, "series lengths differ");
  const std::size_t min_len = mode == CorrelationMode::Levels ? 2 : 3;
  require(a.size() >= min_len, Errc::InsufficientData,
          "correlation needs at least " + std::to_string(min_len) + " points in this mode");
  const auto ta = transform(a, mode);
  const auto tb = transform(b, mode);
  return pearson(ta, tb);
}

}  // namespace clab
