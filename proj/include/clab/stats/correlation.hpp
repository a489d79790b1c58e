#pragma once

#include <span>
#include <string_view>

namespace clab {

enum class CorrelationMode { Levels, Changes, PctChanges };

CorrelationMode parse_correlation_mode(std::string_view name);

double pearson(std::span<const double> a, std::span<const double> b);

/// Pearson correlation of the levels, first differences or percentage changes.
double series_correlation(std::span<const double> a, std::span<const double> b, CorrelationMode mode);

}  // namespace clab
