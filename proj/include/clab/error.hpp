#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace clab {

enum class Errc {
  // ingest
  MalformedRow,
  DuplicateKey,
  MissingColumn,
  EmptyResult,
  YearAbsent,
  // reconstruct
  InvalidRatio,
  ZeroTotal,
  InfeasibleMarginals,
  DegenerateBandwidth,
  // graph
  SingletonGraph,
  DegenerateVector,
  TooSmall,
  // contagion
  NonPositiveLambda2,
  InvalidEpsilon,
  DimensionMismatch,
  Disconnected,
  UnsupportedForcing,
  // stats
  TooFewPoints,
  NonPositiveSample,
  InsufficientData,
  CollinearDesign,
  TooFewClusters,
  ZeroVariance,
  // generic
  InvalidArgument,
  NotConverged,
  Io,
  Usage,
};

std::string_view errc_name(Errc code) noexcept;

/// Broad failure class; the CLI maps each class to one exit code.
enum class ErrorClass { Usage, Io, Model };

ErrorClass error_class(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code), detail_(message) {}

  Errc code() const noexcept { return code_; }
  /// Message without the error-code prefix.
  const std::string& detail() const noexcept { return detail_; }
  ErrorClass error_class() const noexcept { return clab::error_class(code_); }

 private:
  Errc code_;
  std::string detail_;
};

/// Same error with `context` prepended to the message, e.g. "year 2021".
inline Error with_context(const Error& e, const std::string& context) {
  return Error(e.code(), context + ": " + e.detail());
}

[[noreturn]] inline void fail(Errc code, const std::string& message) { throw Error(code, message); }

inline void require(bool condition, Errc code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace clab
