#include "clab/error.hpp"

namespace clab {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::DuplicateKey: return "DuplicateKey";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::EmptyResult: return "EmptyResult";
    case Errc::YearAbsent: return "YearAbsent";
    case Errc::InvalidRatio: return "InvalidRatio";
    case Errc::ZeroTotal: return "ZeroTotal";
    case Errc::InfeasibleMarginals: return "InfeasibleMarginals";
    case Errc::DegenerateBandwidth: return "DegenerateBandwidth";
    case Errc::SingletonGraph: return "SingletonGraph";
    case Errc::DegenerateVector: return "DegenerateVector";
    case Errc::TooSmall: return "TooSmall";
    case Errc::NonPositiveLambda2: return "NonPositiveLambda2";
    case Errc::InvalidEpsilon: return "InvalidEpsilon";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::Disconnected: return "Disconnected";
    case Errc::UnsupportedForcing: return "UnsupportedForcing";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::NonPositiveSample: return "NonPositiveSample";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::CollinearDesign: return "CollinearDesign";
    case Errc::TooFewClusters: return "TooFewClusters";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NotConverged: return "NotConverged";
    case Errc::Io: return "Io";
    case Errc::Usage: return "Usage";
  }
  return "Unknown";
}

ErrorClass error_class(Errc code) noexcept {
  switch (code) {
    case Errc::Usage:
    case Errc::InvalidArgument:
      return ErrorClass::Usage;
    case Errc::Io:
    case Errc::MalformedRow:
    case Errc::DuplicateKey:
    case Errc::MissingColumn:
      return ErrorClass::Io;
    default:
      return ErrorClass::Model;
  }
}

}  // namespace clab
