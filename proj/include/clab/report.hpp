#pragma once

#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "clab/cascade.hpp"
#include "clab/diffusion.hpp"
#include "clab/pipeline.hpp"
#include "clab/reconstruct.hpp"
#include "clab/spectrum.hpp"
#include "clab/stats/bootstrap.hpp"
#include "clab/stats/chow.hpp"
#include "clab/stats/did.hpp"
#include "clab/stats/distfit.hpp"
#include "clab/stats/permutation.hpp"
#include "clab/topology.hpp"

namespace clab {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// {"schema_version": 1, "command": ..., "config": ..., "results": ...}
Json envelope(const std::string& command, Json config, Json results);

/// Deterministic serialisation (two-space indent, trailing newline).
std::string dump_json(const Json& j);

/// %.17g: enough digits to round-trip any double.
std::string format_double(double x);

Json to_json(const ReconstructionConfig& cfg);
Json to_json(const DiffusionParams& p);
Json to_json(const ExposureMatrix& X);
Json to_json(const SpectrumResult& s);
Json to_json(const TopologyReport& t);
Json to_json(const YearReport& r);
Json to_json(const YearChange& c);
Json to_json(const AnalysisResult& a);
Json to_json(const SweepResult& s);
Json to_json(const BootstrapResult& b);
Json to_json(const PermutationResult& p);
Json to_json(const PanelPermutationResult& p);
Json to_json(const PlaceboResult& p);
Json to_json(const FitComparison& f);
Json to_json(const ChowResult& c);
Json to_json(const DidResult& d);
Json to_json(const CascadeTrace& c);
Json to_json(const LeaveOneOut& l);

/// Inverse of to_json(ExposureMatrix) for the matrix, ids, targets and method.
ExposureMatrix exposure_from_json(const Json& j);

/// Square CSV: header "bank_id,<id_1>,...,<id_n>", one row per lender.
void write_exposure_csv(std::ostream& out, const ExposureMatrix& X);
ExposureMatrix read_exposure_csv(std::istream& in);

void write_years_csv(std::ostream& out, const AnalysisResult& a);
void write_changes_csv(std::ostream& out, const AnalysisResult& a);
void write_sweep_csv(std::ostream& out, const SweepResult& s);
/// Long format "node,t,u", one row per (time, node).
void write_trajectory_csv(std::ostream& out, const std::vector<std::string>& bank_ids,
                          const std::vector<DistressState>& states);
void write_values_csv(std::ostream& out, const std::string& header, const std::vector<double>& values);

/// Numeric column `column` of a CSV with a header row; an empty name takes the
/// first column. Blank lines are skipped.
std::vector<double> read_numeric_column(std::istream& in, const std::string& column = {}, char delimiter = ',');

/// Left-aligned first column, right-aligned others, separated by two spaces.
std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

std::string table(const AnalysisResult& a);
std::string table(const SweepResult& s);
std::string table(const BootstrapResult& b);
std::string table(const PanelPermutationResult& p);
std::string table(const PlaceboResult& p);
std::string table(const FitComparison& f);
std::string table(const ChowResult& c);
std::string table(const DidResult& d);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace clab
