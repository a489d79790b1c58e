#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace clab {

/// One bank-year observation. Assets are in millions of a single currency.
struct BankRecord {
  std::string bank_id;
  int year = 0;
  double total_assets = 0.0;
  std::optional<std::string> country;
  std::optional<std::string> name;
};

/// Assets of every bank observed in one year, in panel row order.
struct YearSlice {
  int year = 0;
  std::vector<std::string> bank_ids;
  std::vector<double> assets;
};

/// Long-format bank-year panel. Construction validates that assets are finite
/// and non-negative and that (bank_id, year) pairs are unique.
class BankPanel {
 public:
  BankPanel() = default;
  explicit BankPanel(std::vector<BankRecord> records);

  const std::vector<BankRecord>& records() const noexcept { return records_; }
  const std::vector<int>& years() const noexcept { return years_; }
  bool empty() const noexcept { return records_.empty(); }
  std::size_t size() const noexcept { return records_.size(); }
  bool has_year(int year) const;

  /// Distinct bank ids in order of first appearance.
  std::vector<std::string> bank_ids() const;

  YearSlice year_slice(int year) const;

  /// Restrict to the given years (kept in ascending order).
  BankPanel select_years(const std::vector<int>& years) const;

  friend bool operator==(const BankPanel& a, const BankPanel& b);

 private:
  std::vector<BankRecord> records_;
  std::vector<int> years_;
};

/// Maps logical fields to CSV header names.
struct CsvSchema {
  std::string bank_id = "bank_id";
  std::string year = "year";
  std::string total_assets = "total_assets";
  std::string country = "country";
  std::string name = "name";
  char delimiter = ',';
};

BankPanel load_panel(std::istream& source, const CsvSchema& schema = {});
BankPanel load_panel_file(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Writes `bank_id,year,total_assets[,country][,name]` with 17 significant digits.
void write_panel_csv(std::ostream& out, const BankPanel& panel);

/// Sub-panel of banks observed in every year of `panel.years()`.
BankPanel balanced_panel(const BankPanel& panel);

struct TreatmentAssignment {
  std::map<std::string, bool> treated;
  double quantile = 0.75;
  int base_year = 0;
  double threshold = 0.0;

  std::size_t treated_count() const;
};

/// Treated = base-year assets strictly above the type-7 empirical quantile.
TreatmentAssignment assign_treatment(const BankPanel& panel, int base_year, double quantile);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& field);

/// Splits a delimited line honouring double quotes ("" escapes a quote).
std::vector<std::string> split_delimited(const std::string& line, char delimiter);

}  // namespace clab
