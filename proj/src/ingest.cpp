#include "clab/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "clab/error.hpp"
#include "clab/quantile.hpp"

namespace clab {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::optional<int> parse_int(const std::string& text) {
  if (text.empty()) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string key_of(const std::string& bank, int year) { return bank + '\x1f' + std::to_string(year); }

}  // namespace

BankPanel::BankPanel(std::vector<BankRecord> records) : records_(std::move(records)) {
  std::unordered_set<std::string> seen;
  std::set<int> years;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (!std::isfinite(r.total_assets) || r.total_assets < 0.0) {
      fail(Errc::MalformedRow, "record " + std::to_string(i + 1) + " (" + r.bank_id + ", " +
                                   std::to_string(r.year) + "): total_assets must be finite and >= 0");
    }
    if (!seen.insert(key_of(r.bank_id, r.year)).second) {
      fail(Errc::DuplicateKey, "repeated (bank_id, year) = (" + r.bank_id + ", " + std::to_string(r.year) + ")");
    }
    years.insert(r.year);
  }
  years_.assign(years.begin(), years.end());
}

bool BankPanel::has_year(int year) const { return std::binary_search(years_.begin(), years_.end(), year); }

std::vector<std::string> BankPanel::bank_ids() const {
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  for (const auto& r : records_) {
    if (seen.insert(r.bank_id).second) ids.push_back(r.bank_id);
  }
  return ids;
}

YearSlice BankPanel::year_slice(int year) const {
  require(has_year(year), Errc::YearAbsent, "year " + std::to_string(year) + " not in panel");
  YearSlice slice;
  slice.year = year;
  for (const auto& r : records_) {
    if (r.year != year) continue;
    slice.bank_ids.push_back(r.bank_id);
    slice.assets.push_back(r.total_assets);
  }
  return slice;
}

BankPanel BankPanel::select_years(const std::vector<int>& years) const {
  for (int y : years) require(has_year(y), Errc::YearAbsent, "year " + std::to_string(y) + " not in panel");
  std::vector<BankRecord> kept;
  for (const auto& r : records_) {
    if (std::find(years.begin(), years.end(), r.year) != years.end()) kept.push_back(r);
  }
  return BankPanel(std::move(kept));
}

bool operator==(const BankPanel& a, const BankPanel& b) {
  if (a.years_ != b.years_ || a.records_.size() != b.records_.size()) return false;
  for (std::size_t i = 0; i < a.records_.size(); ++i) {
    const auto& x = a.records_[i];
    const auto& y = b.records_[i];
    if (x.bank_id != y.bank_id || x.year != y.year || x.total_assets != y.total_assets ||
        x.country != y.country || x.name != y.name)
      return false;
  }
  return true;
}

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_delimited(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(trim(current));
  return fields;
}

BankPanel load_panel(std::istream& source, const CsvSchema& schema) {
  std::string line;
  if (!std::getline(source, line)) fail(Errc::MissingColumn, "input has no header row");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const auto header = split_delimited(line, schema.delimiter);

  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto id_col = column(schema.bank_id);
  const auto year_col = column(schema.year);
  const auto assets_col = column(schema.total_assets);
  for (const auto& [col, name] : {std::pair{id_col, schema.bank_id}, std::pair{year_col, schema.year},
                                  std::pair{assets_col, schema.total_assets}}) {
    if (!col) fail(Errc::MissingColumn, "header lacks column '" + name + "'");
  }
  const auto country_col = column(schema.country);
  const auto name_col = column(schema.name);

  std::vector<BankRecord> records;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_delimited(line, schema.delimiter);
    const auto where = "line " + std::to_string(line_no);
    if (fields.size() < header.size()) {
      fail(Errc::MalformedRow, where + ": expected " + std::to_string(header.size()) + " fields, got " +
                                   std::to_string(fields.size()));
    }
    BankRecord rec;
    rec.bank_id = fields[*id_col];
    if (rec.bank_id.empty()) fail(Errc::MalformedRow, where + ": empty bank_id");
    const auto year = parse_int(fields[*year_col]);
    if (!year) fail(Errc::MalformedRow, where + ": unparseable year '" + fields[*year_col] + "'");
    rec.year = *year;
    const auto assets = parse_double(fields[*assets_col]);
    if (!assets) fail(Errc::MalformedRow, where + ": missing or unparseable total_assets '" + fields[*assets_col] + "'");
    if (!std::isfinite(*assets) || *assets < 0.0) {
      fail(Errc::MalformedRow, where + ": total_assets must be finite and >= 0, got '" + fields[*assets_col] + "'");
    }
    rec.total_assets = *assets;
    if (country_col && !fields[*country_col].empty()) rec.country = fields[*country_col];
    if (name_col && !fields[*name_col].empty()) rec.name = fields[*name_col];
    if (!seen.insert(key_of(rec.bank_id, rec.year)).second) {
      fail(Errc::DuplicateKey, where + ": repeated (bank_id, year) = (" + rec.bank_id + ", " +
                                   std::to_string(rec.year) + ")");
    }
    records.push_back(std::move(rec));
  }
  return BankPanel(std::move(records));
}

BankPanel load_panel_file(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) fail(Errc::Io, "cannot open '" + path.string() + "'");
  return load_panel(in, schema);
}

void write_panel_csv(std::ostream& out, const BankPanel& panel) {
  const bool any_country = std::any_of(panel.records().begin(), panel.records().end(),
                                       [](const BankRecord& r) { return r.country.has_value(); });
  const bool any_name = std::any_of(panel.records().begin(), panel.records().end(),
                                    [](const BankRecord& r) { return r.name.has_value(); });
  out << "bank_id,year,total_assets";
  if (any_country) out << ",country";
  if (any_name) out << ",name";
  out << '\n';
  const auto old_precision = out.precision(17);
  for (const auto& r : panel.records()) {
    out << csv_field(r.bank_id) << ',' << r.year << ',' << r.total_assets;
    if (any_country) out << ',' << csv_field(r.country.value_or(""));
    if (any_name) out << ',' << csv_field(r.name.value_or(""));
    out << '\n';
  }
  out.precision(old_precision);
}

BankPanel balanced_panel(const BankPanel& panel) {
  require(!panel.empty(), Errc::EmptyResult, "panel is empty");
  std::unordered_map<std::string, std::size_t> year_count;
  for (const auto& r : panel.records()) ++year_count[r.bank_id];
  const auto needed = panel.years().size();
  std::vector<BankRecord> kept;
  for (const auto& r : panel.records()) {
    if (year_count[r.bank_id] == needed) kept.push_back(r);
  }
  require(!kept.empty(), Errc::EmptyResult, "no bank is observed in all " + std::to_string(needed) + " years");
  BankPanel out(std::move(kept));
  return out;
}

std::size_t TreatmentAssignment::treated_count() const {
  return static_cast<std::size_t>(std::count_if(treated.begin(), treated.end(), [](const auto& kv) { return kv.second; }));
}

TreatmentAssignment assign_treatment(const BankPanel& panel, int base_year, double quantile) {
  require(quantile > 0.0 && quantile < 1.0, Errc::InvalidArgument, "quantile must lie in (0,1)");
  const auto slice = panel.year_slice(base_year);
  TreatmentAssignment out;
  out.quantile = quantile;
  out.base_year = base_year;
  out.threshold = quantile_type7(slice.assets, quantile);
  for (std::size_t i = 0; i < slice.assets.size(); ++i) {
    out.treated[slice.bank_ids[i]] = slice.assets[i] > out.threshold;
  }
  return out;
}

}  // namespace clab
