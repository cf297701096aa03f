#include "rpe/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace rpe {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// Returns nullopt for a missing value; throws on garbage.
std::optional<double> parse_value(const std::string& field, std::size_t row) {
  if (field.empty()) return std::nullopt;
  std::string lower = field;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "nan" || lower == "na" || lower == "null") return std::nullopt;
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(Errc::parse_error,
                "row " + std::to_string(row) + ": bad value '" + field + "'");
  }
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

bool parse_label(const std::string& field, std::size_t row) {
  std::string lower = field;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "1" || lower == "true") return true;
  if (lower == "0" || lower == "false" || lower.empty()) return false;
  throw Error(Errc::parse_error,
              "row " + std::to_string(row) + ": bad label '" + field + "'");
}

bool looks_numeric(const std::string& field) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end;
}

}  // namespace

TimeSeries read_series_csv(std::istream& in, const CsvReadOptions& options) {
  std::vector<std::string> timestamps;
  std::vector<std::optional<double>> raw;
  std::vector<bool> labels;
  std::optional<bool> has_labels;

  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (first) {
      first = false;
      if (fields.size() >= 2 && !fields[1].empty() && !looks_numeric(fields[1])) {
        std::string lower = fields[1];
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (lower != "nan" && lower != "na" && lower != "null") continue;
      }
    }
    if (fields.size() < 2 || fields.size() > 3) {
      throw Error(Errc::parse_error, "line " + std::to_string(line_no) +
                                         ": expected timestamp,value[,label]");
    }
    const bool row_has_label = fields.size() == 3;
    if (has_labels && *has_labels != row_has_label) {
      throw Error(Errc::parse_error, "line " + std::to_string(line_no) +
                                         ": label column present on some rows only");
    }
    has_labels = row_has_label;
    timestamps.push_back(fields[0]);
    raw.push_back(parse_value(fields[1], raw.size()));
    if (row_has_label) labels.push_back(parse_label(fields[2], raw.size() - 1));
  }
  if (raw.empty()) throw Error(Errc::parse_error, "no samples found");

  std::vector<double> present;
  for (const auto& v : raw)
    if (v) present.push_back(*v);

  std::vector<double> values(raw.size());
  double fill = std::numeric_limits<double>::quiet_NaN();
  if (options.impute_median && present.size() != raw.size()) {
    if (present.empty()) {
      throw Error(Errc::invalid_input, "every value is missing; nothing to impute");
    }
    const std::size_t mid = present.size() / 2;
    std::nth_element(present.begin(), present.begin() + mid, present.end());
    fill = present[mid];
    if (present.size() % 2 == 0) {
      const double lower = *std::max_element(present.begin(), present.begin() + mid);
      fill = 0.5 * (fill + lower);
    }
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i]) {
      values[i] = *raw[i];
    } else if (options.impute_median) {
      values[i] = fill;
    } else {
      throw Error(Errc::invalid_input,
                  "missing or non-finite value at index " + std::to_string(i));
    }
  }
  std::optional<std::vector<bool>> maybe_labels;
  if (has_labels.value_or(false)) maybe_labels = std::move(labels);
  return TimeSeries(std::move(values), std::move(maybe_labels),
                    std::move(timestamps));
}

TimeSeries read_series_csv_file(const std::string& path,
                                const CsvReadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::invalid_input, "cannot open '" + path + "'");
  return read_series_csv(in, options);
}

void write_series_csv(std::ostream& out, const TimeSeries& series) {
  const bool labelled = series.labels().has_value();
  out << (labelled ? "timestamp,value,label\n" : "timestamp,value\n");
  out << std::setprecision(17);
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.timestamps().empty()) {
      out << i;
    } else {
      out << series.timestamps()[i];
    }
    out << ',' << series[i];
    if (labelled) out << ',' << ((*series.labels())[i] ? 1 : 0);
    out << '\n';
  }
}

}  // namespace rpe
