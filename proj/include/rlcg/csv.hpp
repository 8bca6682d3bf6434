#pragma once

#include <charconv>
#include <cstddef>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace rlcg {

inline constexpr std::string_view kCsvVersionLine = "# rlcg-csv v1";

// Shortest decimal that parses back to the same double.
std::string format_double(double value);

std::string csv_escape(std::string_view field);

// Writes the version comment and header on construction.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  template <typename... Fields>
  void row(const Fields&... fields) {
    std::string line;
    bool first = true;
    ((append(line, first, fields)), ...);
    out_ << line << '\n';
  }

  void raw_row(const std::vector<std::string>& fields);

 private:
  template <typename T>
  static void append(std::string& line, bool& first, const T& value) {
    if (!first) line += ',';
    first = false;
    if constexpr (std::is_floating_point_v<T>) {
      line += format_double(static_cast<double>(value));
    } else if constexpr (std::is_integral_v<T>) {
      line += std::to_string(value);
    } else {
      line += csv_escape(std::string_view(value));
    }
  }

  std::ostream& out_;
};

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // throws CsvError if absent
  double number(std::size_t row, std::string_view name) const;
  const std::string& text(std::size_t row, std::string_view name) const;
};

// Skips '#' comment lines; the first remaining line is the header.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv_file(const std::string& path);

}  // namespace rlcg
