#include "casimir/csv.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "casimir/errors.hpp"

namespace casimir {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

}  // namespace

CsvTable parse_csv(std::istream& in, const std::vector<std::string>& expected_header,
                   const std::string& source_name) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (!have_header) {
      for (const auto& col : expected_header) {
        if (std::find(cells.begin(), cells.end(), col) == cells.end()) {
          throw ValidationError(source_name + ": missing column '" + col + "' (expected header '" +
                                join(expected_header) + "')");
        }
      }
      if (cells != expected_header) {
        throw ValidationError(source_name + ": header must be exactly '" + join(expected_header) + "'");
      }
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != expected_header.size()) {
      throw ValidationError(source_name + " row " + std::to_string(line_no) + ": expected " +
                            std::to_string(expected_header.size()) + " cells, got " +
                            std::to_string(cells.size()));
    }
    std::vector<double> values;
    values.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& cell = cells[c];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty() || !std::isfinite(v)) {
        throw ValidationError(source_name + " row " + std::to_string(line_no) + ": non-numeric cell '" +
                              cell + "' in column '" + expected_header[c] + "'");
      }
      values.push_back(v);
    }
    table.rows.push_back(std::move(values));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) throw ValidationError(source_name + ": empty file");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return parse_csv(in, expected_header, path.string());
}

std::string format_number(double value) { return fmt::format("{}", value); }

void write_csv_row(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format_number(values[i]);
  }
  out << '\n';
}

}  // namespace casimir
