#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace casimir {

// Numeric CSV with a fixed header. line_numbers[i] is the 1-based file line of
// rows[i] (the header is line 1).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_numbers;
};

CsvTable parse_csv(std::istream& in, const std::vector<std::string>& expected_header,
                   const std::string& source_name);

CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& expected_header);

// Shortest round-trippable decimal form; used by every CSV writer so that
// outputs are byte-identical between runs.
std::string format_number(double value);

void write_csv_row(std::ostream& out, const std::vector<double>& values);

}  // namespace casimir
