#include <doctest.h>

#include <sstream>

#include "casimir/csv.hpp"
#include "casimir/errors.hpp"

using namespace casimir;

namespace {

const std::vector<std::string> kHeader{"a", "b"};

CsvTable parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in, kHeader, "mem.csv");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("rows parse with byte-order mark, blank lines and CRLF") {
  const auto t = parse("\xEF\xBB\xBF" "a,b\r\n1,2.5\r\n\r\n-3e-2, 4\n");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][0] == -0.03);
  CHECK(t.rows[1][1] == 4.0);
  CHECK(t.line_numbers == std::vector<std::size_t>{2, 4});
}

TEST_CASE("header problems are named") {
  CHECK(error_of("a,c\n1,2\n").find("missing column 'b'") != std::string::npos);
  CHECK(error_of("b,a\n1,2\n").find("header must be exactly") != std::string::npos);
  CHECK(error_of("").find("empty file") != std::string::npos);
}

TEST_CASE("bad rows report their line number") {
  CHECK(error_of("a,b\n1,2\n3\n").find("row 3") != std::string::npos);
  const auto msg = error_of("a,b\n1,2\n3,x\n");
  CHECK(msg.find("row 3") != std::string::npos);
  CHECK(msg.find("column 'b'") != std::string::npos);
  CHECK(error_of("a,b\n1,nan\n").find("row 2") != std::string::npos);
}

TEST_CASE("numbers are written in shortest round-trip form") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-12) == "1e-12");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_number(x)) == x);
  std::ostringstream out;
  write_csv_row(out, {1.0, -2.5});
  CHECK(out.str() == "1,-2.5\n");
}
