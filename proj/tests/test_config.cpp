#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace modgrid;

namespace {

std::vector<std::string> as_grid(const ConfigLayout& layout) {
  std::vector<std::string> grid;
  for (std::size_t r = 0; r < layout.rows; ++r) {
    std::string row;
    for (std::size_t c = 0; c < layout.cols; ++c) {
      const auto& cell = layout.at(r, c);
      row += cell.kind == CellKind::Empty ? '0' : cell.kind == CellKind::Random ? '*' : cell.index;
    }
    grid.push_back(row);
  }
  return grid;
}

ErrorCode code_of(const std::string& text, ParseMode mode = ParseMode::Lenient) {
  try {
    parse_config(text, mode);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("parse_config examples", "[config]") {
  SECTION("pads short rows with empty cells") {
    const auto layout = parse_config("0*1\n2");
    REQUIRE(layout.rows == 2);
    REQUIRE(layout.cols == 3);
    REQUIRE(layout.at(0, 0) == CellSpec::empty());
    REQUIRE(layout.at(0, 1) == CellSpec::random());
    REQUIRE(layout.at(0, 2) == CellSpec::fixed('1'));
    REQUIRE(layout.at(1, 0) == CellSpec::fixed('2'));
    REQUIRE(layout.at(1, 1) == CellSpec::empty());
    REQUIRE(layout.at(1, 2) == CellSpec::empty());
  }
  SECTION("blank interior line is an empty row") {
    REQUIRE(as_grid(parse_config("12345\n\n*")) == std::vector<std::string>{"12345", "00000", "*0000"});
  }
  SECTION("long rows are truncated to the first row's width") {
    REQUIRE(as_grid(parse_config("00\n0000")) == std::vector<std::string>{"00", "00"});
  }
  SECTION("unknown characters become random") {
    REQUIRE(as_grid(parse_config("a#I\n")) == std::vector<std::string>{"***"});
  }
  SECTION("letter o is empty in both cases") {
    REQUIRE(as_grid(parse_config("oO0Z")) == std::vector<std::string>{"000Z"});
  }
  SECTION("CRLF line endings and a trailing newline") {
    REQUIRE(as_grid(parse_config("12\r\n3*\r\n")) == std::vector<std::string>{"12", "3*"});
    REQUIRE(parse_config("1\n").rows == 1);
    REQUIRE(parse_config("1\n\n").rows == 2);
  }
  SECTION("multi-byte characters count as one cell") {
    const auto layout = parse_config("\xC3\xA9" "1\n11");
    REQUIRE(layout.cols == 2);
    REQUIRE(as_grid(layout) == std::vector<std::string>{"*1", "11"});
  }
}

TEST_CASE("parse_config errors", "[config]") {
  REQUIRE(code_of("") == ErrorCode::EmptyConfig);
  REQUIRE(code_of("\n123") == ErrorCode::EmptyConfig);
  REQUIRE(code_of("\r\n1") == ErrorCode::EmptyConfig);
  REQUIRE(code_of("1x", ParseMode::Strict) == ErrorCode::UnknownCharacter);
  try {
    parse_config("11\n1?", ParseMode::Strict);
  } catch (const Error& e) {
    REQUIRE(std::string(e.what()).find("line 2, column 2") != std::string::npos);
  }
  REQUIRE_NOTHROW(parse_config("0*o\n1Z", ParseMode::Strict));
}

TEST_CASE("export_template", "[config]") {
  REQUIRE(export_template(1, 1) == "0\n");
  REQUIRE(export_template(2, 3) == "000\n000\n");
  const auto big = export_template(5, 40);
  REQUIRE(big.size() == 5 * 41);
  const auto layout = parse_config(big);
  REQUIRE(layout.rows == 5);
  REQUIRE(layout.cols == 40);
  REQUIRE(layout == ConfigLayout::filled(5, 40));
  REQUIRE_THROWS_AS(export_template(0, 3), Error);
  REQUIRE_THROWS_AS(export_template(3, 0), Error);
}

TEST_CASE("serialize_config round trip", "[config]") {
  REQUIRE(serialize_config(parse_config("0*1\n2")) == "0*1\n200\n");
  const auto layout = parse_config("0*1\n2");
  REQUIRE(parse_config(serialize_config(layout)) == layout);
}

TEST_CASE("parse_config matches the repair rules on random text", "[config][property]") {
  std::mt19937_64 rng(1234);
  const std::string alphabet = "0oO*123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabz#- .\r";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 12), nlines(1, 8);
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const int lines = nlines(rng);
    for (int l = 0; l < lines; ++l) {
      const int n = l == 0 ? 1 + len(rng) : len(rng);
      for (int i = 0; i < n; ++i) text += alphabet[pick(rng)];
      if (l + 1 < lines || rng() % 2) text += '\n';
    }
    // A lone '\r' as the whole first line makes it empty after stripping.
    const auto expect = testsupport::reference_repair(text);
    if (expect.empty() || expect[0].empty()) {
      REQUIRE(code_of(text) == ErrorCode::EmptyConfig);
      continue;
    }
    const auto layout = parse_config(text);
    REQUIRE(as_grid(layout) == expect);
    REQUIRE(parse_config(serialize_config(layout)) == layout);
  }
}
