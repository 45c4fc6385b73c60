#pragma once

// Character-grid layout files: one line per row, one character per cell.
//   '0' (also 'o', 'O')      empty cell
//   '*'                      random module
//   '1'-'9', 'A'-'Z'         fixed module by index (except 'I' and 'O')
// Anything else is repaired to '*'. The first line fixes the column count:
// longer lines are truncated, shorter ones padded with empty cells, and a
// blank line is an empty row.

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "modgrid/error.hpp"
#include "modgrid/palette.hpp"

namespace modgrid {

enum class CellKind : std::uint8_t { Empty, Random, Fixed };

struct CellSpec {
  CellKind kind = CellKind::Empty;
  char index = 0;  // meaningful only for Fixed

  static constexpr CellSpec empty() { return {}; }
  static constexpr CellSpec random() { return {CellKind::Random, 0}; }
  static constexpr CellSpec fixed(char c) { return {CellKind::Fixed, c}; }

  friend bool operator==(const CellSpec&, const CellSpec&) = default;
};

struct ConfigLayout {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<CellSpec> cells;  // row-major

  const CellSpec& at(std::size_t r, std::size_t c) const { return cells[r * cols + c]; }
  CellSpec& at(std::size_t r, std::size_t c) { return cells[r * cols + c]; }

  static ConfigLayout filled(std::size_t rows, std::size_t cols, CellSpec spec = CellSpec::empty()) {
    return {rows, cols, std::vector<CellSpec>(rows * cols, spec)};
  }

  friend bool operator==(const ConfigLayout&, const ConfigLayout&) = default;
};

enum class ParseMode {
  Lenient,  // unknown characters become Random
  Strict,   // unknown characters are an error
};

namespace config_detail {

// Decodes UTF-8 into scalar values; each byte of an ill-formed sequence
// decodes to U+FFFD so it still counts as exactly one cell.
inline std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3 : (b0 >> 3) == 0x1E ? 4 : 0;
    char32_t cp = len == 1 ? b0 : len == 2 ? (b0 & 0x1F) : len == 3 ? (b0 & 0x0F) : (b0 & 0x07);
    bool ok = len != 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(U'\uFFFD');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t begin = 0;
  while (begin < text.size()) {
    auto end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(begin, end - begin);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    begin = end + 1;
  }
  return lines;
}

}  // namespace config_detail

/// Classifies one character. Returns false for characters that are not part
/// of the layout vocabulary (they are mapped to Random).
inline bool classify_cell(char32_t c, CellSpec& out) {
  if (c == U'0' || c == U'o' || c == U'O') {
    out = CellSpec::empty();
    return true;
  }
  if (c == U'*') {
    out = CellSpec::random();
    return true;
  }
  if (is_index_char(c)) {
    out = CellSpec::fixed(static_cast<char>(c));
    return true;
  }
  out = CellSpec::random();
  return false;
}

inline ConfigLayout parse_config(std::string_view text, ParseMode mode = ParseMode::Lenient) {
  const auto lines = config_detail::split_lines(text);
  if (lines.empty() || lines.front().empty())
    throw Error(ErrorCode::EmptyConfig, "layout has no rows or an empty first line");

  std::vector<std::u32string> decoded;
  decoded.reserve(lines.size());
  for (auto line : lines) decoded.push_back(config_detail::decode_utf8(line));

  ConfigLayout layout = ConfigLayout::filled(decoded.size(), decoded.front().size());
  for (std::size_t r = 0; r < layout.rows; ++r) {
    const auto& line = decoded[r];
    for (std::size_t c = 0; c < layout.cols && c < line.size(); ++c) {
      if (!classify_cell(line[c], layout.at(r, c)) && mode == ParseMode::Strict)
        throw Error(ErrorCode::UnknownCharacter,
                    "line " + std::to_string(r + 1) + ", column " + std::to_string(c + 1) +
                        ": character U+" + [&] {
                          char buf[16];
                          std::snprintf(buf, sizeof buf, "%04X", static_cast<unsigned>(line[c]));
                          return std::string(buf);
                        }() + " does not name a module");
    }
  }
  return layout;
}

inline std::string serialize_config(const ConfigLayout& layout) {
  std::string out;
  out.reserve(layout.rows * (layout.cols + 1));
  for (std::size_t r = 0; r < layout.rows; ++r) {
    for (std::size_t c = 0; c < layout.cols; ++c) {
      const auto& cell = layout.at(r, c);
      out += cell.kind == CellKind::Empty ? '0' : cell.kind == CellKind::Random ? '*' : cell.index;
    }
    out += '\n';
  }
  return out;
}

/// Blank layout: `rows` lines of `cols` zeros.
inline std::string export_template(std::size_t rows, std::size_t cols) {
  if (rows < 1 || cols < 1) throw Error(ErrorCode::OutOfRange, "template needs rows >= 1 and cols >= 1");
  return serialize_config(ConfigLayout::filled(rows, cols));
}

}  // namespace modgrid
