#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "modgrid/composition.hpp"
#include "modgrid/config.hpp"
#include "modgrid/error.hpp"
#include "modgrid/palette.hpp"
#include "modgrid/random.hpp"

namespace modgrid {

enum class Orientation { Horizontal, Vertical };

inline const char* to_string(Orientation o) { return o == Orientation::Horizontal ? "horizontal" : "vertical"; }

/// Landscape canvases get the horizontal logotype; portrait and square
/// canvases get the vertical one.
inline Orientation choose_orientation(double canvas_w, double canvas_h) {
  if (!(canvas_w > 0) || !(canvas_h > 0))
    throw Error(ErrorCode::InvalidArgument, "canvas dimensions must be positive");
  return canvas_w > canvas_h ? Orientation::Horizontal : Orientation::Vertical;
}

inline std::filesystem::path oriented_layout_path(const std::filesystem::path& config_dir, Orientation o) {
  return config_dir / (std::string(to_string(o)) + ".mcfg");
}

inline ConfigLayout load_layout(const std::filesystem::path& path, ParseMode mode = ParseMode::Lenient) {
  return parse_config(palette_detail::read_file(path), mode);
}

/// Grid geometry shared by every assisted composition: square cells at the
/// largest size that fits, grid centred on the canvas.
inline Composition fit_grid(std::size_t rows, std::size_t cols, double canvas_w, double canvas_h) {
  if (!(canvas_w > 0) || !(canvas_h > 0))
    throw Error(ErrorCode::InvalidArgument, "canvas dimensions must be positive");
  if (rows == 0 || cols == 0) throw Error(ErrorCode::InvalidArgument, "grid must have at least one cell");
  Composition c;
  c.rows = rows;
  c.cols = cols;
  c.canvas_w = canvas_w;
  c.canvas_h = canvas_h;
  c.cell_px = std::min(canvas_w / static_cast<double>(cols), canvas_h / static_cast<double>(rows));
  c.origin_x = (canvas_w - static_cast<double>(cols) * c.cell_px) / 2.0;
  c.origin_y = (canvas_h - static_cast<double>(rows) * c.cell_px) / 2.0;
  c.placements.assign(rows * cols, std::nullopt);
  return c;
}

/// Uniform module pick for a Random cell, from the cell's counter-based draw.
inline std::size_t uniform_module(std::uint64_t seed, std::size_t row, std::size_t col, std::size_t module_count) {
  const double u = cell_uniform(seed, 0, row, col);
  return std::min(static_cast<std::size_t>(u * static_cast<double>(module_count)), module_count - 1);
}

inline Composition generate_assisted(const ConfigLayout& layout, const ModulePalette& palette, double canvas_w,
                                     double canvas_h, std::uint64_t seed, const CellOrder& order = {}) {
  if (palette.empty()) throw Error(ErrorCode::EmptyPalette, "palette has no modules");
  if (layout.cells.size() != layout.rows * layout.cols || layout.rows == 0)
    throw Error(ErrorCode::InvalidArgument, "layout is not rectangular");
  Composition comp = fit_grid(layout.rows, layout.cols, canvas_w, canvas_h);
  for (std::size_t i : order.resolve(layout.cells.size())) {
    const std::size_t r = i / layout.cols, c = i % layout.cols;
    const CellSpec& spec = layout.cells[i];
    switch (spec.kind) {
      case CellKind::Empty:
        break;
      case CellKind::Fixed:
        if (const auto m = palette.find(spec.index)) {
          comp.placements[i] = *m;
          break;
        }
        [[fallthrough]];  // no such module: treated as '*'
      case CellKind::Random:
        comp.placements[i] = uniform_module(seed, r, c, palette.size());
        break;
    }
  }
  return comp;
}

}  // namespace modgrid
