#pragma once

// SVG and raster output. SVG numbers are printed with exactly four decimals
// and attributes are written in lexicographic order, so identical inputs give
// identical bytes. Rasterization uses the same centre-sample rule as module
// profiling.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "modgrid/composition.hpp"
#include "modgrid/error.hpp"
#include "modgrid/geometry.hpp"
#include "modgrid/image.hpp"
#include "modgrid/palette.hpp"

namespace modgrid {

inline constexpr double kMaxRenderPixels = 1e8;

struct RenderOptions {
  double px_per_unit = 1.0;
  Rgb foreground{0, 0, 0};
  Rgb background{255, 255, 255};
  bool invert = false;
  bool flatten = false;  // SVG only: absolute paths instead of <use> instances

  Rgb ink_color() const { return invert ? background : foreground; }
  Rgb paper_color() const { return invert ? foreground : background; }
};

namespace export_detail {

inline std::string num(double v) {
  if (v == 0.0) v = 0.0;  // no "-0.0000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  if (std::string_view(buf) == "-0.0000") return "0.0000";
  return buf;
}

inline std::string hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

/// Path data for a shape under x' = ox + u * scale, y' = oy + v * scale.
inline std::string path_data(const Shape& shape, double ox, double oy, double scale) {
  std::string d;
  for (const auto& contour : shape.contours) {
    for (std::size_t i = 0; i < contour.size(); ++i) {
      d += i == 0 ? (d.empty() ? "M" : " M") : " L";
      d += num(ox + contour[i].x * scale);
      d += ' ';
      d += num(oy + contour[i].y * scale);
    }
    d += " Z";
  }
  return d;
}

inline std::string path_element(const Shape& shape, const RenderOptions& opts, double ox, double oy, double scale) {
  return "<path d=\"" + path_data(shape, ox, oy, scale) + "\" fill=\"" +
         hex(shape.ink == Ink::Ink ? opts.ink_color() : opts.paper_color()) + "\" fill-rule=\"" +
         (shape.fill_rule == FillRule::EvenOdd ? "evenodd" : "nonzero") + "\"/>";
}

inline std::string module_id(const Module& m) { return std::string("m-") + m.index_char; }

}  // namespace export_detail

inline std::string render_svg(const Composition& c, const ModulePalette& palette, const RenderOptions& opts = {}) {
  using namespace export_detail;
  check_references(c, palette);
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg height=\"" + num(c.canvas_h) + "\" version=\"1.1\" viewBox=\"0.0000 0.0000 " + num(c.canvas_w) + " " +
         num(c.canvas_h) + "\" width=\"" + num(c.canvas_w) +
         "\" xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\">\n";

  if (!opts.flatten) {
    std::vector<bool> used(palette.size(), false);
    for (const auto& p : c.placements)
      if (p) used[*p] = true;
    out += "<defs>\n";
    for (std::size_t m = 0; m < palette.size(); ++m) {
      if (!used[m]) continue;
      out += "<g id=\"" + module_id(palette[m]) + "\">";
      for (const auto& shape : palette[m].geometry.shapes) out += path_element(shape, opts, 0.0, 0.0, 1.0);
      out += "</g>\n";
    }
    out += "</defs>\n";
  }
  out += "<rect fill=\"" + hex(opts.paper_color()) + "\" height=\"" + num(c.canvas_h) + "\" width=\"" +
         num(c.canvas_w) + "\" x=\"0.0000\" y=\"0.0000\"/>\n";

  for (std::size_t r = 0; r < c.rows; ++r) {
    for (std::size_t col = 0; col < c.cols; ++col) {
      const auto& p = c.at(r, col);
      if (!p) continue;
      const double x = c.origin_x + static_cast<double>(col) * c.cell_px;
      const double y = c.origin_y + static_cast<double>(r) * c.cell_px;
      const Module& m = palette[*p];
      if (opts.flatten) {
        for (const auto& shape : m.geometry.shapes) out += path_element(shape, opts, x, y, c.cell_px) + "\n";
      } else {
        out += "<use transform=\"translate(" + num(x) + " " + num(y) + ") scale(" + num(c.cell_px) +
               ")\" xlink:href=\"#" + module_id(m) + "\"/>\n";
      }
    }
  }
  out += "</svg>\n";
  return out;
}

/// Standalone drawing of one module in a unit viewBox.
inline std::string module_svg(const Module& m, const RenderOptions& opts = {}) {
  using namespace export_detail;
  std::string out =
      "<svg height=\"1.0000\" version=\"1.1\" viewBox=\"0.0000 0.0000 1.0000 1.0000\" width=\"1.0000\" "
      "xmlns=\"http://www.w3.org/2000/svg\">";
  out += "<rect fill=\"" + hex(opts.paper_color()) + "\" height=\"1.0000\" width=\"1.0000\" x=\"0.0000\" y=\"0.0000\"/>";
  for (const auto& shape : m.geometry.shapes) out += path_element(shape, opts, 0.0, 0.0, 1.0);
  out += "</svg>\n";
  return out;
}

inline RgbImage render_png(const Composition& c, const ModulePalette& palette, const RenderOptions& opts = {}) {
  check_references(c, palette);
  if (!(opts.px_per_unit > 0)) throw Error(ErrorCode::InvalidArgument, "px_per_unit must be > 0");
  const double w = std::max(1.0, std::round(c.canvas_w * opts.px_per_unit));
  const double h = std::max(1.0, std::round(c.canvas_h * opts.px_per_unit));
  if (w * h > kMaxRenderPixels)
    throw Error(ErrorCode::TooLarge, "render of " + std::to_string(static_cast<long long>(w)) + "x" +
                                         std::to_string(static_cast<long long>(h)) + " pixels exceeds the limit");
  RgbImage img(static_cast<std::size_t>(w), static_cast<std::size_t>(h), opts.paper_color());
  const Rgb ink = opts.ink_color();
  const Rgb paper = opts.paper_color();
  const auto width = static_cast<std::int64_t>(img.width);
  const auto height = static_cast<std::int64_t>(img.height);
  std::vector<Ink> row(img.width);

  for (std::size_t r = 0; r < c.rows; ++r) {
    for (std::size_t col = 0; col < c.cols; ++col) {
      const auto& p = c.at(r, col);
      if (!p) continue;
      const CellMapping xmap{(c.origin_x + static_cast<double>(col) * c.cell_px) * opts.px_per_unit,
                             c.cell_px * opts.px_per_unit};
      const CellMapping ymap{(c.origin_y + static_cast<double>(r) * c.cell_px) * opts.px_per_unit,
                             c.cell_px * opts.px_per_unit};
      const std::int64_t x_lo = std::clamp<std::int64_t>(xmap.first_at_or_after(0.0), 0, width);
      const std::int64_t x_hi = std::clamp<std::int64_t>(xmap.first_at_or_after(1.0), 0, width);
      const std::int64_t y_lo = std::clamp<std::int64_t>(ymap.first_at_or_after(0.0), 0, height);
      const std::int64_t y_hi = std::clamp<std::int64_t>(ymap.first_at_or_after(1.0), 0, height);
      if (x_lo >= x_hi) continue;
      const std::span<Ink> cells(row.data(), static_cast<std::size_t>(x_hi - x_lo));
      for (std::int64_t y = y_lo; y < y_hi; ++y) {
        std::fill(cells.begin(), cells.end(), Ink::Paper);
        paint_module_row(palette[*p].geometry, ymap.to_local(y), xmap, x_lo, cells);
        for (std::int64_t x = x_lo; x < x_hi; ++x)
          img.set(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                  cells[static_cast<std::size_t>(x - x_lo)] == Ink::Ink ? ink : paper);
      }
    }
  }
  return img;
}

}  // namespace modgrid
