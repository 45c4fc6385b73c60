#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace modgrid {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Closed polyline; the last point connects back to the first.
using Contour = std::vector<Point>;

enum class FillRule { NonZero, EvenOdd };

/// Module artwork is strictly two-tone: ink is drawn in the foreground colour,
/// paper shapes knock back to the background colour.
enum class Ink : std::uint8_t { Paper = 0, Ink = 1 };

struct Shape {
  std::vector<Contour> contours;
  FillRule fill_rule = FillRule::NonZero;
  Ink ink = Ink::Ink;
};

struct Span {
  double begin = 0.0;
  double end = 0.0;
};

/// Filled intervals of `shape` along the horizontal line y = v, in ascending
/// order. An edge crosses the line iff min(y0, y1) <= v < max(y0, y1).
inline std::vector<Span> scanline_spans(const Shape& shape, double v) {
  struct Crossing {
    double x;
    int dir;
  };
  std::vector<Crossing> crossings;
  for (const auto& contour : shape.contours) {
    const std::size_t n = contour.size();
    if (n < 3) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = contour[i];
      const Point& b = contour[(i + 1) % n];
      if (a.y == b.y) continue;
      const bool up = a.y < b.y;
      const double lo = up ? a.y : b.y;
      const double hi = up ? b.y : a.y;
      if (v < lo || v >= hi) continue;
      const double t = (v - a.y) / (b.y - a.y);
      crossings.push_back({a.x + t * (b.x - a.x), up ? 1 : -1});
    }
  }
  std::sort(crossings.begin(), crossings.end(),
            [](const Crossing& l, const Crossing& r) { return l.x < r.x; });

  std::vector<Span> spans;
  int winding = 0;
  for (std::size_t i = 0; i < crossings.size(); ++i) {
    winding += shape.fill_rule == FillRule::NonZero ? crossings[i].dir : 1;
    const bool inside = shape.fill_rule == FillRule::NonZero ? winding != 0 : (winding & 1) != 0;
    if (inside && i + 1 < crossings.size() && crossings[i + 1].x > crossings[i].x) {
      const Span s{crossings[i].x, crossings[i + 1].x};
      if (!spans.empty() && spans.back().end == s.begin)
        spans.back().end = s.end;
      else
        spans.push_back(s);
    }
  }
  return spans;
}

/// Artwork of one module, in unit-square coordinates (y grows downwards).
/// Shapes are painted in order on a paper-coloured ground.
struct ModuleGeometry {
  std::vector<Shape> shapes;

  bool fits_unit_square(double eps = 1e-9) const {
    for (const auto& shape : shapes)
      for (const auto& contour : shape.contours)
        for (const auto& p : contour)
          if (p.x < -eps || p.x > 1 + eps || p.y < -eps || p.y > 1 + eps) return false;
    return true;
  }
};

/// Maps a cell placed in a pixel grid: pixel i has centre i + 0.5, and the
/// cell's local coordinate u in [0, 1) covers pixel coordinates
/// [offset, offset + extent).
struct CellMapping {
  double offset = 0.0;
  double extent = 1.0;

  /// First pixel index whose centre maps to u >= value.
  std::int64_t first_at_or_after(double u) const {
    return static_cast<std::int64_t>(std::ceil(u * extent + offset - 0.5));
  }
  double to_local(std::int64_t pixel) const {
    return (static_cast<double>(pixel) + 0.5 - offset) / extent;
  }
};

/// Paints one pixel row of a module into `row` (indices [0, row.size())
/// correspond to pixel indices starting at `first_pixel`). Only pixels whose
/// centre falls inside the cell are touched; a pixel is inked iff its centre
/// lies inside the last shape covering it. No anti-aliasing.
inline void paint_module_row(const ModuleGeometry& geometry, double v, const CellMapping& xmap,
                             std::int64_t first_pixel, std::span<Ink> row) {
  const std::int64_t cell_lo = std::max(xmap.first_at_or_after(0.0), first_pixel);
  const std::int64_t cell_hi =
      std::min(xmap.first_at_or_after(1.0), first_pixel + static_cast<std::int64_t>(row.size()));
  if (cell_lo >= cell_hi) return;
  for (const auto& shape : geometry.shapes) {
    for (const auto& span : scanline_spans(shape, v)) {
      const std::int64_t lo = std::max(xmap.first_at_or_after(span.begin), cell_lo);
      const std::int64_t hi = std::min(xmap.first_at_or_after(span.end), cell_hi);
      for (std::int64_t i = lo; i < hi; ++i) row[static_cast<std::size_t>(i - first_pixel)] = shape.ink;
    }
  }
}

/// Rasterizes a module into a resolution x resolution grid of brightness
/// values (ink = 0, paper = 1), row-major, row 0 at the top.
inline std::vector<double> rasterize_module(const ModuleGeometry& geometry, int resolution) {
  const auto n = static_cast<std::size_t>(resolution);
  std::vector<double> out(n * n, 1.0);
  std::vector<Ink> row(n);
  const CellMapping map{0.0, static_cast<double>(resolution)};
  for (std::size_t y = 0; y < n; ++y) {
    std::fill(row.begin(), row.end(), Ink::Paper);
    paint_module_row(geometry, map.to_local(static_cast<std::int64_t>(y)), map, 0, row);
    for (std::size_t x = 0; x < n; ++x) out[y * n + x] = row[x] == Ink::Ink ? 0.0 : 1.0;
  }
  return out;
}

inline Shape rectangle(double x, double y, double w, double h, Ink ink = Ink::Ink) {
  Shape s;
  s.contours.push_back({{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}});
  s.ink = ink;
  return s;
}

}  // namespace modgrid
