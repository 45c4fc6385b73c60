#pragma once

#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "modgrid/error.hpp"
#include "modgrid/palette.hpp"

namespace modgrid {

/// Index into the palette, or nullopt for an empty cell.
using Placement = std::optional<std::size_t>;

/// A resolved grid of square cells placed on a canvas.
struct Composition {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double cell_px = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  double canvas_w = 0.0;
  double canvas_h = 0.0;
  std::vector<Placement> placements;  // row-major

  const Placement& at(std::size_t r, std::size_t c) const { return placements[r * cols + c]; }
  Placement& at(std::size_t r, std::size_t c) { return placements[r * cols + c]; }

  std::size_t placed_count() const {
    std::size_t n = 0;
    for (const auto& p : placements) n += p.has_value();
    return n;
  }

  friend bool operator==(const Composition&, const Composition&) = default;
};

/// Throws DanglingModule if any placement does not name a palette module.
inline void check_references(const Composition& c, const ModulePalette& palette) {
  for (const auto& p : c.placements)
    if (p && *p >= palette.size())
      throw Error(ErrorCode::DanglingModule,
                  "placement references module #" + std::to_string(*p) + " but the palette has " +
                      std::to_string(palette.size()));
}

/// Order in which a generator visits cells. Results never depend on it; the
/// hook exists so tests can prove that.
class CellOrder {
 public:
  CellOrder() = default;
  explicit CellOrder(std::vector<std::size_t> order) : order_(std::move(order)) {}

  std::vector<std::size_t> resolve(std::size_t cell_count) const {
    if (order_.empty()) {
      std::vector<std::size_t> seq(cell_count);
      std::iota(seq.begin(), seq.end(), std::size_t{0});
      return seq;
    }
    std::vector<bool> seen(cell_count, false);
    if (order_.size() != cell_count)
      throw Error(ErrorCode::InvalidArgument, "cell order is not a permutation of the grid");
    for (std::size_t i : order_) {
      if (i >= cell_count || seen[i])
        throw Error(ErrorCode::InvalidArgument, "cell order is not a permutation of the grid");
      seen[i] = true;
    }
    return order_;
  }

 private:
  std::vector<std::size_t> order_;
};

}  // namespace modgrid
