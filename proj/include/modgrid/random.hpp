#pragma once

#include <cstdint>

namespace modgrid {

// Counter-based per-cell randomness. The construction below is part of the
// output contract; changing any constant changes every generated artifact.
//
//   mix64(z):  z += 0x9E3779B97F4A7C15
//              z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//              z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
//              return z ^ (z >> 31)                       (all mod 2^64)
//
//   cell_hash(seed, frame, row, col) =
//       mix64(mix64(mix64(mix64(seed) ^ frame) ^ row) ^ col)
//
//   cell_uniform(...) = (cell_hash(...) >> 11) * 2^-53     in [0, 1)

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t cell_hash(std::uint64_t seed, std::uint64_t frame, std::uint64_t row,
                                  std::uint64_t col) noexcept {
  return mix64(mix64(mix64(mix64(seed) ^ frame) ^ row) ^ col);
}

constexpr double to_unit_interval(std::uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

constexpr double cell_uniform(std::uint64_t seed, std::uint64_t frame, std::uint64_t row,
                              std::uint64_t col) noexcept {
  return to_unit_interval(cell_hash(seed, frame, row, col));
}

}  // namespace modgrid
