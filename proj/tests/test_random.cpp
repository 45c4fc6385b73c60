#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "support.hpp"

using namespace modgrid;

namespace {

// Straight transcription of the mixing recipe with explicit wrap-around.
std::uint64_t reference_mix(std::uint64_t z) {
  z = z + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

TEST_CASE("mix64 golden values", "[random]") {
  STATIC_REQUIRE(mix64(0) == 0xE220A8397B1DCDAFULL);
  // First outputs of the SplitMix64 stream seeded with 0 are mix64(k * golden).
  REQUIRE(mix64(0x9E3779B97F4A7C15ULL) == 0x6E789E6AA1B965F4ULL);
  REQUIRE(mix64(2 * 0x9E3779B97F4A7C15ULL) == 0x06C45D188009454FULL);
}

TEST_CASE("cell_hash chains mix64 over seed, frame, row and col", "[random]") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t seed = rng(), frame = rng() % 100, row = rng() % 1000, col = rng() % 1000;
    const std::uint64_t expect = reference_mix(reference_mix(reference_mix(reference_mix(seed) ^ frame) ^ row) ^ col);
    REQUIRE(cell_hash(seed, frame, row, col) == expect);
    REQUIRE(cell_uniform(seed, frame, row, col) == static_cast<double>(expect >> 11) / 9007199254740992.0);
  }
}

TEST_CASE("unit interval mapping stays in [0, 1)", "[random]") {
  REQUIRE(to_unit_interval(0) == 0.0);
  REQUIRE(to_unit_interval(~std::uint64_t{0}) < 1.0);
  REQUIRE(to_unit_interval(~std::uint64_t{0}) == 1.0 - 0x1.0p-53);
  std::set<double> seen;
  for (std::uint64_t r = 0; r < 50; ++r)
    for (std::uint64_t c = 0; c < 50; ++c) {
      const double u = cell_uniform(42, 0, r, c);
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      seen.insert(u);
    }
  REQUIRE(seen.size() == 2500);
}

TEST_CASE("neighbouring coordinates give distinct draws", "[random]") {
  REQUIRE(cell_hash(1, 0, 0, 1) != cell_hash(1, 0, 1, 0));
  REQUIRE(cell_hash(1, 1, 0, 0) != cell_hash(1, 0, 0, 0));
  REQUIRE(cell_hash(2, 0, 0, 0) != cell_hash(1, 0, 0, 0));
}
