#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace modgrid;
using Catch::Approx;

TEST_CASE("choose_orientation", "[assisted]") {
  REQUIRE(choose_orientation(1920, 1080) == Orientation::Horizontal);
  REQUIRE(choose_orientation(1080, 1920) == Orientation::Vertical);
  REQUIRE(choose_orientation(500, 500) == Orientation::Vertical);
  REQUIRE(choose_orientation(100.5, 100) == Orientation::Horizontal);
  REQUIRE_THROWS_AS(choose_orientation(0, 10), Error);
  REQUIRE_THROWS_AS(choose_orientation(10, -1), Error);
  REQUIRE(oriented_layout_path("cfg", Orientation::Horizontal) == std::filesystem::path("cfg/horizontal.mcfg"));
  REQUIRE(oriented_layout_path("cfg", Orientation::Vertical) == std::filesystem::path("cfg/vertical.mcfg"));
}

TEST_CASE("fit_grid centres the largest square cells", "[assisted]") {
  const auto c = fit_grid(2, 4, 1000, 300);
  REQUIRE(c.cell_px == 150.0);
  REQUIRE(c.origin_x == 200.0);
  REQUIRE(c.origin_y == 0.0);
  const auto v = fit_grid(3, 1, 100, 900);
  REQUIRE(v.cell_px == 100.0);
  REQUIRE(v.origin_x == 0.0);
  REQUIRE(v.origin_y == 300.0);
  REQUIRE_THROWS_AS(fit_grid(0, 1, 10, 10), Error);
}

TEST_CASE("generate_assisted examples", "[assisted]") {
  const auto pal = default_palette();
  SECTION("fixed cells place their module") {
    const auto c = generate_assisted(parse_config("11\n11"), pal, 200, 200, 7);
    REQUIRE(c.placements == std::vector<Placement>(4, std::size_t{0}));
  }
  SECTION("empty cells stay empty") {
    const auto c = generate_assisted(parse_config("0A\n00"), pal, 200, 200, 7);
    REQUIRE(c.placed_count() == 1);
    REQUIRE(c.at(0, 1) == std::size_t{9});
  }
  SECTION("one-module palette fills every random cell with it") {
    const auto one = default_palette(1);
    const auto c = generate_assisted(parse_config("***\n*0*"), one, 300, 200, 99);
    REQUIRE(c.placed_count() == 5);
    for (const auto& p : c.placements)
      if (p) REQUIRE(*p == 0);
  }
  SECTION("fixed index beyond the palette degrades to random") {
    const auto small = default_palette(3);
    const auto c = generate_assisted(parse_config("Z"), small, 10, 10, 3);
    REQUIRE(c.at(0, 0) == uniform_module(3, 0, 0, 3));
  }
  SECTION("random cells use the counter-based draw") {
    const auto c = generate_assisted(parse_config("**\n**"), pal, 100, 100, 12345);
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t col = 0; col < 2; ++col) {
        const double u = cell_uniform(12345, 0, r, col);
        REQUIRE(c.at(r, col) == std::min<std::size_t>(static_cast<std::size_t>(std::floor(u * 10)), 9));
      }
  }
}

TEST_CASE("random cells are uniform over the palette", "[assisted][property]") {
  const auto pal = default_palette();
  const auto layout = ConfigLayout::filled(100, 100, CellSpec::random());
  const auto c = generate_assisted(layout, pal, 1000, 1000, 2024);
  std::vector<int> counts(pal.size(), 0);
  for (const auto& p : c.placements) ++counts[*p];
  const double expect = 10000.0 / 10, sigma = std::sqrt(10000.0 * 0.1 * 0.9);
  for (int n : counts) REQUIRE(std::abs(n - expect) <= 3 * sigma);
}

TEST_CASE("assisted invariants", "[assisted][property]") {
  const auto pal = default_palette();
  std::mt19937_64 rng(77);
  const std::string alphabet = "00**123ZA";
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t rows = 1 + rng() % 12, cols = 1 + rng() % 12;
    std::string text;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) text += alphabet[rng() % alphabet.size()];
      text += '\n';
    }
    const auto layout = parse_config(text);
    const std::uint64_t seed = rng();
    const auto a = generate_assisted(layout, pal, 640, 480, seed);

    // Same inputs give the same composition, whatever the visiting order.
    std::vector<std::size_t> order(rows * cols);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    REQUIRE(generate_assisted(layout, pal, 640, 480, seed, CellOrder(order)) == a);
    std::reverse(order.begin(), order.end());
    REQUIRE(generate_assisted(layout, pal, 640, 480, seed, CellOrder(order)) == a);

    std::size_t empties = 0;
    for (const auto& cell : layout.cells) empties += cell.kind == CellKind::Empty;
    REQUIRE(a.placements.size() - a.placed_count() == empties);

    // Fixed cells with a resolvable index do not depend on the seed.
    const auto b = generate_assisted(layout, pal, 640, 480, seed + 1);
    for (std::size_t i = 0; i < layout.cells.size(); ++i)
      if (layout.cells[i].kind == CellKind::Fixed && pal.find(layout.cells[i].index)) REQUIRE(a.placements[i] == b.placements[i]);

    // Canvas scaling scales the geometry and leaves the placements alone.
    const auto scaled = generate_assisted(layout, pal, 1280, 960, seed);
    REQUIRE(scaled.placements == a.placements);
    REQUIRE(scaled.cell_px == Approx(2 * a.cell_px));
    REQUIRE(scaled.origin_x == Approx(2 * a.origin_x));
  }
}

TEST_CASE("CellOrder rejects non-permutations", "[assisted]") {
  const auto pal = default_palette();
  const auto layout = parse_config("**");
  REQUIRE_THROWS_AS(generate_assisted(layout, pal, 10, 10, 0, CellOrder({0, 0})), Error);
  REQUIRE_THROWS_AS(generate_assisted(layout, pal, 10, 10, 0, CellOrder({0})), Error);
  REQUIRE_THROWS_AS(generate_assisted(layout, pal, 10, 10, 0, CellOrder({0, 2})), Error);
}

TEST_CASE("load_layout reads from disk", "[assisted]") {
  testsupport::TempDir dir;
  testsupport::write_text(dir / "horizontal.mcfg", "1*\n");
  const auto layout = load_layout(oriented_layout_path(dir.path(), choose_orientation(300, 100)));
  REQUIRE(layout.cols == 2);
  REQUIRE_THROWS_AS(load_layout(oriented_layout_path(dir.path(), Orientation::Vertical)), Error);
}
