#include "bip/genius.hpp"

#include <random>
#include <set>

#include "bip/genius_sweep.hpp"
#include "bip/solver.hpp"
#include "doctest.h"

using namespace bip;
using namespace bip::genius;

namespace {

BlockerConfig random_config(std::mt19937_64& rng) {
  std::set<int> cells;
  while (cells.size() < 7) cells.insert(static_cast<int>(rng() % 36));
  std::vector<Cell> v;
  for (int idx : cells) v.push_back(Cell::from_index(idx));
  return BlockerConfig(std::move(v));
}

int ip_optimum(const BlockerConfig& config) {
  TilingModel tiling = build_model(config, catalog());
  SolveReport report = branch_and_bound(tiling.model);
  REQUIRE(report.status == SolveStatus::kOptimal);
  return static_cast<int>(report.objective + 0.5);
}

}  // namespace

TEST_CASE("cell names parse in both notations") {
  Cell c2 = Cell::parse("C2");
  CHECK(c2.row == 3);
  CHECK(c2.col == 2);
  CHECK(Cell::parse("(3,2)") == c2);
  CHECK(c2.name() == "C2");
  CHECK_THROWS_AS(Cell::parse("G1"), ModelError);
  CHECK_THROWS_AS(Cell::parse("A7"), ModelError);
}

TEST_CASE("blocker configurations hold exactly seven distinct cells") {
  CHECK_THROWS_AS(BlockerConfig::parse("A1,A2"), ModelError);
  CHECK_THROWS_AS(BlockerConfig::parse("A1,A1,A2,A3,A4,A5,A6"), ModelError);
  BlockerConfig config = BlockerConfig::parse("A1,B3,C2,D6,E5,F1,F4");
  CHECK(config.cells().size() == 7);
  CHECK(config.to_string() == "A1,B3,C2,D6,E5,F1,F4");
  CHECK(BlockerConfig::parse("(1,1),(2,3),(3,2),(4,6),(5,5),(6,1),(6,4)") ==
        config);
}

TEST_CASE("the catalog matches the physical pieces") {
  const PieceCatalog& cat = catalog();
  REQUIRE(cat.pieces().size() == 9);
  CHECK(cat.total_orientations() == 28);
  CHECK(cat.total_cells() == 29);

  std::vector<int> sizes, orientations;
  for (const Piece& p : cat.pieces()) {
    sizes.push_back(p.size);
    orientations.push_back(static_cast<int>(p.orientations.size()));
  }
  CHECK(sizes == std::vector<int>{1, 4, 2, 3, 4, 3, 4, 4, 4});
  CHECK(orientations == std::vector<int>{1, 1, 2, 2, 2, 4, 4, 4, 8});
  CHECK(cat.piece(cat.piece_index("g")).orientations.size() == 8);

  // Checkerboard imbalance per piece drives the parity arguments.
  std::vector<int> imbalance;
  for (const Piece& p : cat.pieces()) imbalance.push_back(p.color_imbalance);
  CHECK(imbalance == std::vector<int>{1, 0, 0, 1, 0, 1, 0, 2, 0});
  int total = 0;
  for (int i : imbalance) total += i;
  CHECK(total == 5);
}

TEST_CASE("legal placements stay on the board") {
  std::vector<Placement> placements = legal_placements(catalog());
  const PieceCatalog& cat = catalog();

  // Exhaustive scan oracle: every piece/orientation/anchor combination
  // whose cells stay on the board, counted independently.
  long expected = 0;
  for (const Piece& piece : cat.pieces()) {
    for (const PieceOrientation& o : piece.orientations) {
      expected += static_cast<long>(kGridSize - o.height + 1) *
                  (kGridSize - o.width + 1);
    }
  }
  CHECK(static_cast<long>(placements.size()) == expected);
  CHECK(placements.size() <= 1008);

  for (const Placement& p : placements) {
    CHECK(std::popcount(p.mask) == cat.piece(p.piece).size);
    CHECK((p.mask & ~((std::uint64_t{1} << 36) - 1)) == 0);
  }

  auto count = [&](const std::string& id, auto&& pred) {
    long n = 0;
    for (const Placement& p : placements)
      if (cat.piece(p.piece).id == id &&
          pred(cat.piece(p.piece).orientations[p.orientation]))
        ++n;
    return n;
  };
  CHECK(count("x1", [](const PieceOrientation&) { return true; }) == 36);
  // Vertical domino: anchors limited to rows 1-5.
  CHECK(count("a", [](const PieceOrientation& o) { return o.height == 2; }) ==
        30);
  // Horizontal 1x4: anchors limited to columns 1-3.
  CHECK(count("c", [](const PieceOrientation& o) { return o.width == 4; }) ==
        18);
}

TEST_CASE("piece placements respect the checkerboard imbalance") {
  const PieceCatalog& cat = catalog();
  for (const Placement& p : legal_placements(cat)) {
    int dark = 0, light = 0;
    for (const Cell& c : p.covered())
      (((c.row + c.col) % 2 == 0) ? dark : light)++;
    CHECK(std::abs(dark - light) == cat.piece(p.piece).color_imbalance);
  }
}

TEST_CASE("the tiling model prunes blocked placements") {
  BlockerConfig config = BlockerConfig::parse("A1,A2,A3,A4,A5,A6,B1");
  TilingModel tiling = build_model(config, catalog());
  long expected_vars = 0;
  for (const Placement& p : legal_placements(catalog()))
    if (!(p.mask & config.mask())) ++expected_vars;
  CHECK(tiling.model.num_vars() == expected_vars);
  CHECK(static_cast<long>(tiling.placements.size()) == expected_vars);
  // 29 open-cell rows plus 9 piece rows.
  CHECK(tiling.model.num_constraints() == 29 + 9);
}

TEST_CASE("solvability equals a 29-cover and matches the exact-cover oracle") {
  std::mt19937_64 rng(424242);
  for (int trial = 0; trial < 30; ++trial) {
    BlockerConfig config = random_config(rng);
    long cover = dlx_count(config, catalog(), CountMode::kFirst);
    int optimum = ip_optimum(config);
    CAPTURE(config.to_string());
    CHECK(optimum <= 29);
    CHECK((cover > 0) == (optimum == 29));
  }
}

TEST_CASE("tiling enumeration agrees with the exact-cover count") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 3; ++trial) {
    BlockerConfig config = random_config(rng);
    long expected = dlx_count(config, catalog(), CountMode::kCount);
    TilingModel tiling = build_model(config, catalog());
    std::vector<VarId> proj;
    for (int j = 0; j < tiling.model.num_vars(); ++j) proj.push_back(VarId{j});
    EnumerationReport report =
        enumerate_solutions(tiling.model, proj, 29.0);
    CAPTURE(config.to_string());
    CHECK(report.exhausted);
    CHECK(report.count == expected);
  }
}

TEST_CASE("strict mode forces every piece exactly once") {
  std::mt19937_64 rng(11);
  BlockerConfig config = random_config(rng);
  long cover = dlx_count(config, catalog(), CountMode::kFirst);
  TilingModel strict = build_model(config, catalog(), true);
  SolveReport report = branch_and_bound(strict.model);
  if (cover > 0) {
    CHECK(report.status == SolveStatus::kOptimal);
    CHECK(report.objective == doctest::Approx(29.0));
  } else {
    CHECK(report.status == SolveStatus::kInfeasible);
  }
}

TEST_CASE("same-color blockers break parity") {
  // All blockers on the dark color: imbalance 7 > 5.
  BlockerConfig config = BlockerConfig::parse("A1,A3,A5,B2,B4,B6,C1");
  CHECK(dlx_count(config, catalog(), CountMode::kFirst) == 0);
  CHECK(classify_unsolvable(config) == UnsolvableClass::kParity);
}

TEST_CASE("two isolated cells force the single square twice") {
  // A1 isolated by A2+B1; A6 isolated by A5+B6; fills elsewhere.
  BlockerConfig config = BlockerConfig::parse("A2,B1,A5,B6,C3,D4,E5");
  REQUIRE(dlx_count(config, catalog(), CountMode::kFirst) == 0);
  CHECK(classify_unsolvable(config) == UnsolvableClass::kOnePiece);
}

TEST_CASE("two isolated dominoes force the domino twice") {
  // A1-B1 pocket and A6-B6 pocket, both domino-shaped.
  BlockerConfig config = BlockerConfig::parse("A2,B2,C1,A5,B5,C6,E3");
  if (dlx_count(config, catalog(), CountMode::kFirst) == 0) {
    CHECK(classify_unsolvable(config) == UnsolvableClass::kTwoPiece);
  }
}

TEST_CASE("classification refuses solvable boards") {
  std::mt19937_64 rng(1);
  for (;;) {
    BlockerConfig config = random_config(rng);
    if (dlx_count(config, catalog(), CountMode::kFirst) > 0) {
      CHECK_THROWS_AS(classify_unsolvable(config), ModelError);
      break;
    }
  }
}

TEST_CASE("solvability is invariant under the eight symmetries") {
  std::mt19937_64 rng(3131);
  for (int trial = 0; trial < 4; ++trial) {
    BlockerConfig config = random_config(rng);
    long count = dlx_count(config, catalog(), CountMode::kCount);
    for (int sym = 1; sym < 8; ++sym) {
      BlockerConfig image =
          BlockerConfig::from_mask(transform_mask(config.mask(), sym));
      CHECK(dlx_count(image, catalog(), CountMode::kCount) == count);
    }
  }
}

TEST_CASE("canonical filtering partitions configurations") {
  // Every 7-subset maps to exactly one canonical representative.
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    BlockerConfig config = random_config(rng);
    int canonical_images = 0;
    std::set<std::uint64_t> orbit;
    for (int sym = 0; sym < 8; ++sym)
      orbit.insert(transform_mask(config.mask(), sym));
    for (std::uint64_t mask : orbit)
      if (is_canonical(mask)) ++canonical_images;
    CHECK(canonical_images == 1);
  }
}

TEST_CASE("rendering marks blockers and pieces") {
  BlockerConfig config = BlockerConfig::parse("A1,B3,C2,D6,E5,F1,F4");
  std::string board = render(config);
  CHECK(board.find("●") != std::string::npos);

  TilingModel tiling = build_model(config, catalog());
  SolveReport report = branch_and_bound(tiling.model);
  REQUIRE(report.status == SolveStatus::kOptimal);
  if (report.objective > 28.5) {
    std::string solved = render(config, tiling, *report.best);
    CHECK(solved.find('.') == std::string::npos);  // fully covered
    for (char piece : {'x', 'y', 'a', 'g'})
      CHECK(solved.find(piece) != std::string::npos);
    CHECK(solved == render(config, tiling, *report.best));
  }
}

TEST_CASE("sweep prefix runs deterministically") {
  SweepOptions options;
  options.mode = SweepMode::kCanonical;
  options.limit = 40;
  options.count_solutions = true;
  SweepStats stats = sweep(options);
  CHECK(stats.total == 40);
  CHECK(stats.solvable + stats.unsolvable() == 40);
  SweepStats again = sweep(options);
  CHECK(again.solvable == stats.solvable);
  CHECK(again.min_count == stats.min_count);
}

TEST_CASE("dice files are validated") {
  // Missing cells: only six dice.
  std::vector<std::string> bad = {"A1,A2,A3,A4,A5,A6", "B1,B2,B3,B4,B5,B6",
                                  "C1,C2,C3,C4,C5,C6", "D1,D2,D3,D4,D5,D6",
                                  "E1,E2,E3,E4,E5,E6", "F1,F2,F3,F4,F5,F6"};
  CHECK_THROWS_AS(DiceSpec::from_lines(bad), ModelError);

  std::vector<std::string> overlapping = bad;
  overlapping.push_back("A1,F6");
  CHECK_THROWS_AS(DiceSpec::from_lines(overlapping), ModelError);
}
