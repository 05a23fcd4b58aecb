#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bip/model.hpp"

namespace bip::genius {

inline constexpr int kGridSize = 6;
inline constexpr int kNumCells = kGridSize * kGridSize;
inline constexpr int kNumBlockers = 7;
inline constexpr int kOpenCells = kNumCells - kNumBlockers;  // 29
inline constexpr int kNumPieces = 9;

// One board square, 1-based. "C2" names row C (third row), column 2.
struct Cell {
  int row = 1;
  int col = 1;

  int index() const { return (row - 1) * kGridSize + (col - 1); }
  static Cell from_index(int idx) {
    return {idx / kGridSize + 1, idx % kGridSize + 1};
  }
  // Accepts both "C2" and "(3,2)".
  static Cell parse(const std::string& text);
  std::string name() const;
  bool on_board() const {
    return row >= 1 && row <= kGridSize && col >= 1 && col <= kGridSize;
  }
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

// Exactly seven distinct board cells.
class BlockerConfig {
 public:
  explicit BlockerConfig(std::vector<Cell> cells);
  static BlockerConfig from_mask(std::uint64_t mask);
  // Comma-separated cells in either notation.
  static BlockerConfig parse(const std::string& text);

  std::uint64_t mask() const { return mask_; }
  const std::vector<Cell>& cells() const { return cells_; }  // sorted
  std::string to_string() const;

  friend bool operator==(const BlockerConfig& a, const BlockerConfig& b) {
    return a.mask_ == b.mask_;
  }

 private:
  std::vector<Cell> cells_;
  std::uint64_t mask_ = 0;
};

struct PieceOrientation {
  std::vector<std::pair<int, int>> offsets;  // (row, col) from the top-left
  int height = 0;
  int width = 0;
};

struct Piece {
  std::string id;  // x1, y1, a..g
  int size = 0;
  int color_imbalance = 0;  // |gray - white| on a checkerboard
  std::vector<PieceOrientation> orientations;
};

// The nine game polyominoes with every distinct orientation (rotations and
// flips), 28 piece/orientation pairs and 29 cells in total.
class PieceCatalog {
 public:
  PieceCatalog();
  const std::vector<Piece>& pieces() const { return pieces_; }
  const Piece& piece(int i) const { return pieces_[i]; }
  int piece_index(const std::string& id) const;
  int total_orientations() const;
  int total_cells() const;

 private:
  std::vector<Piece> pieces_;
};

const PieceCatalog& catalog();

struct Placement {
  int piece = 0;
  int orientation = 0;
  Cell anchor;               // top-left cell of the bounding box
  std::uint64_t mask = 0;    // covered cells
  std::vector<Cell> covered() const;
};

// Every placement that fits fully on the board, independent of blockers.
std::vector<Placement> legal_placements(const PieceCatalog& cat);

// The tiling model plus the meaning of each variable.
struct TilingModel {
  LinearModel model;
  std::vector<Placement> placements;  // placements[j] <-> VarId{j}
  BlockerConfig blockers;
};

// One binary per placement not touching a blocker; <= 1 per open cell,
// <= 1 per piece (== 1 in strict mode), objective = covered squares,
// maximized. The board is solvable exactly when the optimum is 29.
TilingModel build_model(const BlockerConfig& blockers, const PieceCatalog& cat,
                        bool strict_exactly_once = false);

enum class CountMode { kFirst, kCount };

// Independent exact-cover search over the open cells; the oracle the IP
// results are checked against. count() is thread-safe.
class ExactCoverSolver {
 public:
  explicit ExactCoverSolver(const PieceCatalog& cat);
  long count(const BlockerConfig& blockers, CountMode mode,
             long cap = -1) const;

 private:
  struct Entry {
    std::uint64_t mask;
    int piece;
  };
  std::vector<Entry> entries_;
  std::array<std::vector<int>, kNumCells> by_cell_;
};

long dlx_count(const BlockerConfig& blockers, const PieceCatalog& cat,
               CountMode mode, long cap = -1);

enum class UnsolvableClass {
  kOnePiece,
  kTwoPiece,
  kParity,
  kComplexParity,
  kUnexplained,
};

const char* to_string(UnsolvableClass c);

// Explains an unsolvable board. Throws ModelError when the board actually
// has a tiling.
UnsolvableClass classify_unsolvable(const BlockerConfig& blockers);

// 6x6 character grid; blockers are filled dots, placements print their
// piece letter, uncovered open cells '.'.
std::string render(const BlockerConfig& blockers);
std::string render(const BlockerConfig& blockers, const TilingModel& tiling,
                   const Assignment& solution);

}  // namespace bip::genius
