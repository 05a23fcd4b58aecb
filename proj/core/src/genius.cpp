#include "bip/genius.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace bip::genius {
namespace {

std::uint64_t board_mask() { return (std::uint64_t{1} << kNumCells) - 1; }

int checkerboard_imbalance(std::uint64_t mask) {
  int dark = 0, light = 0;
  for (int idx = 0; idx < kNumCells; ++idx) {
    if (!(mask >> idx & 1)) continue;
    Cell c = Cell::from_index(idx);
    ((c.row + c.col) % 2 == 0 ? dark : light)++;
  }
  return std::abs(dark - light);
}

}  // namespace

Cell Cell::parse(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw ModelError("empty cell name");
  Cell out;
  if (s.front() == '(') {
    if (s.back() != ')') throw ModelError("unbalanced cell name: " + text);
    std::string inner = s.substr(1, s.size() - 2);
    auto comma = inner.find(',');
    if (comma == std::string::npos)
      throw ModelError("expected (row,col): " + text);
    out.row = std::stoi(inner.substr(0, comma));
    out.col = std::stoi(inner.substr(comma + 1));
  } else {
    char r = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    if (r < 'A' || r > 'F' || s.size() < 2)
      throw ModelError("bad cell name: " + text);
    out.row = r - 'A' + 1;
    out.col = std::stoi(s.substr(1));
  }
  if (!out.on_board()) throw ModelError("cell off the board: " + text);
  return out;
}

std::string Cell::name() const {
  std::string s;
  s += static_cast<char>('A' + row - 1);
  s += static_cast<char>('0' + col);
  return s;
}

BlockerConfig::BlockerConfig(std::vector<Cell> cells) : cells_(std::move(cells)) {
  if (cells_.size() != kNumBlockers)
    throw ModelError("a blocker configuration needs exactly 7 cells");
  std::sort(cells_.begin(), cells_.end());
  for (const Cell& c : cells_) {
    if (!c.on_board()) throw ModelError("blocker off the board");
    std::uint64_t bit = std::uint64_t{1} << c.index();
    if (mask_ & bit) throw ModelError("duplicate blocker " + c.name());
    mask_ |= bit;
  }
}

BlockerConfig BlockerConfig::from_mask(std::uint64_t mask) {
  std::vector<Cell> cells;
  for (int idx = 0; idx < kNumCells; ++idx)
    if (mask >> idx & 1) cells.push_back(Cell::from_index(idx));
  return BlockerConfig(std::move(cells));
}

BlockerConfig BlockerConfig::parse(const std::string& text) {
  std::vector<Cell> cells;
  std::string token;
  int depth = 0;
  auto flush = [&] {
    if (!token.empty()) cells.push_back(Cell::parse(token));
    token.clear();
  };
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      flush();
    } else {
      token += c;
    }
  }
  flush();
  return BlockerConfig(std::move(cells));
}

std::string BlockerConfig::to_string() const {
  std::string out;
  for (const Cell& c : cells_) {
    if (!out.empty()) out += ',';
    out += c.name();
  }
  return out;
}

namespace {

using Shape = std::vector<std::pair<int, int>>;

Shape normalize(Shape s) {
  int min_r = s[0].first, min_c = s[0].second;
  for (auto& [r, c] : s) {
    min_r = std::min(min_r, r);
    min_c = std::min(min_c, c);
  }
  for (auto& [r, c] : s) {
    r -= min_r;
    c -= min_c;
  }
  std::sort(s.begin(), s.end());
  return s;
}

Shape rotate(const Shape& s) {
  Shape out;
  for (auto [r, c] : s) out.push_back({c, -r});
  return normalize(out);
}

Shape flip(const Shape& s) {
  Shape out;
  for (auto [r, c] : s) out.push_back({r, -c});
  return normalize(out);
}

Piece make_piece(std::string id, Shape base) {
  std::set<Shape> variants;
  Shape s = normalize(std::move(base));
  for (int f = 0; f < 2; ++f) {
    for (int r = 0; r < 4; ++r) {
      variants.insert(s);
      s = rotate(s);
    }
    s = flip(s);
  }
  Piece piece;
  piece.id = std::move(id);
  piece.size = static_cast<int>(variants.begin()->size());
  for (const Shape& v : variants) {
    PieceOrientation o;
    o.offsets = v;
    for (auto [r, c] : v) {
      o.height = std::max(o.height, r + 1);
      o.width = std::max(o.width, c + 1);
    }
    piece.orientations.push_back(std::move(o));
  }
  int dark = 0, light = 0;
  for (auto [r, c] : *variants.begin()) ((r + c) % 2 == 0 ? dark : light)++;
  piece.color_imbalance = std::abs(dark - light);
  return piece;
}

}  // namespace

PieceCatalog::PieceCatalog() {
  pieces_.push_back(make_piece("x1", {{0, 0}}));
  pieces_.push_back(make_piece("y1", {{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
  pieces_.push_back(make_piece("a", {{0, 0}, {0, 1}}));
  pieces_.push_back(make_piece("b", {{0, 0}, {0, 1}, {0, 2}}));
  pieces_.push_back(make_piece("c", {{0, 0}, {0, 1}, {0, 2}, {0, 3}}));
  pieces_.push_back(make_piece("d", {{0, 0}, {1, 0}, {1, 1}}));
  pieces_.push_back(make_piece("e", {{0, 1}, {0, 2}, {1, 0}, {1, 1}}));
  pieces_.push_back(make_piece("f", {{0, 0}, {0, 1}, {0, 2}, {1, 1}}));
  pieces_.push_back(make_piece("g", {{0, 0}, {1, 0}, {2, 0}, {2, 1}}));
}

int PieceCatalog::piece_index(const std::string& id) const {
  for (size_t i = 0; i < pieces_.size(); ++i)
    if (pieces_[i].id == id) return static_cast<int>(i);
  throw ModelError("unknown piece id: " + id);
}

int PieceCatalog::total_orientations() const {
  int n = 0;
  for (const Piece& p : pieces_) n += static_cast<int>(p.orientations.size());
  return n;
}

int PieceCatalog::total_cells() const {
  int n = 0;
  for (const Piece& p : pieces_) n += p.size;
  return n;
}

const PieceCatalog& catalog() {
  static const PieceCatalog instance;
  return instance;
}

std::vector<Cell> Placement::covered() const {
  std::vector<Cell> out;
  for (int idx = 0; idx < kNumCells; ++idx)
    if (mask >> idx & 1) out.push_back(Cell::from_index(idx));
  return out;
}

std::vector<Placement> legal_placements(const PieceCatalog& cat) {
  std::vector<Placement> out;
  for (size_t pi = 0; pi < cat.pieces().size(); ++pi) {
    const Piece& piece = cat.pieces()[pi];
    for (size_t oi = 0; oi < piece.orientations.size(); ++oi) {
      const PieceOrientation& o = piece.orientations[oi];
      for (int r = 1; r + o.height - 1 <= kGridSize; ++r) {
        for (int c = 1; c + o.width - 1 <= kGridSize; ++c) {
          Placement p;
          p.piece = static_cast<int>(pi);
          p.orientation = static_cast<int>(oi);
          p.anchor = {r, c};
          for (auto [dr, dc] : o.offsets)
            p.mask |= std::uint64_t{1} << Cell{r + dr, c + dc}.index();
          out.push_back(p);
        }
      }
    }
  }
  return out;
}

TilingModel build_model(const BlockerConfig& blockers, const PieceCatalog& cat,
                        bool strict_exactly_once) {
  TilingModel out{LinearModel(Sense::kMaximize), {}, blockers};
  LinearExpr objective;
  std::array<LinearExpr, kNumCells> cell_sums;
  std::vector<LinearExpr> piece_sums(cat.pieces().size());

  for (const Placement& p : legal_placements(cat)) {
    if (p.mask & blockers.mask()) continue;  // pruned instead of forced to 0
    const Piece& piece = cat.piece(p.piece);
    std::string name = piece.id;
    if (piece.orientations.size() > 1)
      name += std::to_string(p.orientation + 1);
    name += "(" + std::to_string(p.anchor.row) + "," +
            std::to_string(p.anchor.col) + ")";
    VarId var = out.model.add_binary(name);
    out.placements.push_back(p);
    objective.add(var, piece.size);
    piece_sums[p.piece].add(var, 1.0);
    for (int idx = 0; idx < kNumCells; ++idx)
      if (p.mask >> idx & 1) cell_sums[idx].add(var, 1.0);
  }

  out.model.set_objective(std::move(objective));
  for (int idx = 0; idx < kNumCells; ++idx) {
    if (blockers.mask() >> idx & 1) continue;
    Cell c = Cell::from_index(idx);
    out.model.add_constraint(std::move(cell_sums[idx]), Relation::kLessEqual,
                             1.0, "cell(" + c.name() + ")");
  }
  for (size_t pi = 0; pi < cat.pieces().size(); ++pi) {
    out.model.add_constraint(
        std::move(piece_sums[pi]),
        strict_exactly_once ? Relation::kEqual : Relation::kLessEqual, 1.0,
        "piece(" + cat.piece(static_cast<int>(pi)).id + ")");
  }
  return out;
}

ExactCoverSolver::ExactCoverSolver(const PieceCatalog& cat) {
  for (const Placement& p : legal_placements(cat))
    entries_.push_back({p.mask, p.piece});
  for (size_t i = 0; i < entries_.size(); ++i) {
    for (int idx = 0; idx < kNumCells; ++idx)
      if (entries_[i].mask >> idx & 1)
        by_cell_[idx].push_back(static_cast<int>(i));
  }
}

long ExactCoverSolver::count(const BlockerConfig& blockers, CountMode mode,
                             long cap) const {
  struct Frame {
    std::uint64_t occupied;
  };
  long found = 0;
  bool used[kNumPieces] = {};
  const std::uint64_t full = board_mask();

  // Recursive lambda over the most constrained uncovered cell.
  auto dfs = [&](auto&& self, std::uint64_t occupied) -> bool {
    if (occupied == full) {
      ++found;
      if (mode == CountMode::kFirst) return false;
      if (cap >= 0 && found >= cap) return false;
      return true;
    }
    int best_cell = -1, best_n = INT32_MAX;
    std::uint64_t open = full & ~occupied;
    for (std::uint64_t rest = open; rest != 0; rest &= rest - 1) {
      int cell = std::countr_zero(rest);
      int n = 0;
      for (int idx : by_cell_[cell]) {
        const Entry& e = entries_[idx];
        if (!used[e.piece] && !(e.mask & occupied)) ++n;
      }
      if (n == 0) return true;  // dead cell, no tiling below this node
      if (n < best_n) {
        best_n = n;
        best_cell = cell;
        if (n == 1) break;
      }
    }
    for (int idx : by_cell_[best_cell]) {
      const Entry& e = entries_[idx];
      if (used[e.piece] || (e.mask & occupied)) continue;
      used[e.piece] = true;
      bool keep_going = self(self, occupied | e.mask);
      used[e.piece] = false;
      if (!keep_going) return false;
    }
    return true;
  };
  dfs(dfs, blockers.mask());
  return found;
}

long dlx_count(const BlockerConfig& blockers, const PieceCatalog& cat,
               CountMode mode, long cap) {
  static const ExactCoverSolver shared{catalog()};
  if (&cat == &catalog()) return shared.count(blockers, mode, cap);
  return ExactCoverSolver(cat).count(blockers, mode, cap);
}

const char* to_string(UnsolvableClass c) {
  switch (c) {
    case UnsolvableClass::kOnePiece: return "one_piece";
    case UnsolvableClass::kTwoPiece: return "two_piece";
    case UnsolvableClass::kParity: return "parity";
    case UnsolvableClass::kComplexParity: return "complex_parity";
    case UnsolvableClass::kUnexplained: return "unexplained";
  }
  return "?";
}

namespace {

struct Region {
  int area = 0;
  int imbalance = 0;
};

std::vector<Region> open_regions(std::uint64_t open) {
  std::vector<Region> out;
  std::uint64_t seen = 0;
  for (int start = 0; start < kNumCells; ++start) {
    if (!(open >> start & 1) || (seen >> start & 1)) continue;
    Region region;
    int dark = 0, light = 0;
    std::vector<int> stack{start};
    seen |= std::uint64_t{1} << start;
    while (!stack.empty()) {
      int idx = stack.back();
      stack.pop_back();
      ++region.area;
      Cell c = Cell::from_index(idx);
      ((c.row + c.col) % 2 == 0 ? dark : light)++;
      const int dr[] = {-1, 1, 0, 0};
      const int dc[] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        Cell nb{c.row + dr[k], c.col + dc[k]};
        if (!nb.on_board()) continue;
        int ni = nb.index();
        if ((open >> ni & 1) && !(seen >> ni & 1)) {
          seen |= std::uint64_t{1} << ni;
          stack.push_back(ni);
        }
      }
    }
    region.imbalance = std::abs(dark - light);
    out.push_back(region);
  }
  return out;
}

// Can the nine pieces be split into disjoint groups matching every region's
// area, with each group's color capacity covering the region's imbalance?
bool piece_partition_exists(const std::vector<Region>& regions) {
  const PieceCatalog& cat = catalog();
  const int n = kNumPieces;
  std::vector<int> size(n), cap(n);
  for (int i = 0; i < n; ++i) {
    size[i] = cat.piece(i).size;
    cap[i] = cat.piece(i).color_imbalance;
  }
  std::vector<int> subset_size(1 << n, 0), subset_cap(1 << n, 0);
  for (int s = 1; s < (1 << n); ++s) {
    int b = std::countr_zero(static_cast<unsigned>(s));
    subset_size[s] = subset_size[s & (s - 1)] + size[b];
    subset_cap[s] = subset_cap[s & (s - 1)] + cap[b];
  }
  std::map<std::pair<size_t, int>, bool> memo;
  auto feasible = [&](auto&& self, size_t k, int remaining) -> bool {
    if (k == regions.size()) return remaining == 0;
    auto key = std::make_pair(k, remaining);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool ok = false;
    // Enumerate submasks of `remaining` with the right area.
    for (int s = remaining; s > 0 && !ok; s = (s - 1) & remaining) {
      if (subset_size[s] != regions[k].area) continue;
      if (subset_cap[s] < regions[k].imbalance) continue;
      ok = self(self, k + 1, remaining & ~s);
    }
    if (regions[k].area == 0) ok = self(self, k + 1, remaining);
    memo[key] = ok;
    return ok;
  };
  return feasible(feasible, 0, (1 << n) - 1);
}

}  // namespace

UnsolvableClass classify_unsolvable(const BlockerConfig& blockers) {
  if (dlx_count(blockers, catalog(), CountMode::kFirst) > 0)
    throw ModelError("board is solvable; nothing to classify");
  std::uint64_t open = board_mask() & ~blockers.mask();
  std::vector<Region> regions = open_regions(open);

  int singles = 0, doubles = 0;
  for (const Region& r : regions) {
    if (r.area == 1) ++singles;
    if (r.area == 2) ++doubles;
  }
  // A global imbalance beyond what the pieces can recoup wins over the
  // forced-piece scenarios: same-color blocker sets always land here even
  // when they also pinch off single cells.
  if (checkerboard_imbalance(open) > 5) return UnsolvableClass::kParity;
  if (singles >= 2) return UnsolvableClass::kOnePiece;
  if (doubles >= 2) return UnsolvableClass::kTwoPiece;
  if (!piece_partition_exists(regions)) return UnsolvableClass::kComplexParity;
  return UnsolvableClass::kUnexplained;
}

std::string render(const BlockerConfig& blockers) {
  std::string out;
  for (int r = 1; r <= kGridSize; ++r) {
    for (int c = 1; c <= kGridSize; ++c) {
      int idx = Cell{r, c}.index();
      out += (blockers.mask() >> idx & 1) ? "●" : ".";
      if (c < kGridSize) out += ' ';
    }
    out += '\n';
  }
  return out;
}

std::string render(const BlockerConfig& blockers, const TilingModel& tiling,
                   const Assignment& solution) {
  std::array<char, kNumCells> grid;
  grid.fill('.');
  for (size_t j = 0; j < tiling.placements.size(); ++j) {
    if (solution.get(VarId{static_cast<int>(j)}) < 0.5) continue;
    const Placement& p = tiling.placements[j];
    char letter = catalog().piece(p.piece).id[0];
    for (int idx = 0; idx < kNumCells; ++idx)
      if (p.mask >> idx & 1) grid[idx] = letter;
  }
  std::string out;
  for (int r = 1; r <= kGridSize; ++r) {
    for (int c = 1; c <= kGridSize; ++c) {
      int idx = Cell{r, c}.index();
      if (blockers.mask() >> idx & 1) out += "●";
      else out += grid[idx];
      if (c < kGridSize) out += ' ';
    }
    out += '\n';
  }
  return out;
}

}  // namespace bip::genius
