#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "bip/genius.hpp"

namespace bip::genius {

// The seven game dice. The data file carries one die per line as a
// comma-separated face list; faces may repeat. Every board cell must appear
// on exactly one die's support, and the last die offers exactly two cells.
class DiceSpec {
 public:
  static DiceSpec load(const std::string& path);
  static DiceSpec from_lines(const std::vector<std::string>& lines);

  const std::array<std::vector<Cell>, 7>& faces() const { return faces_; }
  const std::array<std::vector<Cell>, 7>& supports() const {
    return supports_;
  }
  long num_outcomes() const;
  std::vector<BlockerConfig> outcomes() const;

 private:
  std::array<std::vector<Cell>, 7> faces_;
  std::array<std::vector<Cell>, 7> supports_;
};

enum class SweepMode { kAll, kCanonical, kDice };

struct SweepOptions {
  SweepMode mode = SweepMode::kCanonical;
  bool count_solutions = false;  // otherwise existence only
  bool classify = true;
  int workers = 0;   // 0 = hardware concurrency
  long limit = -1;   // process only the first N configs (single-threaded)
  const DiceSpec* dice = nullptr;
  std::ostream* jsonl = nullptr;  // one record per config, canonical order
};

struct SweepStats {
  long total = 0;
  long solvable = 0;
  std::array<long, 5> unsolvable_by_class{};  // indexed by UnsolvableClass
  // Extremes over solution counts; only filled when counting.
  long min_count = -1;
  std::uint64_t min_config = 0;
  long max_count = -1;
  std::uint64_t max_config = 0;

  long unsolvable() const { return total - solvable; }
};

SweepStats sweep(const SweepOptions& options);

// The board's 8 symmetries; index 0 is the identity.
std::uint64_t transform_mask(std::uint64_t mask, int symmetry);
// True when mask is the lexicographically smallest of its 8 images.
bool is_canonical(std::uint64_t mask);

}  // namespace bip::genius
