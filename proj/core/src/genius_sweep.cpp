#include "bip/genius_sweep.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>

#include "bip/parallel.hpp"

namespace bip::genius {
namespace {

std::array<std::array<int, kNumCells>, 8> symmetry_tables() {
  std::array<std::array<int, kNumCells>, 8> tables;
  for (int sym = 0; sym < 8; ++sym) {
    for (int idx = 0; idx < kNumCells; ++idx) {
      Cell c = Cell::from_index(idx);
      int r = c.row, col = c.col;
      for (int k = 0; k < sym % 4; ++k) {
        int nr = col, nc = kGridSize + 1 - r;
        r = nr;
        col = nc;
      }
      if (sym >= 4) col = kGridSize + 1 - col;
      tables[sym][idx] = Cell{r, col}.index();
    }
  }
  return tables;
}

const std::array<std::array<int, kNumCells>, 8>& tables() {
  static const auto t = symmetry_tables();
  return t;
}

}  // namespace

std::uint64_t transform_mask(std::uint64_t mask, int symmetry) {
  const auto& table = tables()[symmetry];
  std::uint64_t out = 0;
  for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1) {
    int idx = std::countr_zero(rest);
    out |= std::uint64_t{1} << table[idx];
  }
  return out;
}

bool is_canonical(std::uint64_t mask) {
  for (int sym = 1; sym < 8; ++sym) {
    if (transform_mask(mask, sym) < mask) return false;
  }
  return true;
}

DiceSpec DiceSpec::from_lines(const std::vector<std::string>& lines) {
  DiceSpec spec;
  size_t die = 0;
  for (const std::string& raw : lines) {
    std::string line = raw;
    if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank) continue;
    if (die >= 7) throw ModelError("dice file has more than 7 dice");
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ','))
      spec.faces_[die].push_back(Cell::parse(token));
    if (spec.faces_[die].empty()) throw ModelError("die with no faces");
    ++die;
  }
  if (die != 7) throw ModelError("dice file must define exactly 7 dice");

  std::uint64_t seen = 0;
  for (size_t d = 0; d < 7; ++d) {
    std::uint64_t support = 0;
    for (const Cell& c : spec.faces_[d]) support |= std::uint64_t{1} << c.index();
    if (support & seen)
      throw ModelError("dice share a board cell; supports must be disjoint");
    seen |= support;
    for (int idx = 0; idx < kNumCells; ++idx)
      if (support >> idx & 1) spec.supports_[d].push_back(Cell::from_index(idx));
  }
  if (seen != (std::uint64_t{1} << kNumCells) - 1)
    throw ModelError("dice do not cover every board cell");
  if (spec.supports_[6].size() != 2)
    throw ModelError("the seventh die must offer exactly two cells");
  return spec;
}

DiceSpec DiceSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open dice file " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return from_lines(lines);
}

long DiceSpec::num_outcomes() const {
  long n = 1;
  for (const auto& s : supports_) n *= static_cast<long>(s.size());
  return n;
}

std::vector<BlockerConfig> DiceSpec::outcomes() const {
  std::vector<BlockerConfig> out;
  out.reserve(num_outcomes());
  std::array<size_t, 7> pick{};
  for (;;) {
    std::vector<Cell> cells;
    cells.reserve(7);
    for (size_t d = 0; d < 7; ++d) cells.push_back(supports_[d][pick[d]]);
    out.emplace_back(std::move(cells));
    int d = 6;
    while (d >= 0) {
      if (++pick[d] < supports_[d].size()) break;
      pick[d] = 0;
      --d;
    }
    if (d < 0) break;
  }
  return out;
}

namespace {

struct TaskResult {
  SweepStats stats;
  std::string jsonl;
};

void observe(const SweepOptions& opt, std::uint64_t mask, TaskResult& out) {
  BlockerConfig config = BlockerConfig::from_mask(mask);
  long count = -1;
  bool solvable;
  if (opt.count_solutions) {
    count = dlx_count(config, catalog(), CountMode::kCount);
    solvable = count > 0;
  } else {
    solvable = dlx_count(config, catalog(), CountMode::kFirst) > 0;
  }
  ++out.stats.total;
  UnsolvableClass cls{};
  bool classified = false;
  if (solvable) {
    ++out.stats.solvable;
    if (opt.count_solutions) {
      if (out.stats.min_count < 0 || count < out.stats.min_count ||
          (count == out.stats.min_count && mask < out.stats.min_config)) {
        out.stats.min_count = count;
        out.stats.min_config = mask;
      }
      if (count > out.stats.max_count ||
          (count == out.stats.max_count && mask < out.stats.max_config)) {
        out.stats.max_count = count;
        out.stats.max_config = mask;
      }
    }
  } else if (opt.classify) {
    cls = classify_unsolvable(config);
    classified = true;
    ++out.stats.unsolvable_by_class[static_cast<int>(cls)];
  }
  if (opt.jsonl != nullptr) {
    out.jsonl += "{\"config\":\"" + config.to_string() + "\",\"solvable\":";
    out.jsonl += solvable ? "true" : "false";
    if (opt.count_solutions && solvable)
      out.jsonl += ",\"count\":" + std::to_string(count);
    if (classified)
      out.jsonl += std::string(",\"class\":\"") + to_string(cls) + "\"";
    out.jsonl += "}\n";
  }
}

void merge(SweepStats& into, const SweepStats& part) {
  into.total += part.total;
  into.solvable += part.solvable;
  for (size_t i = 0; i < part.unsolvable_by_class.size(); ++i)
    into.unsolvable_by_class[i] += part.unsolvable_by_class[i];
  if (part.min_count >= 0 &&
      (into.min_count < 0 || part.min_count < into.min_count ||
       (part.min_count == into.min_count &&
        part.min_config < into.min_config))) {
    into.min_count = part.min_count;
    into.min_config = part.min_config;
  }
  if (part.max_count >= 0 &&
      (part.max_count > into.max_count ||
       (part.max_count == into.max_count &&
        part.max_config < into.max_config))) {
    into.max_count = part.max_count;
    into.max_config = part.max_config;
  }
}

// Enumerates 7-subsets of the 36 cells with the two smallest members fixed,
// so (c1, c2) pairs form independent work units in lexicographic order.
template <typename Fn>
void enumerate_tail(int c1, int c2, Fn&& fn) {
  int idx[7];
  idx[0] = c1;
  idx[1] = c2;
  for (int k = 2; k < 7; ++k) idx[k] = idx[k - 1] + 1;
  if (idx[6] >= kNumCells) return;
  for (;;) {
    std::uint64_t mask = 0;
    for (int k = 0; k < 7; ++k) mask |= std::uint64_t{1} << idx[k];
    fn(mask);
    int k = 6;
    while (k >= 2 && idx[k] == kNumCells - (7 - k)) --k;
    if (k < 2) break;
    ++idx[k];
    for (int j = k + 1; j < 7; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

SweepStats sweep(const SweepOptions& options) {
  SweepStats total;

  if (options.mode == SweepMode::kDice) {
    if (options.dice == nullptr)
      throw ModelError("dice sweep needs a DiceSpec");
    std::vector<BlockerConfig> outcomes = options.dice->outcomes();
    if (options.limit >= 0 &&
        static_cast<long>(outcomes.size()) > options.limit)
      outcomes.erase(outcomes.begin() + options.limit, outcomes.end());
    const size_t chunk = 512;
    size_t num_tasks = (outcomes.size() + chunk - 1) / chunk;
    std::vector<TaskResult> results(num_tasks);
    parallel_tasks(num_tasks, options.workers, [&](size_t t) {
      size_t begin = t * chunk;
      size_t end = std::min(outcomes.size(), begin + chunk);
      for (size_t i = begin; i < end; ++i)
        observe(options, outcomes[i].mask(), results[t]);
    });
    for (const TaskResult& r : results) {
      merge(total, r.stats);
      if (options.jsonl != nullptr) *options.jsonl << r.jsonl;
    }
    return total;
  }

  const bool canonical_only = options.mode == SweepMode::kCanonical;

  if (options.limit >= 0) {
    // Deterministic prefix for tests: single-threaded, in order.
    TaskResult result;
    long remaining = options.limit;
    for (int c1 = 0; c1 < kNumCells - 6 && remaining > 0; ++c1) {
      for (int c2 = c1 + 1; c2 < kNumCells - 5 && remaining > 0; ++c2) {
        enumerate_tail(c1, c2, [&](std::uint64_t mask) {
          if (remaining <= 0) return;
          if (canonical_only && !is_canonical(mask)) return;
          observe(options, mask, result);
          --remaining;
        });
      }
    }
    merge(total, result.stats);
    if (options.jsonl != nullptr) *options.jsonl << result.jsonl;
    return total;
  }

  std::vector<std::pair<int, int>> heads;
  for (int c1 = 0; c1 < kNumCells - 6; ++c1)
    for (int c2 = c1 + 1; c2 < kNumCells - 5; ++c2) heads.push_back({c1, c2});
  std::vector<TaskResult> results(heads.size());
  parallel_tasks(heads.size(), options.workers, [&](size_t t) {
    auto [c1, c2] = heads[t];
    enumerate_tail(c1, c2, [&](std::uint64_t mask) {
      if (canonical_only && !is_canonical(mask)) return;
      observe(options, mask, results[t]);
    });
  });
  for (const TaskResult& r : results) {
    merge(total, r.stats);
    if (options.jsonl != nullptr) *options.jsonl << r.jsonl;
  }
  return total;
}

}  // namespace bip::genius
