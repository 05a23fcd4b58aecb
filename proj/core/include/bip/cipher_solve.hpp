#pragma once

#include <cstdint>

#include "bip/cipher.hpp"
#include "bip/cipher_model.hpp"
#include "bip/solver.hpp"

namespace bip::cipher {

// Swap-neighborhood descent on the instance objective from a
// frequency-matched start, with seeded random restarts. Deterministic for a
// fixed seed; the objective never increases along accepted moves.
struct HillClimbResult {
  MascKey key;
  double objective = 0.0;
};
HillClimbResult hill_climb(const DeciphermentInstance& instance, int restarts,
                           std::uint64_t seed);

struct BreakOptions {
  SolveOptions solver;
  int hill_restarts = 12;     // warm-start incumbents
  std::uint64_t seed = 1;
};

struct BreakResult {
  MascKey key;             // plaintext -> ciphertext
  NormalizedText plaintext;
  SolveReport report;      // objective is the model objective of `key`
};

// Exact decipherment search branching directly on key assignments in
// ciphertext frequency order, bounded below by an assignment relaxation
// (Hungarian method) of the remaining cost. Proves optimality unless a
// node or time limit intervenes, in which case the best incumbent is
// returned with the corresponding status.
BreakResult break_masc(const DeciphermentInstance& instance,
                       const BreakOptions& options = {});

// One benchmark row of the model comparison protocol: prefixes of the
// given master texts are re-encrypted with seeded random keys and solved
// with both models.
struct BenchRow {
  MascModelKind kind;
  int length = 0;
  int text_index = 0;
  double seconds = 0.0;
  double pct_chars = 0.0;
  double objective = 0.0;
  SolveStatus status = SolveStatus::kOptimal;
};

std::vector<BenchRow> run_model_bench(const NGramTable& corpus,
                                      const std::vector<NormalizedText>& texts,
                                      const std::vector<int>& lengths,
                                      int texts_per_length,
                                      const BreakOptions& options);

}  // namespace bip::cipher
