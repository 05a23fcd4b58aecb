#pragma once

#include "bip/cipher.hpp"
#include "bip/model.hpp"

namespace bip::cipher {

// The decipherment network IP. Variables: key(p,q) for the substitution
// bijection and link(i,p,r) for consecutive plaintext letters at positions
// i, i+1. Constraints: key rows/columns sum to 1, layer-to-layer flow
// conservation, link-to-key consistency for every position, and the
// first-position anchor that binds c_1 to the key.
struct MascModel {
  LinearModel model;
  int m = 0;
  int n = 0;

  VarId key_var(int p, int q) const { return VarId{p * m + q}; }
  // i indexes the link layer, 0-based, i in [0, n-1).
  VarId link_var(int i, int p, int r) const {
    return VarId{m * m + (i * m + p) * m + r};
  }
};

MascModel build_masc_model(const DeciphermentInstance& instance);

// The objective value the model assigns to a key: the direct RK or UR
// score of that key's decipherment.
double key_objective(const DeciphermentInstance& instance, const MascKey& key);

// The unique feasible assignment with the given key: key indicators plus
// link indicators of the decipherment's consecutive letter pairs.
Assignment induced_assignment(const MascModel& model,
                              const DeciphermentInstance& instance,
                              const MascKey& key);

// Shift-cipher break as an IP over 26 key indicator variables, one per
// shift, weighted by the UR-style distance between the shifted text's
// statistics and the corpus; exactly one indicator is chosen, minimized.
LinearModel build_shift_model(const NormalizedText& ciphertext,
                              const NGramTable& corpus);

// Objective coefficient of shift k in the model above.
double shift_cost(const NormalizedText& ciphertext, const NGramTable& corpus,
                  int k);

// Lowest-cost shift; ties resolved toward the smaller k.
int break_shift(const NormalizedText& ciphertext, const NGramTable& corpus);

}  // namespace bip::cipher
