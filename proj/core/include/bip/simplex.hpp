#pragma once

#include <stdexcept>

#include "bip/model.hpp"

namespace bip {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Assignment values;  // continuous, complete when status == kOptimal
  double objective = 0.0;
  int iterations = 0;
};

// Signals a tolerance failure inside the LP engine (cycling guard tripped,
// or the final basis failed the feasibility re-check).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bounded-variable two-phase primal simplex over the [0,1] box.
// Every variable must be continuous; relax a 0-1 model first.
LpResult simplex(const LinearModel& lp);

}  // namespace bip
