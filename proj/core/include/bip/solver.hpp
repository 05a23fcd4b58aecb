#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bip/model.hpp"
#include "bip/simplex.hpp"

namespace bip {

enum class SolveStatus { kOptimal, kInfeasible, kNodeLimit, kTimeLimit };

struct SolveOptions {
  long node_limit = -1;     // < 0 means unlimited
  double time_limit = -1.0; // seconds, < 0 means unlimited
  double tol_int = 1e-6;    // integrality tolerance on relaxed values
  // Optional integer-feasible starting point; ignored if it does not
  // evaluate feasible.
  const Assignment* warm_start = nullptr;
};

struct SolveReport {
  SolveStatus status = SolveStatus::kInfeasible;
  std::optional<Assignment> best;
  double objective = 0.0;
  long nodes = 0;
  double wall_time = 0.0;  // seconds
};

// Exact 0-1 optimization by depth-first branch and bound. Nodes are bounded
// by the LP relaxation (plus a cheaper bound derived from the root LP
// duals); branching picks the most fractional variable, ties by lowest
// VarId, and explores the 1-branch first.
SolveReport branch_and_bound(const LinearModel& model,
                             const SolveOptions& options = {});

struct EnumerateOptions {
  long cap = -1;          // stop after this many solutions; < 0 unlimited
  long store_limit = 0;   // how many assignments to keep in the report
  double tol_int = 1e-6;
};

struct EnumerationReport {
  long count = 0;
  std::vector<Assignment> solutions;  // first store_limit, in search order
  bool exhausted = false;
};

// Counts every integer-feasible assignment, restricted to distinct values
// of the projection variables, whose objective equals target_objective
// (within 1e-6); with no target all feasible assignments are counted. Each
// accepted solution is excluded by its no-good pattern over the projection
// before the search resumes.
EnumerationReport enumerate_solutions(
    const LinearModel& model, std::span<const VarId> projection,
    std::optional<double> target_objective = std::nullopt,
    const EnumerateOptions& options = {});

}  // namespace bip
