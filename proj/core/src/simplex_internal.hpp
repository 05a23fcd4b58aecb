#pragma once

// Shared between the public simplex() wrapper and the branch-and-bound
// search, which re-solves the same rows under tightened variable bounds and
// consumes the dual values of the maximize form.

#include <span>
#include <vector>

#include "bip/model.hpp"
#include "bip/simplex.hpp"

namespace bip::detail {

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;      // structural values, size n
  double objective = 0.0;     // in the internal maximize convention
  std::vector<double> duals;  // per row, maximize convention
  int iterations = 0;
};

// Dense bounded-variable simplex on the rows of one model. The row data is
// converted once; solve() may then be called many times with different
// variable bounds. Minimize models are negated on the way in, so the
// internal convention is always maximize.
class BoundedSimplex {
 public:
  explicit BoundedSimplex(const LinearModel& model);

  int num_vars() const { return n_; }
  int num_rows() const { return m_; }
  bool maximize_form_flipped() const { return flipped_; }
  double objective_constant() const { return obj_const_; }

  // Structural objective coefficients in the maximize convention.
  const std::vector<double>& costs() const { return costs_; }
  const std::vector<std::vector<LinearExpr::Term>>& rows() const {
    return rows_;
  }
  const std::vector<double>& rhs() const { return rhs_; }
  const std::vector<Relation>& relations() const { return rels_; }

  LpSolution solve(std::span<const double> lo,
                   std::span<const double> hi) const;

 private:
  int n_ = 0;
  int m_ = 0;
  bool flipped_ = false;  // true when the model minimizes
  double obj_const_ = 0.0;
  std::vector<double> costs_;
  std::vector<std::vector<LinearExpr::Term>> rows_;
  std::vector<double> rhs_;
  std::vector<Relation> rels_;
};

// Re-optimizes the same rows across a sequence of bound changes, the way a
// branch-and-bound tree visits them: the factorized tableau persists, bound
// moves are repaired with dual simplex pivots and finished with primal
// pivots. Any numeric trouble falls back to a from-scratch solve.
class IncrementalLp {
 public:
  explicit IncrementalLp(const BoundedSimplex& engine);
  ~IncrementalLp();

  void set_bound(int var, double lo, double hi);
  // Optimum under the current bounds; status is kOptimal or kInfeasible.
  const LpSolution& reoptimize();

 private:
  struct State;
  const BoundedSimplex& engine_;
  std::unique_ptr<State> state_;
  LpSolution out_;
};

}  // namespace bip::detail
