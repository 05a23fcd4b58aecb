#include "bip/solver.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <unordered_set>

#include "simplex_internal.hpp"

namespace bip {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPropTol = 1e-9;
constexpr double kObjTol = 1e-9;
constexpr double kTargetTol = 1e-6;

// Shared node state for both tree searches: 0/1 bounds with a trail for
// undo, row activity ranges for propagation, and a surrogate upper bound
// (maximize form) built from clamped root-LP duals:
//   sum_r w_r * cap_r + sum_{free j} max(0, rc_j) + sum_{fixed j} rc_j x_j
// which is valid for any sign-correct w, so pruning with it is exact.
class Search {
 public:
  explicit Search(const LinearModel& model)
      : model_(model),
        engine_(model),
        n_(model.num_vars()),
        m_(model.num_constraints()) {
    for (int j = 0; j < n_; ++j) {
      if (model.var_domain(VarId{j}) != VarDomain::kBinary)
        throw ModelError("solver requires an all-binary model");
    }
    lo_.assign(n_, 0.0);
    hi_.assign(n_, 1.0);
    cols_.resize(n_);
    for (int r = 0; r < m_; ++r) {
      for (const auto& t : engine_.rows()[r])
        cols_[t.var.value].push_back({r, t.coeff});
    }
    duals_.assign(m_, 0.0);
    rc_ = engine_.costs();
    row_min_.assign(m_, 0.0);
    row_max_.assign(m_, 0.0);
    cap_term_.assign(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      for (const auto& t : engine_.rows()[r]) {
        row_min_[r] += std::min(0.0, t.coeff);
        row_max_[r] += std::max(0.0, t.coeff);
      }
    }
    rebuild_surrogate();
    // Set-packing rows (sum of distinct binaries <= 1 or == 1) get
    // specialized branching in enumeration mode.
    for (int r = 0; r < m_; ++r) {
      if (engine_.rhs()[r] != 1.0) continue;
      if (engine_.relations()[r] == Relation::kGreaterEqual) continue;
      bool all_unit = !engine_.rows()[r].empty();
      for (const auto& t : engine_.rows()[r])
        if (t.coeff != 1.0) { all_unit = false; break; }
      if (all_unit) packing_rows_.push_back(r);
    }
  }

  const LinearModel& model() const { return model_; }
  const detail::BoundedSimplex& engine() const { return engine_; }
  int num_vars() const { return n_; }
  bool fixed(int j) const { return lo_[j] == hi_[j]; }
  double fixed_value(int j) const { return lo_[j]; }
  bool all_fixed() const { return num_fixed_ == n_; }

  // Converts a model-convention objective value to the maximize form.
  double to_internal(double model_obj) const {
    double v = model_obj - engine_.objective_constant();
    return engine_.maximize_form_flipped() ? -v : v;
  }

  double surrogate_bound() const {
    return cap_sum_ + free_pos_sum_ + fixed_rc_sum_;
  }

  detail::LpSolution solve_lp() const { return engine_.solve(lo_, hi_); }

  // Warm-started node relaxation; bound changes made through fix/undo are
  // already synced into the incremental engine.
  detail::LpSolution solve_lp_incremental() {
    if (inc_lp_ == nullptr) {
      inc_lp_ = std::make_unique<detail::IncrementalLp>(engine_);
      for (int j = 0; j < n_; ++j)
        if (fixed(j)) inc_lp_->set_bound(j, lo_[j], hi_[j]);
    }
    return inc_lp_->reoptimize();
  }

  void adopt_duals(const std::vector<double>& raw) {
    for (int r = 0; r < m_; ++r) {
      double w = raw[r];
      switch (engine_.relations()[r]) {
        case Relation::kLessEqual:    duals_[r] = std::max(0.0, w); break;
        case Relation::kGreaterEqual: duals_[r] = std::min(0.0, w); break;
        case Relation::kEqual:        duals_[r] = w; break;
      }
    }
    rc_ = engine_.costs();
    for (int j = 0; j < n_; ++j) {
      for (const auto& [r, a] : cols_[j]) rc_[j] -= duals_[r] * a;
    }
    rebuild_surrogate();
  }

  size_t trail_mark() const { return trail_.size(); }

  void undo_to(size_t mark) {
    while (trail_.size() > mark) {
      int j = trail_.back();
      trail_.pop_back();
      double v = lo_[j];
      lo_[j] = 0.0;
      hi_[j] = 1.0;
      if (inc_lp_ != nullptr) inc_lp_->set_bound(j, 0.0, 1.0);
      --num_fixed_;
      free_pos_sum_ += std::max(0.0, rc_[j]);
      fixed_rc_sum_ -= rc_[j] * v;
      for (const auto& [r, a] : cols_[j]) {
        row_min_[r] += std::min(0.0, a) - a * v;
        row_max_[r] += std::max(0.0, a) - a * v;
        refresh_cap(r);
      }
    }
  }

  // Fixes a variable and propagates the implications. Returns false when a
  // row becomes unsatisfiable; the trail still records everything fixed, so
  // the caller unwinds with undo_to().
  bool fix_and_propagate(int j, double v) {
    dirty_rows_.clear();
    if (!apply_fix(j, v)) return false;
    return drain_queue();
  }

  // Propagates from the current state without new fixings (root call).
  bool propagate_root() {
    dirty_rows_.clear();
    for (int r = 0; r < m_; ++r) dirty_rows_.push_back(r);
    return drain_queue();
  }

  // Fixes every variable in `vars` to zero, then propagates.
  bool fix_all_zero_and_propagate(const std::vector<int>& vars) {
    dirty_rows_.clear();
    for (int j : vars) {
      if (fixed(j)) {
        if (fixed_value(j) != 0.0) return false;
        continue;
      }
      if (!apply_fix(j, 0.0)) return false;
    }
    return drain_queue();
  }

  Assignment current_assignment() const {
    Assignment a(n_);
    for (int j = 0; j < n_; ++j) a.set(VarId{j}, lo_[j]);
    return a;
  }

  const std::vector<int>& packing_rows() const { return packing_rows_; }
  const std::vector<LinearExpr::Term>& row_terms(int r) const {
    return engine_.rows()[r];
  }

 private:
  void refresh_cap(int r) {
    double w = duals_[r];
    double term = 0.0;
    if (w != 0.0) {
      switch (engine_.relations()[r]) {
        case Relation::kLessEqual:
          term = w * std::min(engine_.rhs()[r], row_max_[r]);
          break;
        case Relation::kGreaterEqual:
          term = w * std::max(engine_.rhs()[r], row_min_[r]);
          break;
        case Relation::kEqual:
          term = w * engine_.rhs()[r];
          break;
      }
    }
    cap_sum_ += term - cap_term_[r];
    cap_term_[r] = term;
  }

  void rebuild_surrogate() {
    cap_sum_ = 0.0;
    for (int r = 0; r < m_; ++r) {
      cap_term_[r] = 0.0;
      refresh_cap(r);
    }
    free_pos_sum_ = 0.0;
    fixed_rc_sum_ = 0.0;
    for (int j = 0; j < n_; ++j) {
      if (fixed(j)) fixed_rc_sum_ += rc_[j] * lo_[j];
      else free_pos_sum_ += std::max(0.0, rc_[j]);
    }
  }

  bool apply_fix(int j, double v) {
    lo_[j] = hi_[j] = v;
    ++num_fixed_;
    trail_.push_back(j);
    if (inc_lp_ != nullptr) inc_lp_->set_bound(j, v, v);
    free_pos_sum_ -= std::max(0.0, rc_[j]);
    fixed_rc_sum_ += rc_[j] * v;
    for (const auto& [r, a] : cols_[j]) {
      row_min_[r] += a * v - std::min(0.0, a);
      row_max_[r] += a * v - std::max(0.0, a);
      refresh_cap(r);
      dirty_rows_.push_back(r);
    }
    return row_ranges_ok(j);
  }

  bool row_ranges_ok(int j) const {
    for (const auto& [r, a] : cols_[j]) {
      (void)a;
      if (!row_ok(r)) return false;
    }
    return true;
  }

  bool row_ok(int r) const {
    double rhs = engine_.rhs()[r];
    switch (engine_.relations()[r]) {
      case Relation::kLessEqual:
        return row_min_[r] <= rhs + kPropTol;
      case Relation::kGreaterEqual:
        return row_max_[r] >= rhs - kPropTol;
      case Relation::kEqual:
        return row_min_[r] <= rhs + kPropTol && row_max_[r] >= rhs - kPropTol;
    }
    return true;
  }

  bool drain_queue() {
    while (!dirty_rows_.empty()) {
      int r = dirty_rows_.back();
      dirty_rows_.pop_back();
      if (!row_ok(r)) return false;
      double rhs = engine_.rhs()[r];
      Relation rel = engine_.relations()[r];
      for (const auto& t : engine_.rows()[r]) {
        int j = t.var.value;
        if (fixed(j)) continue;
        double a = t.coeff;
        bool need_le = rel != Relation::kGreaterEqual;
        bool need_ge = rel != Relation::kLessEqual;
        if (need_le) {
          double min_others = row_min_[r] - std::min(0.0, a);
          if (a > 0 && min_others + a > rhs + kPropTol) {
            if (!apply_fix(j, 0.0)) return false;
            continue;
          }
          if (a < 0 && min_others > rhs + kPropTol) {
            if (!apply_fix(j, 1.0)) return false;
            continue;
          }
        }
        if (need_ge) {
          double max_others = row_max_[r] - std::max(0.0, a);
          if (a > 0 && max_others + a < rhs - kPropTol) {
            if (!apply_fix(j, 1.0)) return false;
            continue;
          }
          if (a < 0 && max_others < rhs - kPropTol) {
            if (!apply_fix(j, 0.0)) return false;
          }
        }
      }
    }
    return true;
  }

  const LinearModel& model_;
  detail::BoundedSimplex engine_;
  int n_, m_;
  std::vector<double> lo_, hi_;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<int> trail_;
  int num_fixed_ = 0;
  std::vector<int> dirty_rows_;

  std::vector<double> duals_, rc_;
  std::vector<double> row_min_, row_max_, cap_term_;
  double cap_sum_ = 0.0, free_pos_sum_ = 0.0, fixed_rc_sum_ = 0.0;
  std::vector<int> packing_rows_;
  std::unique_ptr<detail::IncrementalLp> inc_lp_;
};

struct Limits {
  long node_limit = -1;
  bool has_deadline = false;
  Clock::time_point deadline;
  long nodes = 0;
  bool hit_nodes = false;
  bool hit_time = false;

  bool charge_node() {
    ++nodes;
    if (node_limit >= 0 && nodes > node_limit) {
      hit_nodes = true;
      return false;
    }
    if (has_deadline && (nodes & 63) == 0 && Clock::now() >= deadline) {
      hit_time = true;
      return false;
    }
    return true;
  }
};

class BnbDriver {
 public:
  BnbDriver(Search& search, const SolveOptions& options)
      : s_(search), opt_(options) {
    integral_objective_ = true;
    for (double c : s_.engine().costs()) {
      if (c != std::floor(c)) { integral_objective_ = false; break; }
    }
    limits_.node_limit = options.node_limit;
    if (options.time_limit >= 0) {
      limits_.has_deadline = true;
      limits_.deadline =
          Clock::now() + std::chrono::duration_cast<Clock::duration>(
                             std::chrono::duration<double>(options.time_limit));
    }
  }

  SolveReport run() {
    auto t0 = Clock::now();
    SolveReport report;
    if (opt_.warm_start != nullptr) try_incumbent(*opt_.warm_start);
    if (s_.propagate_root()) {
      bool root_lp_ok = false;
      detail::LpSolution root;
      try {
        root = s_.solve_lp_incremental();
        root_lp_ok = true;
      } catch (const NumericError&) {
      }
      if (root_lp_ok && root.status == LpStatus::kOptimal) {
        s_.adopt_duals(root.duals);
        node(&root);
      } else if (!root_lp_ok || root.status == LpStatus::kUnbounded) {
        node(nullptr);
      }
      // root infeasible: nothing to search
    }
    report.nodes = limits_.nodes;
    report.wall_time =
        std::chrono::duration<double>(Clock::now() - t0).count();
    if (best_.has_value()) {
      report.best = best_;
      report.objective = best_model_obj_;
      report.status = limits_.hit_time   ? SolveStatus::kTimeLimit
                      : limits_.hit_nodes ? SolveStatus::kNodeLimit
                                          : SolveStatus::kOptimal;
    } else {
      report.status = limits_.hit_time   ? SolveStatus::kTimeLimit
                      : limits_.hit_nodes ? SolveStatus::kNodeLimit
                                          : SolveStatus::kInfeasible;
    }
    return report;
  }

 private:
  bool try_incumbent(const Assignment& a) {
    if (a.size() < s_.num_vars()) return false;
    for (int j = 0; j < s_.num_vars(); ++j)
      if (!a.has(VarId{j})) return false;
    Evaluation ev = s_.model().evaluate(a);
    if (!ev.feasible) return false;
    double internal = s_.to_internal(ev.objective);
    if (!best_.has_value() || internal > best_internal_) {
      best_ = a;
      best_internal_ = internal;
      best_model_obj_ = ev.objective;
    }
    return true;
  }

  // `parent_lp` is only used at the root to avoid re-solving it.
  void node(const detail::LpSolution* parent_lp) {
    if (!limits_.charge_node()) return;
    if (best_.has_value() && s_.surrogate_bound() <= best_internal_ + kObjTol)
      return;
    if (s_.all_fixed()) {
      try_incumbent(s_.current_assignment());
      return;
    }

    detail::LpSolution local;
    const detail::LpSolution* lp = parent_lp;
    if (lp == nullptr) {
      bool ok = true;
      try {
        local = s_.solve_lp_incremental();
      } catch (const NumericError&) {
        ok = false;
      }
      if (ok) {
        if (local.status == LpStatus::kInfeasible) return;
        lp = &local;
      }
    }

    int branch_var = -1;
    if (lp != nullptr && lp->status == LpStatus::kOptimal) {
      double bound = lp->objective;
      if (integral_objective_) bound = std::floor(bound + 1e-9);
      if (best_.has_value() && bound <= best_internal_ + kObjTol) return;
      double best_frac = opt_.tol_int;
      for (int j = 0; j < s_.num_vars(); ++j) {
        if (s_.fixed(j)) continue;
        double f = std::min(lp->x[j], 1.0 - lp->x[j]);
        if (f > best_frac) {
          best_frac = f;
          branch_var = j;
        }
      }
      if (branch_var < 0) {
        // LP optimum is integral: it solves this subtree exactly.
        Assignment a(s_.num_vars());
        for (int j = 0; j < s_.num_vars(); ++j)
          a.set(VarId{j}, s_.fixed(j) ? s_.fixed_value(j)
                                      : std::round(lp->x[j]));
        if (try_incumbent(a)) return;
      }
    }
    if (branch_var < 0) {
      for (int j = 0; j < s_.num_vars(); ++j) {
        if (!s_.fixed(j)) { branch_var = j; break; }
      }
      if (branch_var < 0) {
        try_incumbent(s_.current_assignment());
        return;
      }
    }

    for (double v : {1.0, 0.0}) {
      size_t mark = s_.trail_mark();
      if (s_.fix_and_propagate(branch_var, v)) node(nullptr);
      s_.undo_to(mark);
      if (limits_.hit_nodes || limits_.hit_time) return;
    }
  }

  Search& s_;
  SolveOptions opt_;
  Limits limits_;
  bool integral_objective_ = false;
  std::optional<Assignment> best_;
  double best_internal_ = -kInf;
  double best_model_obj_ = 0.0;
};

class EnumDriver {
 public:
  EnumDriver(Search& search, std::span<const VarId> projection,
             std::optional<double> target, const EnumerateOptions& options)
      : s_(search), opt_(options) {
    for (VarId v : projection) {
      if (!v.valid() || v.value >= s_.num_vars())
        throw ModelError("projection references an unknown variable");
      proj_.push_back(v.value);
    }
    if (target.has_value()) target_internal_ = s_.to_internal(*target);
  }

  EnumerationReport run() {
    EnumerationReport report;
    if (opt_.cap == 0) return report;
    if (s_.propagate_root()) {
      if (target_internal_.has_value()) {
        // Root LP duals power the surrogate bound used for pruning.
        try {
          detail::LpSolution root = s_.solve_lp();
          if (root.status == LpStatus::kInfeasible) {
            report.exhausted = true;
            return report;
          }
          if (root.status == LpStatus::kOptimal) s_.adopt_duals(root.duals);
        } catch (const NumericError&) {
        }
      }
      dfs();
    }
    report.count = count_;
    report.solutions = std::move(stored_);
    report.exhausted = !stopped_;
    return report;
  }

 private:
  // Returns false to abort the whole search (cap reached).
  bool dfs() {
    if (target_internal_.has_value() &&
        s_.surrogate_bound() < *target_internal_ - kTargetTol)
      return true;
    if (s_.all_fixed()) {
      accept_leaf();
      return !stopped_;
    }

    int row = pick_packing_row();
    if (row >= 0) {
      std::vector<int> free_vars;
      for (const auto& t : s_.row_terms(row))
        if (!s_.fixed(t.var.value)) free_vars.push_back(t.var.value);
      std::sort(free_vars.begin(), free_vars.end());
      for (int j : free_vars) {
        size_t mark = s_.trail_mark();
        bool ok = s_.fix_and_propagate(j, 1.0);
        if (ok && !dfs()) { s_.undo_to(mark); return false; }
        s_.undo_to(mark);
      }
      size_t mark = s_.trail_mark();
      bool ok = s_.fix_all_zero_and_propagate(free_vars);
      if (ok && !dfs()) { s_.undo_to(mark); return false; }
      s_.undo_to(mark);
      return true;
    }

    int j = -1;
    for (int k = 0; k < s_.num_vars(); ++k) {
      if (!s_.fixed(k)) { j = k; break; }
    }
    for (double v : {1.0, 0.0}) {
      size_t mark = s_.trail_mark();
      bool ok = s_.fix_and_propagate(j, v);
      if (ok && !dfs()) { s_.undo_to(mark); return false; }
      s_.undo_to(mark);
    }
    return true;
  }

  int pick_packing_row() const {
    int best = -1, best_free = 0;
    for (int r : s_.packing_rows()) {
      int free_count = 0;
      bool satisfied = false;
      for (const auto& t : s_.row_terms(r)) {
        int j = t.var.value;
        if (s_.fixed(j)) {
          if (s_.fixed_value(j) == 1.0) { satisfied = true; break; }
        } else {
          ++free_count;
        }
      }
      if (satisfied || free_count == 0) continue;
      if (best < 0 || free_count < best_free) {
        best = r;
        best_free = free_count;
      }
    }
    return best;
  }

  void accept_leaf() {
    Assignment a = s_.current_assignment();
    Evaluation ev = s_.model().evaluate(a);
    if (!ev.feasible) return;
    if (target_internal_.has_value()) {
      double internal = s_.to_internal(ev.objective);
      if (std::abs(internal - *target_internal_) > kTargetTol) return;
    }
    std::string pattern(proj_.size(), '\0');
    for (size_t i = 0; i < proj_.size(); ++i)
      pattern[i] = a.get(VarId{proj_[i]}) > 0.5 ? '\1' : '\0';
    // The no-good exclusion over the projection: previously accepted
    // patterns are never counted again.
    if (!seen_.insert(pattern).second) return;
    ++count_;
    if (count_ <= opt_.store_limit) stored_.push_back(std::move(a));
    if (opt_.cap >= 0 && count_ >= opt_.cap) stopped_ = true;
  }

  Search& s_;
  EnumerateOptions opt_;
  std::vector<int> proj_;
  std::optional<double> target_internal_;
  std::unordered_set<std::string> seen_;
  std::vector<Assignment> stored_;
  long count_ = 0;
  bool stopped_ = false;
};

}  // namespace

SolveReport branch_and_bound(const LinearModel& model,
                             const SolveOptions& options) {
  Search search(model);
  BnbDriver driver(search, options);
  return driver.run();
}

EnumerationReport enumerate_solutions(const LinearModel& model,
                                      std::span<const VarId> projection,
                                      std::optional<double> target_objective,
                                      const EnumerateOptions& options) {
  Search search(model);
  EnumDriver driver(search, projection, target_objective, options);
  return driver.run();
}

}  // namespace bip
