#include "bip/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "simplex_internal.hpp"

namespace bip {
namespace detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-7;
constexpr double kBoundTol = 1e-9;

// Working state of one solve. Columns are laid out as
// [0, n) structural | [n, n+m) slacks | [n+m, n+2m) artificials.
struct Work {
  int m = 0, n = 0, cols = 0;
  std::vector<double> tab;  // row-major m x cols
  std::vector<double> cost;
  std::vector<double> zrow;
  std::vector<double> lo, hi, val;
  std::vector<double> xb;      // value of the basic variable of each row
  std::vector<int> basic;      // column basic in each row
  std::vector<int> row_of;     // column -> row, or -1 when nonbasic
  std::vector<bool> at_upper;  // meaningful for nonbasic columns

  double& at(int i, int j) { return tab[static_cast<size_t>(i) * cols + j]; }
  const double& at(int i, int j) const {
    return tab[static_cast<size_t>(i) * cols + j];
  }

  void refresh_zrow() {
    std::copy(cost.begin(), cost.end(), zrow.begin());
    for (int i = 0; i < m; ++i) {
      double cb = cost[basic[i]];
      if (cb == 0.0) continue;
      const double* row = &tab[static_cast<size_t>(i) * cols];
      for (int j = 0; j < cols; ++j) zrow[j] -= cb * row[j];
    }
  }

  void pivot(int row, int col) {
    double* prow = &tab[static_cast<size_t>(row) * cols];
    double inv = 1.0 / prow[col];
    for (int j = 0; j < cols; ++j) prow[j] *= inv;
    prow[col] = 1.0;
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      double factor = at(i, col);
      if (factor == 0.0) continue;
      double* r = &tab[static_cast<size_t>(i) * cols];
      for (int j = 0; j < cols; ++j) r[j] -= factor * prow[j];
      r[col] = 0.0;
    }
    double factor = zrow[col];
    if (factor != 0.0) {
      for (int j = 0; j < cols; ++j) zrow[j] -= factor * prow[j];
      zrow[col] = 0.0;
    }
  }
};

// Runs one primal phase; returns false if an improving unbounded ray was
// found.
bool run_phase(Work& w, long& iters, long iter_cap) {
  w.refresh_zrow();
  int degenerate_streak = 0;
  bool bland = false;
  int since_refresh = 0;

  for (;; ++iters) {
    if (iters > iter_cap)
      throw NumericError("simplex iteration cap exceeded (numeric breakdown)");
    if (++since_refresh >= 128) {
      w.refresh_zrow();
      since_refresh = 0;
    }

    // Entering column.
    int q = -1;
    double best_score = kCostTol;
    for (int j = 0; j < w.cols; ++j) {
      if (w.row_of[j] >= 0) continue;
      if (w.hi[j] - w.lo[j] <= 0.0) continue;  // pinned
      double z = w.zrow[j];
      double score = 0.0;
      if (!w.at_upper[j] && z > kCostTol) score = z;
      else if (w.at_upper[j] && z < -kCostTol) score = -z;
      else continue;
      if (bland) { q = j; break; }
      if (score > best_score) { best_score = score; q = j; }
    }
    if (q < 0) return true;  // phase optimal

    const int dir = w.at_upper[q] ? -1 : +1;

    // Ratio test: how far can the entering column move?
    double delta = w.hi[q] - w.lo[q];  // bound flip distance (may be inf)
    int block = -1;
    double block_alpha = 0.0;
    for (int i = 0; i < w.m; ++i) {
      double alpha = w.at(i, q);
      if (std::abs(alpha) < kPivotTol) continue;
      double rate = -dir * alpha;  // d(xb[i]) / d(delta)
      int k = w.basic[i];
      double cand;
      if (rate > 0) {
        if (w.hi[k] == kInf) continue;
        cand = (w.hi[k] - w.xb[i]) / rate;
      } else {
        if (w.lo[k] == -kInf) continue;
        cand = (w.xb[i] - w.lo[k]) / (-rate);
      }
      if (cand < 0) cand = 0;
      bool take = false;
      if (cand < delta - 1e-12) {
        take = true;
      } else if (cand < delta + 1e-12 && block >= 0) {
        // Tie: prefer the larger pivot element, then the lower basic index.
        if (std::abs(alpha) > std::abs(block_alpha) + 1e-12) take = true;
        else if (bland && k < w.basic[block]) take = true;
      } else if (cand <= delta + 1e-12 && block < 0) {
        take = true;
      }
      if (take) {
        delta = std::min(delta, cand);
        block = i;
        block_alpha = alpha;
      }
    }

    if (delta == kInf) return false;  // unbounded improving ray

    degenerate_streak = (delta <= 1e-11) ? degenerate_streak + 1 : 0;
    bland = degenerate_streak > 60;

    if (block < 0) {
      // Bound flip: q crosses its box without any basic variable blocking.
      for (int i = 0; i < w.m; ++i) {
        double alpha = w.at(i, q);
        if (alpha != 0.0) w.xb[i] -= dir * alpha * delta;
      }
      w.val[q] = w.at_upper[q] ? w.lo[q] : w.hi[q];
      w.at_upper[q] = !w.at_upper[q];
      continue;
    }

    // Pivot: q enters on row `block`, the old basic leaves at a bound.
    int leave = w.basic[block];
    double rate = -dir * block_alpha;
    bool leaves_at_upper = rate > 0;

    for (int i = 0; i < w.m; ++i) {
      if (i == block) continue;
      double alpha = w.at(i, q);
      if (alpha != 0.0) w.xb[i] -= dir * alpha * delta;
    }
    double enter_val = w.val[q] + dir * delta;

    w.pivot(block, q);

    w.row_of[leave] = -1;
    w.at_upper[leave] = leaves_at_upper;
    w.val[leave] = leaves_at_upper ? w.hi[leave] : w.lo[leave];
    w.basic[block] = q;
    w.row_of[q] = block;
    w.xb[block] = enter_val;
  }
}

// Fills the tableau and the initial slack/artificial basis for the given
// bounds. Returns true when phase 1 is needed.
bool build_tableau(const BoundedSimplex& lp, std::span<const double> lo,
                   std::span<const double> hi, Work& w) {
  const int n = lp.num_vars();
  const int m = lp.num_rows();
  w.m = m;
  w.n = n;
  w.cols = n + 2 * m;
  w.tab.assign(static_cast<size_t>(m) * w.cols, 0.0);
  w.cost.assign(w.cols, 0.0);
  w.zrow.assign(w.cols, 0.0);
  w.lo.assign(w.cols, 0.0);
  w.hi.assign(w.cols, 0.0);
  w.val.assign(w.cols, 0.0);
  w.xb.assign(m, 0.0);
  w.basic.assign(m, -1);
  w.row_of.assign(w.cols, -1);
  w.at_upper.assign(w.cols, false);

  for (int j = 0; j < n; ++j) {
    w.lo[j] = lo[j];
    w.hi[j] = hi[j];
    w.val[j] = lo[j];
  }
  for (int i = 0; i < m; ++i) {
    int s = n + i;
    switch (lp.relations()[i]) {
      case Relation::kLessEqual:    w.lo[s] = 0.0;   w.hi[s] = kInf; break;
      case Relation::kGreaterEqual: w.lo[s] = -kInf; w.hi[s] = 0.0;  break;
      case Relation::kEqual:        w.lo[s] = 0.0;   w.hi[s] = 0.0;  break;
    }
    for (const auto& t : lp.rows()[i]) w.at(i, t.var.value) = t.coeff;
    w.at(i, s) = 1.0;
    w.at(i, n + m + i) = 1.0;  // artificial, activated below if needed
  }

  // Initial basis: slack where the start point fits its bounds, otherwise
  // an artificial carrying the residual. Phase 1 drives residuals to zero.
  bool need_phase1 = false;
  for (int i = 0; i < m; ++i) {
    double v = lp.rhs()[i];
    for (const auto& t : lp.rows()[i]) v -= t.coeff * w.val[t.var.value];
    int s = n + i;
    int a = n + m + i;
    if (v >= w.lo[s] - 1e-12 && v <= w.hi[s] + 1e-12) {
      w.basic[i] = s;
      w.row_of[s] = i;
      w.xb[i] = std::clamp(v, w.lo[s], w.hi[s]);
      w.lo[a] = w.hi[a] = 0.0;
    } else {
      double sval = std::clamp(v, w.lo[s], w.hi[s]);
      double resid = v - sval;
      w.val[s] = sval;
      w.at_upper[s] = sval == w.hi[s];
      if (resid > 0) { w.lo[a] = 0.0; w.hi[a] = resid; }
      else           { w.lo[a] = resid; w.hi[a] = 0.0; }
      w.basic[i] = a;
      w.row_of[a] = i;
      w.xb[i] = resid;
      w.cost[a] = resid > 0 ? -1.0 : 1.0;  // maximize -sum |artificial|
      need_phase1 = true;
    }
  }
  return need_phase1;
}

// Runs phase 1 (when needed) and phase 2 on a freshly built tableau.
// Returns kOptimal, kInfeasible, or kUnbounded.
LpStatus run_two_phase(const BoundedSimplex& lp, Work& w, bool need_phase1,
                       long& iters) {
  const long iter_cap = 2000L + 60L * (w.m + w.n);
  if (need_phase1) {
    if (!run_phase(w, iters, iter_cap))
      throw NumericError("phase-1 reported an unbounded ray");
    double infeas = 0.0;
    for (int i = 0; i < w.m; ++i) {
      if (w.basic[i] >= w.n + w.m) infeas += std::abs(w.xb[i]);
    }
    for (int j = w.n + w.m; j < w.cols; ++j)
      if (w.row_of[j] < 0) infeas += std::abs(w.val[j]);
    if (infeas > kFeasTol) return LpStatus::kInfeasible;
    for (int i = 0; i < w.m; ++i) {
      int a = w.n + w.m + i;
      w.lo[a] = w.hi[a] = 0.0;
      if (w.row_of[a] < 0) { w.val[a] = 0.0; w.at_upper[a] = false; }
    }
  }
  std::fill(w.cost.begin(), w.cost.end(), 0.0);
  std::copy(lp.costs().begin(), lp.costs().end(), w.cost.begin());
  if (!run_phase(w, iters, iter_cap)) return LpStatus::kUnbounded;
  return LpStatus::kOptimal;
}

// Reads the optimum out of the tableau, re-checking the rows exactly.
LpSolution extract(const BoundedSimplex& lp, const Work& w, int iters) {
  LpSolution out;
  out.status = LpStatus::kOptimal;
  out.iterations = iters;
  out.x.assign(w.n, 0.0);
  for (int j = 0; j < w.n; ++j)
    out.x[j] = w.row_of[j] >= 0 ? w.xb[w.row_of[j]] : w.val[j];
  out.objective = 0.0;
  for (int j = 0; j < w.n; ++j) out.objective += lp.costs()[j] * out.x[j];
  out.duals.assign(w.m, 0.0);
  for (int i = 0; i < w.m; ++i) out.duals[i] = -w.zrow[w.n + i];

  for (int j = 0; j < w.n; ++j) {
    if (out.x[j] < w.lo[j] - kFeasTol || out.x[j] > w.hi[j] + kFeasTol)
      throw NumericError("solution violates variable bounds");
    out.x[j] = std::clamp(out.x[j], w.lo[j], w.hi[j]);
  }
  for (int i = 0; i < w.m; ++i) {
    double v = 0.0;
    for (const auto& t : lp.rows()[i]) v += t.coeff * out.x[t.var.value];
    double viol = 0.0;
    switch (lp.relations()[i]) {
      case Relation::kLessEqual:    viol = v - lp.rhs()[i]; break;
      case Relation::kGreaterEqual: viol = lp.rhs()[i] - v; break;
      case Relation::kEqual:        viol = std::abs(v - lp.rhs()[i]); break;
    }
    if (viol > 1e-6)
      throw NumericError("returned basis violates a row beyond tolerance");
  }
  return out;
}

}  // namespace

BoundedSimplex::BoundedSimplex(const LinearModel& model) {
  n_ = model.num_vars();
  m_ = model.num_constraints();
  flipped_ = model.sense() == Sense::kMinimize;
  obj_const_ = model.objective().constant();
  costs_.assign(n_, 0.0);
  for (const auto& t : model.objective().terms())
    costs_[t.var.value] = flipped_ ? -t.coeff : t.coeff;
  rows_.reserve(m_);
  rhs_.reserve(m_);
  rels_.reserve(m_);
  for (const Constraint& c : model.constraints()) {
    rows_.push_back(c.expr.terms());
    rhs_.push_back(c.rhs - c.expr.constant());
    rels_.push_back(c.relation);
  }
}

LpSolution BoundedSimplex::solve(std::span<const double> lo,
                                 std::span<const double> hi) const {
  Work w;
  bool need_phase1 = build_tableau(*this, lo, hi, w);
  long iters = 0;
  LpStatus status = run_two_phase(*this, w, need_phase1, iters);
  if (status != LpStatus::kOptimal) {
    LpSolution out;
    out.status = status;
    out.iterations = static_cast<int>(iters);
    return out;
  }
  return extract(*this, w, static_cast<int>(iters));
}

// ---------------------------------------------------------------------------
// IncrementalLp

struct IncrementalLp::State {
  Work w;
  bool ready = false;
  std::vector<double> lo, hi;  // requested structural bounds
  long reopts = 0;
};

IncrementalLp::IncrementalLp(const BoundedSimplex& engine) : engine_(engine) {
  state_ = std::make_unique<State>();
  state_->lo.assign(engine.num_vars(), 0.0);
  state_->hi.assign(engine.num_vars(), 1.0);
}

IncrementalLp::~IncrementalLp() = default;

void IncrementalLp::set_bound(int var, double lo, double hi) {
  State& s = *state_;
  s.lo[var] = lo;
  s.hi[var] = hi;
  if (!s.ready) return;
  Work& w = s.w;
  w.lo[var] = lo;
  w.hi[var] = hi;
  if (w.row_of[var] >= 0) return;  // basic: repaired during reoptimize
  double target = std::clamp(w.val[var], lo, hi);
  if (target != w.val[var]) {
    double shift = target - w.val[var];
    for (int i = 0; i < w.m; ++i) {
      double alpha = w.at(i, var);
      if (alpha != 0.0) w.xb[i] -= alpha * shift;
    }
    w.val[var] = target;
  }
  w.at_upper[var] = w.val[var] >= hi && hi > lo ? true
                    : w.val[var] <= lo          ? false
                                                : w.at_upper[var];
}

const LpSolution& IncrementalLp::reoptimize() {
  State& s = *state_;
  for (int attempt = 0;; ++attempt) {
    try {
      if (!s.ready) {
        bool need_phase1 = build_tableau(engine_, s.lo, s.hi, s.w);
        long iters = 0;
        LpStatus status = run_two_phase(engine_, s.w, need_phase1, iters);
        s.ready = true;
        if (status != LpStatus::kOptimal) {
          s.ready = false;
          out_ = LpSolution{};
          out_.status = status;
          return out_;
        }
        out_ = extract(engine_, s.w, static_cast<int>(iters));
        return out_;
      }

      Work& w = s.w;
      long iters = 0;
      const long dual_cap = 400L + 4L * w.m;

      // Dual repair: drive out-of-bound basic variables to a bound. The
      // eligibility test is purely primal, so an exhausted row certifies
      // infeasibility under the current bounds.
      for (;;) {
        if (iters > dual_cap) throw NumericError("dual repair stalled");
        int r = -1;
        double worst = kBoundTol;
        bool need_up = false;
        for (int i = 0; i < w.m; ++i) {
          int k = w.basic[i];
          double below = w.lo[k] - w.xb[i];
          double above = w.xb[i] - w.hi[k];
          if (below > worst) { worst = below; r = i; need_up = true; }
          if (above > worst) { worst = above; r = i; need_up = false; }
        }
        if (r < 0) break;
        int leave = w.basic[r];
        double bound = need_up ? w.lo[leave] : w.hi[leave];

        int q = -1, qdir = 0;
        double best_ratio = kInf;
        double qalpha = 0.0;
        for (int j = 0; j < w.cols; ++j) {
          if (w.row_of[j] >= 0) continue;
          if (w.hi[j] - w.lo[j] <= 0.0) continue;
          double alpha = w.at(r, j);
          if (std::abs(alpha) < kPivotTol) continue;
          int dir;
          if (!w.at_upper[j]) {
            // can increase
            dir = +1;
            if ((need_up ? -alpha : alpha) <= 0) continue;
          } else {
            dir = -1;
            if ((need_up ? alpha : -alpha) <= 0) continue;
          }
          double ratio = std::abs(w.zrow[j]) / std::abs(alpha);
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 &&
               (q < 0 || std::abs(alpha) > std::abs(qalpha)))) {
            best_ratio = ratio;
            q = j;
            qdir = dir;
            qalpha = alpha;
          }
        }
        if (q < 0) {
          out_ = LpSolution{};
          out_.status = LpStatus::kInfeasible;
          return out_;
        }

        double needed = (bound - w.xb[r]) / (-qdir * qalpha);
        double range = w.hi[q] - w.lo[q];
        if (needed > range + 1e-12 && range != kInf) {
          // Bound flip: q alone cannot carry the repair.
          for (int i = 0; i < w.m; ++i) {
            double alpha = w.at(i, q);
            if (alpha != 0.0) w.xb[i] -= qdir * alpha * range;
          }
          w.val[q] = w.at_upper[q] ? w.lo[q] : w.hi[q];
          w.at_upper[q] = !w.at_upper[q];
          ++iters;
          continue;
        }

        for (int i = 0; i < w.m; ++i) {
          if (i == r) continue;
          double alpha = w.at(i, q);
          if (alpha != 0.0) w.xb[i] -= qdir * alpha * needed;
        }
        double enter_val = w.val[q] + qdir * needed;
        w.pivot(r, q);
        w.row_of[leave] = -1;
        w.at_upper[leave] = bound == w.hi[leave] && w.hi[leave] > w.lo[leave];
        w.val[leave] = bound;
        w.basic[r] = q;
        w.row_of[q] = r;
        w.xb[r] = enter_val;
        ++iters;
      }

      // Primal cleanup restores optimality after bound relaxations.
      long piters = 0;
      const long iter_cap = 2000L + 60L * (w.m + w.n);
      if (!run_phase(w, piters, iter_cap)) {
        out_ = LpSolution{};
        out_.status = LpStatus::kUnbounded;
        return out_;
      }
      out_ = extract(engine_, w, static_cast<int>(iters + piters));
      ++s.reopts;
      return out_;
    } catch (const NumericError&) {
      if (attempt >= 1) throw;
      s.ready = false;  // rebuild from scratch once
    }
  }
}

}  // namespace detail

LpResult simplex(const LinearModel& lp) {
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (lp.var_domain(VarId{j}) != VarDomain::kContinuous)
      throw ModelError(
          "simplex expects a relaxed model; call LinearModel::relax() first");
  }
  detail::BoundedSimplex engine(lp);
  std::vector<double> lo(lp.num_vars(), 0.0), hi(lp.num_vars(), 1.0);
  detail::LpSolution sol = engine.solve(lo, hi);
  LpResult result;
  result.status = sol.status;
  result.iterations = sol.iterations;
  if (sol.status == LpStatus::kOptimal) {
    result.values = Assignment(lp.num_vars());
    for (int j = 0; j < lp.num_vars(); ++j)
      result.values.set(VarId{j}, sol.x[j]);
    double obj = sol.objective + (engine.maximize_form_flipped()
                                      ? -engine.objective_constant()
                                      : engine.objective_constant());
    result.objective = engine.maximize_form_flipped() ? -obj : obj;
  }
  return result;
}

}  // namespace bip
