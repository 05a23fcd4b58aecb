#include "bip/model.hpp"

#include <algorithm>
#include <cmath>

namespace bip {

LinearExpr& LinearExpr::add(VarId var, double coeff) {
  if (!var.valid()) throw ModelError("term refers to an invalid variable id");
  terms_.push_back({var, coeff});
  normalized_ = false;
  return *this;
}

LinearExpr& LinearExpr::add_constant(double value) {
  constant_ += value;
  return *this;
}

LinearExpr& LinearExpr::operator+=(const LinearExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  normalized_ = terms_.empty();
  return *this;
}

LinearExpr& LinearExpr::operator*=(double scale) {
  for (auto& t : terms_) t.coeff *= scale;
  constant_ *= scale;
  return *this;
}

void LinearExpr::normalize() {
  if (normalized_) return;
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (const Term& t : terms_) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coeff == 0.0; });
  terms_ = std::move(merged);
  normalized_ = true;
}

double LinearExpr::value_under(std::span<const double> values) const {
  double v = constant_;
  for (const Term& t : terms_) v += t.coeff * values[t.var.value];
  return v;
}

LinearExpr operator*(double coeff, VarId var) {
  LinearExpr e;
  e.add(var, coeff);
  return e;
}

LinearExpr operator+(LinearExpr lhs, const LinearExpr& rhs) {
  lhs += rhs;
  return lhs;
}

LinearExpr operator+(LinearExpr lhs, VarId var) {
  lhs.add(var, 1.0);
  return lhs;
}

LinearExpr operator-(LinearExpr lhs, const LinearExpr& rhs) {
  LinearExpr neg = rhs;
  neg *= -1.0;
  lhs += neg;
  return lhs;
}

Assignment::Assignment(int num_vars) { resize(num_vars); }

void Assignment::resize(int num_vars) {
  values_.resize(num_vars, 0.0);
  set_.resize(num_vars, false);
}

void Assignment::set(VarId var, double value) {
  if (!var.valid() || var.value >= size())
    throw ModelError("assignment index out of range");
  values_[var.value] = value;
  set_[var.value] = true;
}

double Assignment::get(VarId var) const {
  if (!has(var)) throw ModelError("assignment value not set");
  return values_[var.value];
}

bool Assignment::has(VarId var) const {
  return var.valid() && var.value < size() && set_[var.value];
}

VarId LinearModel::add_binary(std::string_view name) {
  std::string key(name);
  if (key.empty()) throw ModelError("variable name must not be empty");
  if (name_index_.contains(key))
    throw ModelError("duplicate variable name: " + key);
  VarId id{num_vars()};
  name_index_.emplace(key, id.value);
  names_.push_back(std::move(key));
  domains_.push_back(VarDomain::kBinary);
  return id;
}

const std::string& LinearModel::var_name(VarId var) const {
  if (!var.valid() || var.value >= num_vars())
    throw ModelError("unknown variable id");
  return names_[var.value];
}

VarDomain LinearModel::var_domain(VarId var) const {
  if (!var.valid() || var.value >= num_vars())
    throw ModelError("unknown variable id");
  return domains_[var.value];
}

std::optional<VarId> LinearModel::find_var(std::string_view name) const {
  auto it = name_index_.find(std::string(name));
  if (it == name_index_.end()) return std::nullopt;
  return VarId{it->second};
}

void LinearModel::check_expr_vars(const LinearExpr& expr) const {
  for (const auto& t : expr.terms()) {
    if (!t.var.valid() || t.var.value >= num_vars())
      throw ModelError("expression references an unknown variable");
  }
}

void LinearModel::add_constraint(LinearExpr expr, Relation relation,
                                 double rhs, std::string label) {
  check_expr_vars(expr);
  if (label.empty()) throw ModelError("constraint label must not be empty");
  if (label_index_.contains(label))
    throw ModelError("duplicate constraint label: " + label);
  expr.normalize();
  label_index_.emplace(label, num_constraints());
  constraints_.push_back({std::move(expr), relation, rhs, std::move(label)});
}

void LinearModel::set_objective(LinearExpr expr) {
  check_expr_vars(expr);
  expr.normalize();
  objective_ = std::move(expr);
}

std::string LinearModel::unique_label(std::string base) {
  if (!label_index_.contains(base)) return base;
  for (int k = 2;; ++k) {
    std::string candidate = base + "#" + std::to_string(k);
    if (!label_index_.contains(candidate)) return candidate;
  }
}

void LinearModel::logic_conjunction(VarId a, VarId b) {
  LinearExpr e;
  e.add(a, 1.0).add(b, 1.0);
  add_constraint(std::move(e), Relation::kEqual, 2.0,
                 unique_label("and(" + var_name(a) + "," + var_name(b) + ")"));
}

void LinearModel::logic_disjunction(std::span<const VarId> vars) {
  if (vars.empty()) throw ModelError("disjunction over no variables");
  LinearExpr e;
  for (VarId v : vars) e.add(v, 1.0);
  add_constraint(std::move(e), Relation::kGreaterEqual, 1.0,
                 unique_label("or(" + var_name(vars.front()) + "...)"));
}

void LinearModel::logic_implies(VarId a, VarId b) {
  LinearExpr e;
  e.add(a, 1.0).add(b, -1.0);
  add_constraint(std::move(e), Relation::kLessEqual, 0.0,
                 unique_label("impl(" + var_name(a) + "," + var_name(b) + ")"));
}

void LinearModel::logic_iff(VarId a, VarId b) {
  LinearExpr e;
  e.add(a, 1.0).add(b, -1.0);
  add_constraint(std::move(e), Relation::kEqual, 0.0,
                 unique_label("iff(" + var_name(a) + "," + var_name(b) + ")"));
}

void LinearModel::logic_count(std::span<const VarId> vars, CountMode mode,
                              int k) {
  if (vars.empty()) throw ModelError("count over no variables");
  LinearExpr e;
  for (VarId v : vars) e.add(v, 1.0);
  Relation rel = mode == CountMode::kAtMost    ? Relation::kLessEqual
                 : mode == CountMode::kExactly ? Relation::kEqual
                                               : Relation::kGreaterEqual;
  const char* tag = mode == CountMode::kAtMost    ? "atmost"
                    : mode == CountMode::kExactly ? "exactly"
                                                  : "atleast";
  add_constraint(std::move(e), rel, static_cast<double>(k),
                 unique_label(std::string(tag) + std::to_string(k) + "(" +
                              var_name(vars.front()) + "...)"));
}

void LinearModel::logic_and_link(VarId y, VarId a, VarId b) {
  std::string suffix =
      "(" + var_name(y) + "," + var_name(a) + "," + var_name(b) + ")";
  LinearExpr e1;
  e1.add(y, 1.0).add(a, -1.0);
  add_constraint(std::move(e1), Relation::kLessEqual, 0.0,
                 unique_label("andlink_a" + suffix));
  LinearExpr e2;
  e2.add(y, 1.0).add(b, -1.0);
  add_constraint(std::move(e2), Relation::kLessEqual, 0.0,
                 unique_label("andlink_b" + suffix));
  LinearExpr e3;
  e3.add(y, 1.0).add(a, -1.0).add(b, -1.0);
  add_constraint(std::move(e3), Relation::kGreaterEqual, -1.0,
                 unique_label("andlink_ab" + suffix));
}

Evaluation LinearModel::evaluate(const Assignment& assignment) const {
  if (assignment.size() < num_vars())
    throw ModelError("incomplete assignment: wrong size");
  for (int j = 0; j < num_vars(); ++j) {
    if (!assignment.has(VarId{j}))
      throw ModelError("incomplete assignment: missing " + names_[j]);
  }
  Evaluation result;
  result.feasible = true;
  std::span<const double> values = assignment.values();
  for (const Constraint& c : constraints_) {
    double lhs = c.expr.value_under(values);
    bool ok = true;
    switch (c.relation) {
      case Relation::kLessEqual:
        ok = lhs <= c.rhs + kEvalTolerance;
        break;
      case Relation::kEqual:
        ok = std::abs(lhs - c.rhs) <= kEvalTolerance;
        break;
      case Relation::kGreaterEqual:
        ok = lhs >= c.rhs - kEvalTolerance;
        break;
    }
    if (!ok) {
      result.feasible = false;
      result.violated.push_back(c.label);
    }
  }
  result.objective = objective_.value_under(values);
  return result;
}

LinearModel LinearModel::relax() const {
  LinearModel copy = *this;
  std::fill(copy.domains_.begin(), copy.domains_.end(),
            VarDomain::kContinuous);
  return copy;
}

}  // namespace bip
