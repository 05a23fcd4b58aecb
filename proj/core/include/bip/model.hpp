#pragma once

#include <compare>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bip {

enum class Sense { kMaximize, kMinimize };
enum class Relation { kLessEqual, kEqual, kGreaterEqual };

// Binary variables are the public surface; continuous [0,1] domains only
// appear through LinearModel::relax().
enum class VarDomain { kBinary, kContinuous };

// Raised for structural misuse: duplicate names/labels, unknown variables,
// incomplete assignments.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VarId {
  int value = -1;
  constexpr bool valid() const { return value >= 0; }
  friend constexpr auto operator<=>(VarId, VarId) = default;
};

// A linear form c0 + sum(coeff_i * var_i). Terms may be appended in any
// order; duplicates are merged when the expression is normalized (which
// happens automatically when it is installed into a model).
class LinearExpr {
 public:
  struct Term {
    VarId var;
    double coeff;
  };

  LinearExpr() = default;
  /*implicit*/ LinearExpr(double constant) : constant_(constant) {}

  LinearExpr& add(VarId var, double coeff);
  LinearExpr& add_constant(double value);

  LinearExpr& operator+=(const LinearExpr& other);
  LinearExpr& operator*=(double scale);

  // Sorts terms by variable index and merges duplicates. Zero coefficients
  // are kept out of the normalized form.
  void normalize();
  bool normalized() const { return normalized_; }

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }

  // Value of the expression under dense per-variable values.
  double value_under(std::span<const double> values) const;

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
  bool normalized_ = true;
};

LinearExpr operator*(double coeff, VarId var);
LinearExpr operator+(LinearExpr lhs, const LinearExpr& rhs);
LinearExpr operator+(LinearExpr lhs, VarId var);
LinearExpr operator-(LinearExpr lhs, const LinearExpr& rhs);

struct Constraint {
  LinearExpr expr;
  Relation relation;
  double rhs;
  std::string label;
};

// Values for every variable of a model. Unset entries are tracked so that
// evaluate() can reject incomplete assignments.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(int num_vars);

  void resize(int num_vars);
  void set(VarId var, double value);
  double get(VarId var) const;
  bool has(VarId var) const;
  int size() const { return static_cast<int>(values_.size()); }

  std::span<const double> values() const { return values_; }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<double> values_;
  std::vector<bool> set_;
};

struct Evaluation {
  bool feasible = false;
  std::vector<std::string> violated;  // labels, in constraint order
  double objective = 0.0;
};

// A 0-1 linear model: binary decision variables, labeled linear
// constraints, and one linear objective with a fixed sense.
class LinearModel {
 public:
  explicit LinearModel(Sense sense) : sense_(sense) {}

  Sense sense() const { return sense_; }

  VarId add_binary(std::string_view name);
  int num_vars() const { return static_cast<int>(names_.size()); }
  const std::string& var_name(VarId var) const;
  VarDomain var_domain(VarId var) const;
  std::optional<VarId> find_var(std::string_view name) const;

  void add_constraint(LinearExpr expr, Relation relation, double rhs,
                      std::string label);
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  const Constraint& constraint(int i) const { return constraints_[i]; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  void set_objective(LinearExpr expr);
  const LinearExpr& objective() const { return objective_; }

  // Boolean-logic constraint builders. Each appends plain linear rows whose
  // 0/1 feasible set is the corresponding truth table.
  void logic_conjunction(VarId a, VarId b);               // a + b = 2
  void logic_disjunction(std::span<const VarId> vars);    // sum >= 1
  void logic_implies(VarId a, VarId b);                   // a <= b
  void logic_iff(VarId a, VarId b);                       // a - b = 0
  enum class CountMode { kAtMost, kExactly, kAtLeast };
  void logic_count(std::span<const VarId> vars, CountMode mode, int k);
  void logic_and_link(VarId y, VarId a, VarId b);  // y <= a, y <= b, y >= a+b-1

  // Exact feasibility report. Slack tolerance is 1e-9, so models with
  // small-integer data are evaluated exactly. Throws ModelError when the
  // assignment does not cover every variable.
  Evaluation evaluate(const Assignment& assignment) const;

  // Copy with every binary domain replaced by continuous [0,1].
  LinearModel relax() const;

 private:
  void check_expr_vars(const LinearExpr& expr) const;
  std::string unique_label(std::string base);

  Sense sense_;
  std::vector<std::string> names_;
  std::vector<VarDomain> domains_;
  std::unordered_map<std::string, int> name_index_;
  std::vector<Constraint> constraints_;
  std::unordered_map<std::string, int> label_index_;
  LinearExpr objective_;
};

constexpr double kEvalTolerance = 1e-9;

}  // namespace bip
