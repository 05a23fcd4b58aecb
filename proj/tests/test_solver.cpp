#include "bip/solver.hpp"

#include "bip/simplex.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bip;

TEST_CASE("simplex solves the relaxed planning example") {
  helpers::ExpandedProduction prod = helpers::production_expanded_model();
  LpResult lp = simplex(prod.model.relax());
  REQUIRE(lp.status == LpStatus::kOptimal);
  CHECK(lp.objective == doctest::Approx(50.0).epsilon(1e-9));

  // Vertex-enumeration oracle over the 2-D (xA, xB) polytope.
  LinearModel plane = helpers::production_display_model();
  auto vertex_opt = helpers::two_var_lp_optimum(plane, 63.0, 7.0);
  REQUIRE(vertex_opt.has_value());
  CHECK(*vertex_opt == doctest::Approx(50.0));
}

TEST_CASE("simplex rejects unrelaxed models") {
  LinearModel m = helpers::production_display_model();
  CHECK_THROWS_AS(simplex(m), ModelError);
}

TEST_CASE("simplex detects an empty interval") {
  LinearModel m(Sense::kMaximize);
  VarId x = m.add_binary("x");
  LinearExpr lo;
  lo.add(x, 1.0);
  m.add_constraint(std::move(lo), Relation::kGreaterEqual, 0.6, "low");
  LinearExpr hi;
  hi.add(x, 1.0);
  m.add_constraint(std::move(hi), Relation::kLessEqual, 0.4, "high");
  LinearExpr obj;
  obj.add(x, 1.0);
  m.set_objective(obj);
  CHECK(simplex(m.relax()).status == LpStatus::kInfeasible);
}

TEST_CASE("simplex walks to the facet") {
  LinearModel m(Sense::kMaximize);
  VarId x = m.add_binary("x");
  VarId y = m.add_binary("y");
  LinearExpr sum;
  sum.add(x, 1.0).add(y, 1.0);
  m.add_constraint(std::move(sum), Relation::kLessEqual, 1.0, "facet");
  LinearExpr obj;
  obj.add(x, 1.0).add(y, 1.0);
  m.set_objective(obj);
  LpResult lp = simplex(m.relax());
  REQUIRE(lp.status == LpStatus::kOptimal);
  CHECK(lp.objective == doctest::Approx(1.0));
}

TEST_CASE("box bounds alone cap the relaxation") {
  LinearModel m(Sense::kMaximize);
  VarId x = m.add_binary("x");
  LinearExpr obj;
  obj.add(x, 1.0);
  m.set_objective(obj);
  LpResult lp = simplex(m.relax());
  REQUIRE(lp.status == LpStatus::kOptimal);
  CHECK(lp.objective == doctest::Approx(1.0));
}

TEST_CASE("branch and bound recovers the integer planning optimum") {
  helpers::ExpandedProduction prod = helpers::production_expanded_model();
  SolveReport report = branch_and_bound(prod.model);
  REQUIRE(report.status == SolveStatus::kOptimal);
  CHECK(report.objective == doctest::Approx(50.0));
  REQUIRE(report.best.has_value());
  CHECK(prod.xa(*report.best) == doctest::Approx(10.0));
  CHECK(prod.xb(*report.best) == doctest::Approx(0.0));
  CHECK(prod.model.evaluate(*report.best).feasible);
}

TEST_CASE("pick-one with weighted objective selects the top index") {
  LinearModel m(Sense::kMaximize);
  std::vector<VarId> vars;
  LinearExpr obj;
  for (int i = 0; i < 5; ++i) {
    vars.push_back(m.add_binary("v" + std::to_string(i)));
    obj.add(vars[i], i);
  }
  m.set_objective(obj);
  m.logic_count(vars, LinearModel::CountMode::kExactly, 1);
  SolveReport report = branch_and_bound(m);
  REQUIRE(report.status == SolveStatus::kOptimal);
  CHECK(report.objective == doctest::Approx(4.0));
  CHECK(report.best->get(vars[4]) == 1.0);
}

TEST_CASE("infeasible models report infeasible") {
  LinearModel m(Sense::kMaximize);
  VarId x = m.add_binary("x");
  LinearExpr lo;
  lo.add(x, 1.0);
  m.add_constraint(std::move(lo), Relation::kGreaterEqual, 1.0, "one");
  LinearExpr hi;
  hi.add(x, 1.0);
  m.add_constraint(std::move(hi), Relation::kLessEqual, 0.0, "zero");
  CHECK(branch_and_bound(m).status == SolveStatus::kInfeasible);
  CHECK(simplex(m.relax()).status == LpStatus::kInfeasible);
}

TEST_CASE("solver matches brute force on random models") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 120; ++trial) {
    LinearModel m = helpers::random_model(rng, 10, 7);
    helpers::BruteForce oracle = helpers::brute_force(m);
    SolveReport report = branch_and_bound(m);
    CAPTURE(trial);
    if (oracle.any) {
      REQUIRE(report.status == SolveStatus::kOptimal);
      CHECK(report.objective == doctest::Approx(oracle.best).epsilon(1e-9));
      CHECK(m.evaluate(*report.best).feasible);
      // Weak duality: the relaxation bounds the integer optimum.
      LpResult lp = simplex(m.relax());
      if (lp.status == LpStatus::kOptimal) {
        if (m.sense() == Sense::kMaximize)
          CHECK(lp.objective >= report.objective - 1e-6);
        else
          CHECK(lp.objective <= report.objective + 1e-6);
      }
    } else {
      CHECK(report.status == SolveStatus::kInfeasible);
    }
  }
}

TEST_CASE("enumeration matches brute-force counts on random models") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    LinearModel m = helpers::random_model(rng, 10, 8);
    helpers::BruteForce oracle = helpers::brute_force(m);
    std::vector<VarId> proj;
    for (int j = 0; j < m.num_vars(); ++j) proj.push_back(VarId{j});
    EnumerationReport report = enumerate_solutions(m, proj);
    CAPTURE(trial);
    CHECK(report.exhausted);
    CHECK(report.count == oracle.feasible_count);
  }
}

TEST_CASE("pick-one counting examples") {
  {
    LinearModel m(Sense::kMaximize);
    std::vector<VarId> vars;
    for (int i = 0; i < 3; ++i)
      vars.push_back(m.add_binary("v" + std::to_string(i)));
    m.logic_count(vars, LinearModel::CountMode::kExactly, 1);
    EnumerationReport r = enumerate_solutions(m, vars);
    CHECK(r.count == 3);
    CHECK(r.exhausted);
  }
  {
    LinearModel m(Sense::kMaximize);
    std::vector<VarId> vars;
    for (int i = 0; i < 3; ++i)
      vars.push_back(m.add_binary("v" + std::to_string(i)));
    m.logic_count(vars, LinearModel::CountMode::kAtMost, 1);
    EnumerationReport r = enumerate_solutions(m, vars);
    CHECK(r.count == 4);  // includes the all-zero row
  }
}

TEST_CASE("enumeration respects target objectives and caps") {
  LinearModel m(Sense::kMaximize);
  std::vector<VarId> vars;
  LinearExpr obj;
  for (int i = 0; i < 6; ++i) {
    vars.push_back(m.add_binary("v" + std::to_string(i)));
    obj.add(vars[i], 1.0);
  }
  m.set_objective(obj);
  EnumerationReport two_of_six =
      enumerate_solutions(m, vars, 2.0);  // C(6,2) rows score exactly 2
  CHECK(two_of_six.count == 15);
  CHECK(two_of_six.exhausted);

  EnumerateOptions capped;
  capped.cap = 4;
  EnumerationReport partial = enumerate_solutions(m, vars, 2.0, capped);
  CHECK(partial.count == 4);
  CHECK(!partial.exhausted);
}

TEST_CASE("enumeration stores solutions in search order") {
  LinearModel m(Sense::kMaximize);
  std::vector<VarId> vars;
  for (int i = 0; i < 4; ++i)
    vars.push_back(m.add_binary("v" + std::to_string(i)));
  m.logic_count(vars, LinearModel::CountMode::kExactly, 1);
  EnumerateOptions opt;
  opt.store_limit = 10;
  EnumerationReport r1 = enumerate_solutions(m, vars, std::nullopt, opt);
  EnumerationReport r2 = enumerate_solutions(m, vars, std::nullopt, opt);
  REQUIRE(r1.count == 4);
  REQUIRE(r1.solutions.size() == 4);
  for (size_t i = 0; i < r1.solutions.size(); ++i)
    CHECK(r1.solutions[i] == r2.solutions[i]);
  for (const Assignment& a : r1.solutions) CHECK(m.evaluate(a).feasible);
}

TEST_CASE("node limits surface in the report") {
  std::mt19937_64 rng(5);
  LinearModel m = helpers::random_model(rng, 12, 2);
  SolveOptions opt;
  opt.node_limit = 1;
  SolveReport report = branch_and_bound(m, opt);
  CHECK((report.status == SolveStatus::kNodeLimit ||
         report.status == SolveStatus::kOptimal ||
         report.status == SolveStatus::kInfeasible));
  CHECK(report.nodes <= 2);
}

TEST_CASE("identical runs produce identical reports") {
  std::mt19937_64 rng(31);
  LinearModel m = helpers::random_model(rng, 12, 8);
  SolveReport a = branch_and_bound(m);
  SolveReport b = branch_and_bound(m);
  CHECK(a.status == b.status);
  CHECK(a.nodes == b.nodes);
  if (a.best.has_value()) {
    REQUIRE(b.best.has_value());
    CHECK(*a.best == *b.best);
    CHECK(a.objective == b.objective);
  }
}
