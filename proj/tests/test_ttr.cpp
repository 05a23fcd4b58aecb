#include "bip/ttr.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bip/lp_format.hpp"
#include "bip/ttr_sweep.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bip;
using namespace bip::ttr;

namespace {

// Random connected multigraph with table-consistent points.
RouteNetwork random_network(std::mt19937_64& rng, int max_cities,
                            int max_edges) {
  int nc = 3 + static_cast<int>(rng() % (max_cities - 2));
  RouteNetwork net;
  for (int i = 0; i < nc; ++i) net.add_city("C" + std::to_string(i));
  // Spanning chain first so terminals are reachable.
  for (int i = 1; i < nc; ++i) {
    int len = 1 + static_cast<int>(rng() % 6);
    net.add_edge("C" + std::to_string(i - 1), "C" + std::to_string(i), len);
  }
  int extra = static_cast<int>(rng() % (max_edges - nc + 2));
  for (int e = 0; e < extra && static_cast<int>(net.edges.size()) < max_edges;
       ++e) {
    int u = static_cast<int>(rng() % nc);
    int v = static_cast<int>(rng() % nc);
    if (u == v) continue;
    int len = 1 + static_cast<int>(rng() % 6);
    net.add_edge("C" + std::to_string(u), "C" + std::to_string(v), len);
  }
  return net;
}

Hand random_hand(std::mt19937_64& rng, const RouteNetwork& net, int cards) {
  Hand hand;
  int nc = static_cast<int>(net.cities.size());
  while (static_cast<int>(hand.cards.size()) < cards) {
    int a = static_cast<int>(rng() % nc);
    int b = static_cast<int>(rng() % nc);
    if (a == b) continue;
    hand.cards.push_back({a, b, 10});
  }
  return hand;
}

}  // namespace

TEST_CASE("the points table matches the published game") {
  CHECK(points_for_length(1) == 1);
  CHECK(points_for_length(2) == 2);
  CHECK(points_for_length(3) == 4);
  CHECK(points_for_length(4) == 7);
  CHECK(points_for_length(5) == 10);
  CHECK(points_for_length(6) == 15);
  CHECK_THROWS_AS(points_for_length(0), ModelError);
  CHECK_THROWS_AS(points_for_length(7), ModelError);
}

TEST_CASE("network files validate points and structure") {
  auto path = std::filesystem::temp_directory_path() / "net.csv";
  {
    std::ofstream out(path);
    out << "city_u,city_v,length,points\nA,B,6,15\nB,C,1,1\nB,C,1,1\n";
  }
  RouteNetwork net = RouteNetwork::load(path.string());
  CHECK(net.cities.size() == 3);
  CHECK(net.edges.size() == 3);  // the parallel pair stays distinct
  CHECK(net.edges[0].points == 15);
  CHECK(net.edges[1].points == 1);

  {
    std::ofstream out(path);
    out << "city_u,city_v,length,points\nA,B,6,14\n";
  }
  CHECK_THROWS_AS(RouteNetwork::load(path.string()), ParseError);
  {
    std::ofstream out(path);
    out << "city_u,city_v,length,points\nA,A,2,2\n";
  }
  CHECK_THROWS_AS(RouteNetwork::load(path.string()), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("a single short card claims its edge") {
  RouteNetwork net;
  net.add_edge("P", "Q", 2);
  Hand hand;
  hand.cards = {{0, 1, 5}, {0, 1, 5}, {0, 1, 5}};
  RoutePlan plan = solve_hand(net, hand);
  CHECK(plan.total_points == 2);
  CHECK(plan.trains_used == 2);
  REQUIRE(plan.claimed.size() == 1);
  PlanReport report = validate_plan(net, hand, plan);
  CHECK(report.ok());
}

TEST_CASE("four-node path choice matches exhaustive search") {
  // Two routes from city 0 to city 3, through 1 or through 2, plus a
  // direct long edge; synthetic lengths.
  RouteNetwork net;
  net.add_edge("n1", "n2", 2);
  net.add_edge("n2", "n4", 3);
  net.add_edge("n1", "n3", 1);
  net.add_edge("n3", "n4", 2);
  net.add_edge("n1", "n4", 6);
  net.add_edge("n2", "n3", 1);
  Hand hand;
  hand.cards = {{net.city_index("n1"), net.city_index("n4"), 8},
                {net.city_index("n1"), net.city_index("n4"), 8},
                {net.city_index("n1"), net.city_index("n4"), 8}};
  RoutePlan plan = solve_hand(net, hand);
  auto oracle = helpers::ttr_brute_force(net, hand);
  REQUIRE(oracle.has_value());
  CHECK(plan.total_points == *oracle);
  CHECK(validate_plan(net, hand, plan).ok());
}

TEST_CASE("hands beyond the train budget are infeasible") {
  RouteNetwork net;
  net.add_edge("A", "B", 6);
  net.add_edge("B", "C", 6);
  net.add_edge("C", "D", 6);
  net.add_edge("D", "E", 6);
  net.add_edge("E", "F", 6);
  net.add_edge("F", "G", 6);
  net.add_edge("G", "H", 6);
  net.add_edge("H", "I", 6);
  Hand hand;
  hand.cards = {{net.city_index("A"), net.city_index("I"), 10},
                {net.city_index("A"), net.city_index("B"), 1},
                {net.city_index("A"), net.city_index("C"), 2}};
  // The A-I chain alone needs 48 trains.
  CHECK_THROWS_AS(solve_hand(net, hand), InfeasibleError);
  CHECK(!helpers::ttr_brute_force(net, hand).has_value());
}

TEST_CASE("optimal plans match brute force on random small networks") {
  std::mt19937_64 rng(4242);
  int solved = 0;
  for (int trial = 0; trial < 12; ++trial) {
    RouteNetwork net = random_network(rng, 7, 10);
    Hand hand = random_hand(rng, net, 3);
    auto oracle = helpers::ttr_brute_force(net, hand);
    CAPTURE(trial);
    if (!oracle.has_value()) {
      CHECK_THROWS_AS(solve_hand(net, hand), InfeasibleError);
      continue;
    }
    RoutePlan plan = solve_hand(net, hand);
    CHECK(plan.total_points == *oracle);
    PlanReport report = validate_plan(net, hand, plan);
    CHECK(report.terminals_ok);
    CHECK(report.interiors_ok);
    CHECK(report.budget_ok);
    CHECK(report.connected_ok);
    CHECK(plan.trains_used <= 45);
    ++solved;
  }
  CHECK(solved > 0);
}

TEST_CASE("four-card hands extend the linking denominator") {
  RouteNetwork net;
  net.add_edge("A", "B", 2);
  net.add_edge("B", "C", 2);
  net.add_edge("C", "D", 2);
  net.add_edge("A", "D", 5);
  Hand hand;
  hand.cards = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {0, 3, 4}};
  AllocationModel am = build_model(net, hand);
  CHECK(am.card_edge.size() == 4);
  RoutePlan plan = solve_hand(net, hand);
  auto oracle = helpers::ttr_brute_force(net, hand);
  REQUIRE(oracle.has_value());
  CHECK(plan.total_points == *oracle);
  CHECK(validate_plan(net, hand, plan).ok());
}

TEST_CASE("hand sizes other than 3 or 4 are rejected") {
  RouteNetwork net;
  net.add_edge("A", "B", 2);
  Hand hand;
  hand.cards = {{0, 1, 4}};
  CHECK_THROWS_AS(build_model(net, hand), ModelError);
}

TEST_CASE("validators flag cycles, budgets, and extra claims") {
  // Square A-B-C-D plus a separate triangle E-F-G.
  RouteNetwork net;
  net.add_edge("A", "B", 1);   // 0
  net.add_edge("B", "C", 1);   // 1
  net.add_edge("C", "D", 1);   // 2
  net.add_edge("A", "D", 1);   // 3
  net.add_edge("E", "F", 1);   // 4
  net.add_edge("F", "G", 1);   // 5
  net.add_edge("E", "G", 1);   // 6
  net.add_edge("A", "E", 1);   // 7
  Hand hand;
  hand.cards = {{net.city_index("A"), net.city_index("B"), 2},
                {net.city_index("A"), net.city_index("B"), 2},
                {net.city_index("A"), net.city_index("B"), 2}};

  RoutePlan detached_cycle;
  detached_cycle.card_edges = {{0, 4, 5, 6}, {0}, {0}};
  detached_cycle.claimed = {0, 4, 5, 6};
  detached_cycle.trains_used = 4;
  PlanReport r1 = validate_plan(net, hand, detached_cycle);
  CHECK(r1.terminals_ok);
  CHECK(r1.interiors_ok);
  CHECK(r1.connected_ok);
  REQUIRE(r1.extraneous_cycles[0].size() == 1);
  CHECK(r1.extraneous_cycles[0][0] == std::vector<int>{4, 5, 6});

  RoutePlan over_budget;
  over_budget.card_edges = {{0}, {0}, {0}};
  over_budget.claimed = {0};
  over_budget.trains_used = 1;
  PlanReport r2 = validate_plan(net, hand, over_budget);
  CHECK(r2.ok());
  Hand tiny = hand;
  tiny.budget = 0;
  CHECK(!validate_plan(net, tiny, over_budget).budget_ok);

  RoutePlan extra;
  extra.card_edges = {{0}, {0}, {0}};
  extra.claimed = {0, 2};
  PlanReport r3 = validate_plan(net, hand, extra);
  CHECK(r3.extra_claimed == std::vector<int>{2});

  RoutePlan broken;
  broken.card_edges = {{1}, {0}, {0}};  // card 0 misses both terminals
  broken.claimed = {0, 1};
  PlanReport r4 = validate_plan(net, hand, broken);
  CHECK(!r4.terminals_ok);
}

TEST_CASE("strict mode removes extraneous cycles") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 8; ++trial) {
    RouteNetwork net = random_network(rng, 6, 9);
    Hand hand = random_hand(rng, net, 3);
    auto oracle = helpers::ttr_brute_force(net, hand);
    if (!oracle.has_value()) continue;
    SolveHandOptions options;
    options.strict_paths = true;
    RoutePlan plan = solve_hand(net, hand, options);
    PlanReport report = validate_plan(net, hand, plan);
    CHECK(report.ok());
    for (const auto& cycles : report.extraneous_cycles)
      CHECK(cycles.empty());
  }
}

TEST_CASE("pure mode claims only card-supported edges") {
  std::mt19937_64 rng(88);
  for (int trial = 0; trial < 8; ++trial) {
    RouteNetwork net = random_network(rng, 6, 9);
    Hand hand = random_hand(rng, net, 3);
    auto oracle = helpers::ttr_brute_force(net, hand);
    if (!oracle.has_value()) continue;
    SolveHandOptions options;
    options.pure_claims = true;
    RoutePlan plan = solve_hand(net, hand, options);
    PlanReport report = validate_plan(net, hand, plan);
    CHECK(report.extra_claimed.empty());
  }
}

TEST_CASE("a pool of exactly three cards yields one hand") {
  RouteNetwork net;
  net.add_edge("A", "B", 2);
  net.add_edge("B", "C", 3);
  net.add_edge("A", "C", 4);
  std::vector<DestinationCard> pool = {{0, 1, 3}, {1, 2, 3}, {0, 2, 3}};
  SubsetSweepResult result = sweep_subsets(net, pool, 3, 1);
  CHECK(result.hands_total == 1);
  CHECK(result.hands_solved == 1);
  std::ostringstream csv;
  write_usage_csv(csv, net, result);
  CHECK(csv.str().find("edge,appearances,percentage") == 0);
}

TEST_CASE("a mandatory bridge shows up in every optimum") {
  // Two clusters joined by a single bridge; every hand crosses it.
  RouteNetwork net;
  net.add_edge("A", "B", 1);
  net.add_edge("B", "C", 1);
  net.add_edge("A", "C", 2);
  net.add_edge("C", "D", 3);  // the bridge
  net.add_edge("D", "E", 1);
  net.add_edge("E", "F", 1);
  net.add_edge("D", "F", 2);
  std::vector<DestinationCard> pool = {
      {net.city_index("A"), net.city_index("E"), 5},
      {net.city_index("B"), net.city_index("F"), 5},
      {net.city_index("A"), net.city_index("F"), 5},
      {net.city_index("B"), net.city_index("E"), 5}};
  // Oracle: every solvable hand's optimum must include the bridge, since
  // each card joins the two sides.
  for (size_t skip = 0; skip < pool.size(); ++skip) {
    Hand hand;
    for (size_t i = 0; i < pool.size(); ++i)
      if (i != skip) hand.cards.push_back(pool[i]);
    auto oracle = helpers::ttr_brute_force(net, hand);
    REQUIRE(oracle.has_value());
  }
  SubsetSweepResult result = sweep_subsets(net, pool, 3, 1);
  CHECK(result.hands_total == 4);
  CHECK(result.hands_solved == 4);
  int bridge_u = std::min(net.city_index("C"), net.city_index("D"));
  int bridge_v = std::max(net.city_index("C"), net.city_index("D"));
  bool found = false;
  for (const PairUsage& u : result.usage) {
    if (u.u == bridge_u && u.v == bridge_v) {
      found = true;
      CHECK(u.appearances == result.hands_solved);  // 100% of hands
    }
  }
  CHECK(found);
}
