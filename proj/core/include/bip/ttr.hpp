#pragma once

#include <string>
#include <vector>

#include "bip/model.hpp"
#include "bip/solver.hpp"

namespace bip::ttr {

inline constexpr int kTrainBudget = 45;

// Points per route length in the published game.
int points_for_length(int length);

struct Edge {
  int u = 0;  // u < v, by city index
  int v = 0;
  int length = 0;
  int points = 0;
};

// Undirected weighted city graph; parallel routes are distinct edge
// records.
struct RouteNetwork {
  std::vector<std::string> cities;
  std::vector<Edge> edges;

  int city_index(const std::string& name) const;
  int add_city(const std::string& name);
  // Validates endpoints and orders them; points taken from the table when
  // negative.
  int add_edge(const std::string& u, const std::string& v, int length,
               int points = -1);

  // CSV with header city_u,city_v,length,points. Points must match the
  // published table for the length.
  static RouteNetwork load(const std::string& path);
};

struct DestinationCard {
  int alpha = 0;
  int beta = 0;
  int value = 0;
};

// CSV with header alpha,beta,value.
std::vector<DestinationCard> load_cards(const std::string& path,
                                        const RouteNetwork& network);

struct Hand {
  std::vector<DestinationCard> cards;  // 3 or 4
  int budget = kTrainBudget;
};

// The allocation model and its variable map. Per card: one binary per edge
// and one open-city binary per non-terminal city. Per edge: one overall
// claim binary, linked by claim >= average of the per-card edge variables,
// charged against the train budget and scored in the objective.
struct AllocationModel {
  LinearModel model;
  std::vector<std::vector<VarId>> card_edge;  // [card][edge]
  std::vector<std::vector<VarId>> open_city;  // [card][city]; invalid at terminals
  std::vector<VarId> claim;                   // [edge]
};

AllocationModel build_model(const RouteNetwork& network, const Hand& hand,
                            bool pure_claims = false);

struct RoutePlan {
  std::vector<std::vector<int>> card_edges;  // edge indices per card
  std::vector<int> claimed;                  // edges with claim = 1
  int total_points = 0;
  int trains_used = 0;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveHandOptions {
  bool strict_paths = false;  // cut extraneous cycles out of card supports
  bool pure_claims = false;   // forbid claimed edges no card uses
  SolveOptions solver;
};

// Optimal allocation for a hand; throws InfeasibleError when no in-budget
// connection exists.
RoutePlan solve_hand(const RouteNetwork& network, const Hand& hand,
                     const SolveHandOptions& options = {});

struct PlanReport {
  bool terminals_ok = false;   // per card, both terminals have degree 1
  bool interiors_ok = false;   // per card, every other city has degree 0 or 2
  bool budget_ok = false;
  bool connected_ok = false;   // per card, the terminals are joined
  std::vector<std::vector<std::vector<int>>> extraneous_cycles;  // [card][cycle]
  std::vector<int> extra_claimed;  // claimed edges no card uses

  bool ok() const {
    return terminals_ok && interiors_ok && budget_ok && connected_ok;
  }
};

PlanReport validate_plan(const RouteNetwork& network, const Hand& hand,
                         const RoutePlan& plan);

}  // namespace bip::ttr
