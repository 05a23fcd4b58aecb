#include "bip/ttr.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "bip/lp_format.hpp"

namespace bip::ttr {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front())))
      field.erase(field.begin());
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back())))
      field.pop_back();
    out.push_back(field);
  }
  return out;
}

void check_hand(const RouteNetwork& network, const Hand& hand) {
  if (hand.cards.size() != 3 && hand.cards.size() != 4)
    throw ModelError("a hand holds 3 or 4 destination cards");
  for (const DestinationCard& card : hand.cards) {
    if (card.alpha == card.beta)
      throw ModelError("destination card connects a city to itself");
    if (card.alpha < 0 || card.beta < 0 ||
        card.alpha >= static_cast<int>(network.cities.size()) ||
        card.beta >= static_cast<int>(network.cities.size()))
      throw ModelError("destination card names an unknown city");
  }
}

}  // namespace

int points_for_length(int length) {
  switch (length) {
    case 1: return 1;
    case 2: return 2;
    case 3: return 4;
    case 4: return 7;
    case 5: return 10;
    case 6: return 15;
  }
  throw ModelError("route length must be between 1 and 6");
}

int RouteNetwork::city_index(const std::string& name) const {
  for (size_t i = 0; i < cities.size(); ++i)
    if (cities[i] == name) return static_cast<int>(i);
  throw ModelError("unknown city: " + name);
}

int RouteNetwork::add_city(const std::string& name) {
  for (size_t i = 0; i < cities.size(); ++i)
    if (cities[i] == name) return static_cast<int>(i);
  cities.push_back(name);
  return static_cast<int>(cities.size()) - 1;
}

int RouteNetwork::add_edge(const std::string& u, const std::string& v,
                           int length, int points) {
  int ui = add_city(u);
  int vi = add_city(v);
  if (ui == vi) throw ModelError("self-loop route at " + u);
  if (length < 1 || length > 6)
    throw ModelError("route length must be between 1 and 6");
  Edge e;
  e.u = std::min(ui, vi);
  e.v = std::max(ui, vi);
  e.length = length;
  e.points = points < 0 ? points_for_length(length) : points;
  edges.push_back(e);
  return static_cast<int>(edges.size()) - 1;
}

RouteNetwork RouteNetwork::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open network file " + path);
  RouteNetwork network;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::vector<std::string> fields = split_csv(line);
    if (!header_seen) {
      if (fields != std::vector<std::string>{"city_u", "city_v", "length",
                                             "points"})
        throw ParseError("expected header city_u,city_v,length,points",
                         line_no);
      header_seen = true;
      continue;
    }
    if (fields.size() != 4) throw ParseError("expected 4 fields", line_no);
    int length, points;
    try {
      length = std::stoi(fields[2]);
      points = std::stoi(fields[3]);
    } catch (const std::exception&) {
      throw ParseError("bad number", line_no);
    }
    if (length < 1 || length > 6)
      throw ParseError("route length out of range", line_no);
    if (points != points_for_length(length))
      throw ParseError("points do not match the table for length " +
                           std::to_string(length),
                       line_no);
    if (fields[0] == fields[1]) throw ParseError("self-loop route", line_no);
    network.add_edge(fields[0], fields[1], length, points);
  }
  if (!header_seen) throw ParseError("empty network file", 0);
  return network;
}

std::vector<DestinationCard> load_cards(const std::string& path,
                                        const RouteNetwork& network) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open card file " + path);
  std::vector<DestinationCard> cards;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::vector<std::string> fields = split_csv(line);
    if (!header_seen) {
      if (fields != std::vector<std::string>{"alpha", "beta", "value"})
        throw ParseError("expected header alpha,beta,value", line_no);
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) throw ParseError("expected 3 fields", line_no);
    DestinationCard card;
    card.alpha = network.city_index(fields[0]);
    card.beta = network.city_index(fields[1]);
    try {
      card.value = std::stoi(fields[2]);
    } catch (const std::exception&) {
      throw ParseError("bad value", line_no);
    }
    if (card.alpha == card.beta)
      throw ParseError("card connects a city to itself", line_no);
    cards.push_back(card);
  }
  return cards;
}

AllocationModel build_model(const RouteNetwork& network, const Hand& hand,
                            bool pure_claims) {
  check_hand(network, hand);
  const int num_cards = static_cast<int>(hand.cards.size());
  const int num_cities = static_cast<int>(network.cities.size());
  const int num_edges = static_cast<int>(network.edges.size());

  AllocationModel out{LinearModel(Sense::kMaximize), {}, {}, {}};
  LinearModel& model = out.model;
  out.card_edge.assign(num_cards, std::vector<VarId>(num_edges));
  out.open_city.assign(num_cards, std::vector<VarId>(num_cities, VarId{}));
  out.claim.resize(num_edges);

  for (int k = 0; k < num_cards; ++k) {
    char tag = static_cast<char>('a' + k);
    for (int e = 0; e < num_edges; ++e)
      out.card_edge[k][e] =
          model.add_binary(std::string(1, tag) + "(e" + std::to_string(e) + ")");
    for (int i = 0; i < num_cities; ++i) {
      if (i == hand.cards[k].alpha || i == hand.cards[k].beta) continue;
      out.open_city[k][i] = model.add_binary(std::string("y") + tag + "(c" +
                                             std::to_string(i) + ")");
    }
  }
  for (int e = 0; e < num_edges; ++e)
    out.claim[e] = model.add_binary("x(e" + std::to_string(e) + ")");

  LinearExpr objective;
  for (int e = 0; e < num_edges; ++e)
    objective.add(out.claim[e], network.edges[e].points);
  model.set_objective(std::move(objective));

  // Degree rows: terminals touch exactly one card edge, every other city
  // either none or two (two exactly when the city is opened).
  for (int k = 0; k < num_cards; ++k) {
    char tag = static_cast<char>('a' + k);
    for (int i = 0; i < num_cities; ++i) {
      LinearExpr degree;
      bool touches = false;
      for (int e = 0; e < num_edges; ++e) {
        if (network.edges[e].u == i || network.edges[e].v == i) {
          degree.add(out.card_edge[k][e], 1.0);
          touches = true;
        }
      }
      bool terminal = i == hand.cards[k].alpha || i == hand.cards[k].beta;
      if (terminal) {
        if (!touches)
          throw ModelError("terminal city " + network.cities[i] +
                           " has no routes");
        model.add_constraint(std::move(degree), Relation::kEqual, 1.0,
                             std::string("deg(") + tag + "," +
                                 std::to_string(i) + ")");
      } else {
        degree.add(out.open_city[k][i], -2.0);
        model.add_constraint(std::move(degree), Relation::kEqual, 0.0,
                             std::string("deg(") + tag + "," +
                                 std::to_string(i) + ")");
      }
    }
  }

  // claim >= (sum of card uses) / K, so any use forces the claim; the
  // per-card rows say the same thing with a tighter relaxation.
  for (int e = 0; e < num_edges; ++e) {
    LinearExpr link;
    for (int k = 0; k < num_cards; ++k) link.add(out.card_edge[k][e], 1.0);
    link.add(out.claim[e], -static_cast<double>(num_cards));
    model.add_constraint(std::move(link), Relation::kLessEqual, 0.0,
                         "link(e" + std::to_string(e) + ")");
    for (int k = 0; k < num_cards; ++k) {
      LinearExpr strong;
      strong.add(out.card_edge[k][e], 1.0);
      strong.add(out.claim[e], -1.0);
      model.add_constraint(std::move(strong), Relation::kLessEqual, 0.0,
                           "link(e" + std::to_string(e) + "," +
                               std::string(1, static_cast<char>('a' + k)) +
                               ")");
    }
    if (pure_claims) {
      LinearExpr pure;
      pure.add(out.claim[e], 1.0);
      for (int k = 0; k < num_cards; ++k)
        pure.add(out.card_edge[k][e], -1.0);
      model.add_constraint(std::move(pure), Relation::kLessEqual, 0.0,
                           "claimonly(e" + std::to_string(e) + ")");
    }
  }

  LinearExpr budget;
  for (int e = 0; e < num_edges; ++e)
    budget.add(out.claim[e], network.edges[e].length);
  model.add_constraint(std::move(budget), Relation::kLessEqual,
                       static_cast<double>(hand.budget), "budget");
  return out;
}

namespace {

// Minimum-train path per card, for a warm-start incumbent.
std::vector<int> shortest_path_edges(const RouteNetwork& network, int from,
                                     int to) {
  const int n = static_cast<int>(network.cities.size());
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> via_edge(n, -1), via_city(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[from] = 0;
  heap.push({0, from});
  while (!heap.empty()) {
    auto [d, i] = heap.top();
    heap.pop();
    if (d > dist[i]) continue;
    for (size_t e = 0; e < network.edges.size(); ++e) {
      const Edge& edge = network.edges[e];
      if (edge.u != i && edge.v != i) continue;
      int j = edge.u == i ? edge.v : edge.u;
      double nd = d + edge.length;
      if (nd < dist[j]) {
        dist[j] = nd;
        via_edge[j] = static_cast<int>(e);
        via_city[j] = i;
        heap.push({nd, j});
      }
    }
  }
  if (via_edge[to] < 0 && from != to) return {};
  std::vector<int> path;
  for (int i = to; i != from; i = via_city[i]) path.push_back(via_edge[i]);
  std::reverse(path.begin(), path.end());
  return path;
}

Assignment heuristic_start(const RouteNetwork& network, const Hand& hand,
                           const AllocationModel& am) {
  const int num_cards = static_cast<int>(hand.cards.size());
  std::vector<std::vector<int>> paths(num_cards);
  std::vector<bool> claimed(network.edges.size(), false);
  int trains = 0;
  for (int k = 0; k < num_cards; ++k) {
    paths[k] = shortest_path_edges(network, hand.cards[k].alpha,
                                   hand.cards[k].beta);
    if (paths[k].empty()) return Assignment();  // disconnected terminals
    for (int e : paths[k]) {
      if (!claimed[e]) {
        claimed[e] = true;
        trains += network.edges[e].length;
      }
    }
  }
  if (trains > hand.budget) return Assignment();

  // Spend leftover trains on the highest-point unclaimed edges.
  std::vector<int> extras(network.edges.size());
  std::iota(extras.begin(), extras.end(), 0);
  std::stable_sort(extras.begin(), extras.end(), [&](int a, int b) {
    return network.edges[a].points > network.edges[b].points;
  });
  for (int e : extras) {
    if (claimed[e]) continue;
    if (trains + network.edges[e].length > hand.budget) continue;
    claimed[e] = true;
    trains += network.edges[e].length;
  }

  Assignment a(am.model.num_vars());
  for (int j = 0; j < am.model.num_vars(); ++j) a.set(VarId{j}, 0.0);
  for (int k = 0; k < num_cards; ++k) {
    std::vector<int> degree(network.cities.size(), 0);
    for (int e : paths[k]) {
      a.set(am.card_edge[k][e], 1.0);
      ++degree[network.edges[e].u];
      ++degree[network.edges[e].v];
    }
    for (size_t i = 0; i < network.cities.size(); ++i) {
      if (!am.open_city[k][i].valid()) continue;
      if (degree[i] > 0) a.set(am.open_city[k][i], 1.0);
    }
  }
  for (size_t e = 0; e < network.edges.size(); ++e)
    if (claimed[e]) a.set(am.claim[e], 1.0);
  return a;
}

std::vector<std::vector<int>> support_components(const RouteNetwork& network,
                                                 const std::vector<int>& edges) {
  // Connected components of the subgraph induced by `edges`, returned as
  // edge-index lists.
  std::vector<std::vector<std::pair<int, int>>> adj(network.cities.size());
  for (int e : edges) {
    adj[network.edges[e].u].push_back({network.edges[e].v, e});
    adj[network.edges[e].v].push_back({network.edges[e].u, e});
  }
  std::vector<bool> edge_seen(network.edges.size(), false);
  std::vector<bool> city_seen(network.cities.size(), false);
  std::vector<std::vector<int>> components;
  for (int start : edges) {
    if (edge_seen[start]) continue;
    std::vector<int> component;
    std::vector<int> stack{network.edges[start].u};
    city_seen[network.edges[start].u] = true;
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      for (auto [j, e] : adj[i]) {
        if (!edge_seen[e]) {
          edge_seen[e] = true;
          component.push_back(e);
        }
        if (!city_seen[j]) {
          city_seen[j] = true;
          stack.push_back(j);
        }
      }
    }
    std::sort(component.begin(), component.end());
    components.push_back(std::move(component));
  }
  return components;
}

RoutePlan extract_plan(const RouteNetwork& network, const Hand& hand,
                       const AllocationModel& am, const Assignment& best) {
  RoutePlan plan;
  plan.card_edges.resize(hand.cards.size());
  for (size_t k = 0; k < hand.cards.size(); ++k) {
    for (size_t e = 0; e < network.edges.size(); ++e)
      if (best.get(am.card_edge[k][e]) > 0.5)
        plan.card_edges[k].push_back(static_cast<int>(e));
  }
  for (size_t e = 0; e < network.edges.size(); ++e) {
    if (best.get(am.claim[e]) > 0.5) {
      plan.claimed.push_back(static_cast<int>(e));
      plan.total_points += network.edges[e].points;
      plan.trains_used += network.edges[e].length;
    }
  }
  return plan;
}

}  // namespace

RoutePlan solve_hand(const RouteNetwork& network, const Hand& hand,
                     const SolveHandOptions& options) {
  AllocationModel am = build_model(network, hand, options.pure_claims);
  Assignment warm = heuristic_start(network, hand, am);

  // Extraneous-cycle cuts accumulate across strict-mode re-solves.
  std::vector<LinearExpr> cuts;
  int cut_counter = 0;
  for (;;) {
    SolveOptions solver = options.solver;
    if (warm.size() == am.model.num_vars()) solver.warm_start = &warm;
    SolveReport report = branch_and_bound(am.model, solver);
    if (report.status == SolveStatus::kInfeasible)
      throw InfeasibleError("no in-budget allocation connects the hand");
    if (!report.best.has_value())
      throw InfeasibleError("search hit its limit before finding a plan");
    RoutePlan plan = extract_plan(network, hand, am, *report.best);
    if (!options.strict_paths) return plan;

    bool added = false;
    for (size_t k = 0; k < hand.cards.size(); ++k) {
      for (const auto& component :
           support_components(network, plan.card_edges[k])) {
        bool has_terminal = false;
        for (int e : component) {
          if (network.edges[e].u == hand.cards[k].alpha ||
              network.edges[e].v == hand.cards[k].alpha ||
              network.edges[e].u == hand.cards[k].beta ||
              network.edges[e].v == hand.cards[k].beta)
            has_terminal = true;
        }
        if (has_terminal) continue;
        LinearExpr cut;
        for (int e : component) cut.add(am.card_edge[k][e], 1.0);
        am.model.add_constraint(
            std::move(cut), Relation::kLessEqual,
            static_cast<double>(component.size()) - 1.0,
            "cycle_cut(" + std::to_string(cut_counter++) + ")");
        added = true;
      }
    }
    if (!added) return plan;
    warm = Assignment();  // the old incumbent may violate the new cuts
  }
}

PlanReport validate_plan(const RouteNetwork& network, const Hand& hand,
                         const RoutePlan& plan) {
  check_hand(network, hand);
  PlanReport report;
  report.terminals_ok = true;
  report.interiors_ok = true;
  report.connected_ok = true;
  report.extraneous_cycles.resize(hand.cards.size());

  int trains = 0;
  for (int e : plan.claimed) trains += network.edges[e].length;
  report.budget_ok = trains <= hand.budget;

  std::vector<bool> used(network.edges.size(), false);
  for (size_t k = 0; k < hand.cards.size(); ++k) {
    std::vector<int> degree(network.cities.size(), 0);
    for (int e : plan.card_edges[k]) {
      used[e] = true;
      ++degree[network.edges[e].u];
      ++degree[network.edges[e].v];
    }
    int alpha = hand.cards[k].alpha, beta = hand.cards[k].beta;
    if (degree[alpha] != 1 || degree[beta] != 1) report.terminals_ok = false;
    for (size_t i = 0; i < network.cities.size(); ++i) {
      if (static_cast<int>(i) == alpha || static_cast<int>(i) == beta)
        continue;
      if (degree[i] != 0 && degree[i] != 2) report.interiors_ok = false;
    }
    bool connected = false;
    for (const auto& component :
         support_components(network, plan.card_edges[k])) {
      bool has_alpha = false, has_beta = false;
      for (int e : component) {
        if (network.edges[e].u == alpha || network.edges[e].v == alpha)
          has_alpha = true;
        if (network.edges[e].u == beta || network.edges[e].v == beta)
          has_beta = true;
      }
      if (has_alpha && has_beta) connected = true;
      if (!has_alpha && !has_beta)
        report.extraneous_cycles[k].push_back(component);
    }
    if (!connected) report.connected_ok = false;
  }
  for (int e : plan.claimed)
    if (!used[e]) report.extra_claimed.push_back(e);
  return report;
}

}  // namespace bip::ttr
