#include "bip/ttr_sweep.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "bip/parallel.hpp"

namespace bip::ttr {
namespace {

std::vector<std::vector<int>> k_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return out;
  for (;;) {
    out.push_back(idx);
    int j = k - 1;
    while (j >= 0 && idx[j] == n - (k - j)) --j;
    if (j < 0) break;
    ++idx[j];
    for (int t = j + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
  return out;
}

}  // namespace

SubsetSweepResult sweep_subsets(const RouteNetwork& network,
                                const std::vector<DestinationCard>& pool,
                                int k, int workers,
                                const SolveOptions& solver) {
  if (k != 3 && k != 4) throw ModelError("subset size must be 3 or 4");
  std::vector<std::vector<int>> hands = k_subsets(
      static_cast<int>(pool.size()), k);

  struct Partial {
    std::map<std::pair<int, int>, long> pair_hits;
    long solved = 0;
    long infeasible = 0;
  };
  const size_t chunk = 8;
  size_t num_tasks = (hands.size() + chunk - 1) / chunk;
  std::vector<Partial> parts(num_tasks);

  parallel_tasks(num_tasks, workers, [&](size_t t) {
    size_t begin = t * chunk;
    size_t end = std::min(hands.size(), begin + chunk);
    for (size_t h = begin; h < end; ++h) {
      Hand hand;
      for (int i : hands[h]) hand.cards.push_back(pool[i]);
      try {
        SolveHandOptions options;
        options.solver = solver;
        RoutePlan plan = solve_hand(network, hand, options);
        ++parts[t].solved;
        std::map<std::pair<int, int>, bool> seen;
        for (int e : plan.claimed)
          seen[{network.edges[e].u, network.edges[e].v}] = true;
        for (const auto& [pair, _] : seen) ++parts[t].pair_hits[pair];
      } catch (const InfeasibleError&) {
        ++parts[t].infeasible;
      }
    }
  });

  SubsetSweepResult result;
  result.hands_total = static_cast<long>(hands.size());
  std::map<std::pair<int, int>, long> totals;
  for (const Partial& p : parts) {
    result.hands_solved += p.solved;
    result.hands_infeasible += p.infeasible;
    for (const auto& [pair, hits] : p.pair_hits) totals[pair] += hits;
  }
  for (const auto& [pair, hits] : totals) result.total_appearances += hits;
  for (const auto& [pair, hits] : totals) {
    PairUsage u;
    u.u = pair.first;
    u.v = pair.second;
    u.appearances = hits;
    u.percentage = result.total_appearances == 0
                       ? 0.0
                       : 100.0 * hits / result.total_appearances;
    for (const Edge& e : network.edges)
      if (e.u == u.u && e.v == u.v) u.length = std::max(u.length, e.length);
    result.usage.push_back(u);
  }
  std::stable_sort(result.usage.begin(), result.usage.end(),
                   [](const PairUsage& a, const PairUsage& b) {
                     if (a.appearances != b.appearances)
                       return a.appearances > b.appearances;
                     return std::pair(a.u, a.v) < std::pair(b.u, b.v);
                   });
  return result;
}

void write_usage_csv(std::ostream& out, const RouteNetwork& network,
                     const SubsetSweepResult& result) {
  out << "edge,appearances,percentage\n";
  for (const PairUsage& u : result.usage) {
    out << network.cities[u.u] << "--" << network.cities[u.v] << ","
        << u.appearances << "," << u.percentage << "\n";
  }
}

}  // namespace bip::ttr
