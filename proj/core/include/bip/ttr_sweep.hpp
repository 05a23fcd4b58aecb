#pragma once

#include <iosfwd>

#include "bip/ttr.hpp"

namespace bip::ttr {

struct PairUsage {
  int u = 0;  // city indices, u < v
  int v = 0;
  long appearances = 0;   // hands whose optimum claims the pair
  double percentage = 0;  // share of all pair appearances
  int length = 0;         // longest route between the pair
};

struct SubsetSweepResult {
  long hands_total = 0;
  long hands_solved = 0;
  long hands_infeasible = 0;
  long total_appearances = 0;
  std::vector<PairUsage> usage;  // descending appearances, ties by city pair
};

// Solves every k-subset of the card pool and tallies how often each city
// pair is claimed in the optimal plan (parallel routes count once per
// hand).
SubsetSweepResult sweep_subsets(const RouteNetwork& network,
                                const std::vector<DestinationCard>& pool,
                                int k, int workers = 0,
                                const SolveOptions& solver = {});

// CSV: edge,appearances,percentage.
void write_usage_csv(std::ostream& out, const RouteNetwork& network,
                     const SubsetSweepResult& result);

}  // namespace bip::ttr
