#pragma once

// Shared fixtures and independent oracles. Everything here recomputes
// results by enumeration so the tests never trust the code under test.

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "bip/cipher.hpp"
#include "bip/cipher_model.hpp"
#include "bip/model.hpp"
#include "bip/ttr.hpp"

namespace helpers {

using namespace bip;

// The two-product planning example: maximize 5 xA + 7 xB subject to the
// two inventory rows. Variables are nominally binary; evaluate() is
// constraint-only, so integer points can still be scored against it.
inline LinearModel production_display_model() {
  LinearModel m(Sense::kMaximize);
  VarId xa = m.add_binary("xA");
  VarId xb = m.add_binary("xB");
  LinearExpr obj;
  obj.add(xa, 5.0).add(xb, 7.0);
  m.set_objective(obj);
  LinearExpr c;
  c.add(xa, 3.0).add(xb, 2.0);
  m.add_constraint(std::move(c), Relation::kLessEqual, 100.0, "inventory C");
  LinearExpr d;
  d.add(xa, 5.0).add(xb, 8.0);
  m.add_constraint(std::move(d), Relation::kLessEqual, 50.0, "inventory D");
  return m;
}

// The same feasible set over a 0-1 vocabulary: xA as six bits, xB as
// three. Solving this recovers the integer optimum.
struct ExpandedProduction {
  LinearModel model{Sense::kMaximize};
  std::vector<VarId> xa_bits, xb_bits;

  double xa(const Assignment& a) const {
    double v = 0;
    for (size_t i = 0; i < xa_bits.size(); ++i)
      v += std::ldexp(a.get(xa_bits[i]), static_cast<int>(i));
    return v;
  }
  double xb(const Assignment& a) const {
    double v = 0;
    for (size_t i = 0; i < xb_bits.size(); ++i)
      v += std::ldexp(a.get(xb_bits[i]), static_cast<int>(i));
    return v;
  }
};

inline ExpandedProduction production_expanded_model() {
  ExpandedProduction out;
  LinearExpr obj, c, d;
  for (int i = 0; i < 6; ++i) {
    VarId v = out.model.add_binary("xA_bit" + std::to_string(i));
    out.xa_bits.push_back(v);
    double w = std::ldexp(1.0, i);
    obj.add(v, 5.0 * w);
    c.add(v, 3.0 * w);
    d.add(v, 5.0 * w);
  }
  for (int i = 0; i < 3; ++i) {
    VarId v = out.model.add_binary("xB_bit" + std::to_string(i));
    out.xb_bits.push_back(v);
    double w = std::ldexp(1.0, i);
    obj.add(v, 7.0 * w);
    c.add(v, 2.0 * w);
    d.add(v, 8.0 * w);
  }
  out.model.set_objective(obj);
  out.model.add_constraint(std::move(c), Relation::kLessEqual, 100.0,
                           "inventory C");
  out.model.add_constraint(std::move(d), Relation::kLessEqual, 50.0,
                           "inventory D");
  return out;
}

struct BruteForce {
  bool any = false;
  double best = 0.0;
  Assignment best_assignment;
  long feasible_count = 0;
  long at_target = 0;
};

// Exhaustive scan over every 0-1 assignment (n <= ~22).
inline BruteForce brute_force(const LinearModel& model,
                              std::optional<double> target = std::nullopt) {
  BruteForce out;
  int n = model.num_vars();
  for (long bits = 0; bits < (1L << n); ++bits) {
    Assignment a(n);
    for (int j = 0; j < n; ++j) a.set(VarId{j}, (bits >> j) & 1 ? 1.0 : 0.0);
    Evaluation ev = model.evaluate(a);
    if (!ev.feasible) continue;
    ++out.feasible_count;
    if (target.has_value() && std::abs(ev.objective - *target) <= 1e-6)
      ++out.at_target;
    bool better = model.sense() == Sense::kMaximize
                      ? ev.objective > out.best + 1e-12
                      : ev.objective < out.best - 1e-12;
    if (!out.any || better) {
      out.any = true;
      out.best = ev.objective;
      out.best_assignment = a;
    }
  }
  return out;
}

// Random 0-1 model with small integer data; constraints of every relation.
inline LinearModel random_model(std::mt19937_64& rng, int max_vars,
                                int max_cons) {
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  int n = pick(1, max_vars);
  int m = pick(0, max_cons);
  LinearModel model(pick(0, 1) == 0 ? Sense::kMaximize : Sense::kMinimize);
  std::vector<VarId> vars;
  for (int j = 0; j < n; ++j)
    vars.push_back(model.add_binary("v" + std::to_string(j)));
  LinearExpr obj;
  for (int j = 0; j < n; ++j) {
    int c = pick(-6, 6);
    if (c != 0) obj.add(vars[j], c);
  }
  model.set_objective(obj);
  for (int i = 0; i < m; ++i) {
    LinearExpr expr;
    int nonzero = 0;
    for (int j = 0; j < n; ++j) {
      int c = pick(-4, 4);
      if (pick(0, 2) != 0) c = 0;  // sparse-ish rows
      if (c != 0) {
        expr.add(vars[j], c);
        ++nonzero;
      }
    }
    if (nonzero == 0) expr.add(vars[pick(0, n - 1)], 1.0);
    int r = pick(0, 5);
    Relation rel = r == 0   ? Relation::kGreaterEqual
                   : r == 1 ? Relation::kEqual
                            : Relation::kLessEqual;
    int rhs = pick(-3, 6);
    model.add_constraint(std::move(expr), rel, rhs,
                         "c" + std::to_string(i));
  }
  return model;
}

// LP optimum of a model with exactly two structural variables over the box
// [0,ux] x [0,uy], by enumerating candidate vertices: intersections of
// constraint boundary lines and box edges.
inline std::optional<double> two_var_lp_optimum(const LinearModel& model,
                                                double ux, double uy) {
  struct Line {
    double a, b, c;  // a x + b y = c
  };
  std::vector<Line> lines = {{1, 0, 0}, {1, 0, ux}, {0, 1, 0}, {0, 1, uy}};
  for (const Constraint& con : model.constraints()) {
    double a = 0, b = 0;
    for (const auto& t : con.expr.terms()) {
      if (t.var.value == 0) a = t.coeff;
      if (t.var.value == 1) b = t.coeff;
    }
    lines.push_back({a, b, con.rhs - con.expr.constant()});
  }
  auto feasible = [&](double x, double y) {
    if (x < -1e-9 || x > ux + 1e-9 || y < -1e-9 || y > uy + 1e-9)
      return false;
    for (const Constraint& con : model.constraints()) {
      double lhs = con.expr.constant();
      for (const auto& t : con.expr.terms())
        lhs += t.coeff * (t.var.value == 0 ? x : y);
      switch (con.relation) {
        case Relation::kLessEqual:
          if (lhs > con.rhs + 1e-9) return false;
          break;
        case Relation::kGreaterEqual:
          if (lhs < con.rhs - 1e-9) return false;
          break;
        case Relation::kEqual:
          if (std::abs(lhs - con.rhs) > 1e-9) return false;
          break;
      }
    }
    return true;
  };
  double oa = 0, ob = 0;
  for (const auto& t : model.objective().terms()) {
    if (t.var.value == 0) oa = t.coeff;
    if (t.var.value == 1) ob = t.coeff;
  }
  std::optional<double> best;
  for (size_t i = 0; i < lines.size(); ++i) {
    for (size_t j = i + 1; j < lines.size(); ++j) {
      double det = lines[i].a * lines[j].b - lines[j].a * lines[i].b;
      if (std::abs(det) < 1e-12) continue;
      double x = (lines[i].c * lines[j].b - lines[j].c * lines[i].b) / det;
      double y = (lines[i].a * lines[j].c - lines[j].a * lines[i].c) / det;
      if (!feasible(x, y)) continue;
      double z = oa * x + ob * y + model.objective().constant();
      bool better = model.sense() == Sense::kMaximize ? !best || z > *best
                                                      : !best || z < *best;
      if (better) best = z;
    }
  }
  return best;
}

// Exhaustive optimum of a route-allocation instance over all claim
// subsets: a subset is feasible when it fits the budget and joins every
// card's terminals.
inline std::optional<int> ttr_brute_force(const ttr::RouteNetwork& network,
                                          const ttr::Hand& hand) {
  int ne = static_cast<int>(network.edges.size());
  std::optional<int> best;
  for (long bits = 0; bits < (1L << ne); ++bits) {
    int trains = 0, points = 0;
    for (int e = 0; e < ne; ++e) {
      if (bits >> e & 1) {
        trains += network.edges[e].length;
        points += network.edges[e].points;
      }
    }
    if (trains > hand.budget) continue;
    bool all_connected = true;
    for (const ttr::DestinationCard& card : hand.cards) {
      std::vector<int> stack{card.alpha};
      std::vector<bool> seen(network.cities.size(), false);
      seen[card.alpha] = true;
      while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        for (int e = 0; e < ne; ++e) {
          if (!(bits >> e & 1)) continue;
          const ttr::Edge& edge = network.edges[e];
          if (edge.u != i && edge.v != i) continue;
          int j = edge.u == i ? edge.v : edge.u;
          if (!seen[j]) {
            seen[j] = true;
            stack.push_back(j);
          }
        }
      }
      if (!seen[card.beta]) {
        all_connected = false;
        break;
      }
    }
    if (!all_connected) continue;
    if (!best || points > *best) best = points;
  }
  return best;
}

// Random row-stochastic corpus for a reduced alphabet.
inline cipher::NGramTable random_corpus(int m, std::mt19937_64& rng) {
  auto count = [&] { return 1.0 + static_cast<double>(rng() % 1000); };
  std::vector<double> uni(m), bi(m * m);
  for (auto& v : uni) v = count();
  for (auto& v : bi) v = (rng() % 4 == 0) ? 0.0 : count();
  return cipher::ngrams_from_counts(m, uni, bi);
}

// Markov sample from the corpus bigram chain, seeded.
inline cipher::NormalizedText sample_text(const cipher::NGramTable& corpus,
                                          int length,
                                          std::mt19937_64& rng) {
  std::vector<std::uint8_t> letters;
  auto draw = [&](const double* dist) {
    double u = static_cast<double>(rng() % 1000000) / 1000000.0;
    double acc = 0.0;
    for (int i = 0; i < corpus.m; ++i) {
      acc += dist[i];
      if (u < acc) return static_cast<std::uint8_t>(i);
    }
    return static_cast<std::uint8_t>(corpus.m - 1);
  };
  letters.push_back(draw(corpus.unigram.data()));
  while (static_cast<int>(letters.size()) < length)
    letters.push_back(draw(&corpus.bigram[letters.back() * corpus.m]));
  return cipher::NormalizedText(std::move(letters), corpus.m);
}

// Exhaustive decipherment optimum over every key of the alphabet.
inline double exhaustive_key_optimum(const cipher::DeciphermentInstance& inst) {
  int m = inst.ciphertext.alphabet_size();
  std::vector<std::uint8_t> image(m);
  for (int i = 0; i < m; ++i) image[i] = static_cast<std::uint8_t>(i);
  double best = std::numeric_limits<double>::infinity();
  do {
    cipher::MascKey key{std::vector<std::uint8_t>(image)};
    best = std::min(best, cipher::key_objective(inst, key));
  } while (std::next_permutation(image.begin(), image.end()));
  return best;
}

}  // namespace helpers
