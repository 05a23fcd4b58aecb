#include "bip/cipher_solve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace bip::cipher {
namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimum-cost perfect matching on a dense square matrix (shortest
// augmenting paths with potentials).
double hungarian(const std::vector<double>& a, int n) {
  if (n == 0) return 0.0;
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = match[j0], j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double cost = 0.0;
  for (int j = 1; j <= n; ++j)
    if (match[j] != 0) cost += a[(match[j] - 1) * n + (j - 1)];
  return cost;
}

struct ObservedBigram {
  int c, cn;      // ciphertext letters
  long count;
  double floor;   // lower bound of pair cost over any decipherment
};

// Cost model shared by the hill climber and the exact search:
//   f(sigma) = sum_q key_cost[q][sigma(q)]
//            + sum_bigrams count * pair_cost(c, cn, sigma(c), sigma(cn)).
struct CostTables {
  int m = 0;
  MascModelKind kind;
  const DeciphermentInstance* inst;
  std::vector<double> key_cost;  // [q * m + p]
  std::vector<double> nlog;      // RK: -log P(r|p)
  std::vector<ObservedBigram> bigrams;
  std::vector<std::vector<int>> incident;  // cipher letter -> bigram ids

  explicit CostTables(const DeciphermentInstance& instance)
      : m(instance.ciphertext.alphabet_size()),
        kind(instance.kind),
        inst(&instance) {
    const CipherStats& stats = instance.stats;
    const NGramTable& corpus = instance.corpus;
    key_cost.assign(m * m, 0.0);
    for (int q = 0; q < m; ++q) {
      for (int p = 0; p < m; ++p) {
        double c = 0.0;
        if (kind == MascModelKind::kUr)
          c = std::abs(corpus.uni(p) - stats.uni(q));
        else if (instance.rk_start_term &&
                 q == instance.ciphertext.letters().front())
          c = -std::log(corpus.uni(p));
        key_cost[q * m + p] = c;
      }
    }
    if (kind == MascModelKind::kRk) {
      nlog.assign(m * m, 0.0);
      for (int p = 0; p < m; ++p)
        for (int r = 0; r < m; ++r)
          nlog[p * m + r] = -std::log(corpus.cond(p, r));
    }
    std::vector<double> sorted_cond(corpus.bigram);
    std::sort(sorted_cond.begin(), sorted_cond.end());
    double min_nlog =
        kind == MascModelKind::kRk
            ? -std::log(sorted_cond.back())
            : 0.0;
    incident.resize(m);
    for (int c = 0; c < m; ++c) {
      for (int cn = 0; cn < m; ++cn) {
        long cnt = stats.bi_counts[c * m + cn];
        if (cnt == 0) continue;
        ObservedBigram b{c, cn, cnt, 0.0};
        if (kind == MascModelKind::kRk) {
          b.floor = cnt * min_nlog;
        } else {
          double target = stats.cond(c, cn);
          auto it = std::lower_bound(sorted_cond.begin(), sorted_cond.end(),
                                     target);
          double best = kInf;
          if (it != sorted_cond.end()) best = std::min(best, *it - target);
          if (it != sorted_cond.begin())
            best = std::min(best, target - *(it - 1));
          b.floor = cnt * best;
        }
        int id = static_cast<int>(bigrams.size());
        bigrams.push_back(b);
        incident[c].push_back(id);
        if (cn != c) incident[cn].push_back(id);
      }
    }
  }

  double pair_cost(int c, int cn, int p, int r) const {
    if (kind == MascModelKind::kRk) return nlog[p * m + r];
    return std::abs(inst->corpus.cond(p, r) - inst->stats.cond(c, cn));
  }

  // Full objective of a complete decipherment map (cipher -> plain).
  double eval(const std::vector<int>& sigma) const {
    double total = 0.0;
    for (int q = 0; q < m; ++q) total += key_cost[q * m + sigma[q]];
    for (const ObservedBigram& b : bigrams)
      total += b.count * pair_cost(b.c, b.cn, sigma[b.c], sigma[b.cn]);
    return total;
  }
};

std::vector<int> frequency_start(const DeciphermentInstance& inst) {
  const int m = inst.ciphertext.alphabet_size();
  std::vector<int> ciphers(m), plains(m);
  std::iota(ciphers.begin(), ciphers.end(), 0);
  std::iota(plains.begin(), plains.end(), 0);
  std::stable_sort(ciphers.begin(), ciphers.end(), [&](int a, int b) {
    return inst.stats.uni(a) > inst.stats.uni(b);
  });
  std::stable_sort(plains.begin(), plains.end(), [&](int a, int b) {
    return inst.corpus.uni(a) > inst.corpus.uni(b);
  });
  std::vector<int> sigma(m);
  for (int k = 0; k < m; ++k) sigma[ciphers[k]] = plains[k];
  return sigma;
}

// Best-improvement swap descent until a local minimum.
double descend(const CostTables& tables, std::vector<int>& sigma) {
  const int m = tables.m;
  double current = tables.eval(sigma);
  for (;;) {
    double best_delta = -1e-12;
    int best_a = -1, best_b = -1;
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        std::swap(sigma[a], sigma[b]);
        double candidate = tables.eval(sigma);
        std::swap(sigma[a], sigma[b]);
        double delta = candidate - current;
        if (delta < best_delta) {
          best_delta = delta;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best_a < 0) return current;
    std::swap(sigma[best_a], sigma[best_b]);
    current += best_delta;
  }
}

MascKey key_from_sigma(const std::vector<int>& sigma) {
  std::vector<std::uint8_t> preimage(sigma.size());
  for (size_t q = 0; q < sigma.size(); ++q)
    preimage[q] = static_cast<std::uint8_t>(sigma[q]);
  return MascKey(preimage).inverse();
}

class KeySearch {
 public:
  KeySearch(const DeciphermentInstance& inst, const BreakOptions& options)
      : inst_(inst), tables_(inst), opt_(options), m_(tables_.m) {
    sigma_.assign(m_, -1);
    plain_used_.assign(m_, false);
    order_.resize(m_);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return inst_.stats.uni_counts[a] > inst_.stats.uni_counts[b];
    });
    for (const ObservedBigram& b : tables_.bigrams) pool_ += b.floor;
  }

  BreakResult run() {
    auto t0 = Clock::now();
    if (opt_.solver.time_limit >= 0) {
      has_deadline_ = true;
      deadline_ = t0 + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double>(opt_.solver.time_limit));
    }

    HillClimbResult warm = hill_climb(inst_, opt_.hill_restarts, opt_.seed);
    best_sigma_.resize(m_);
    for (int q = 0; q < m_; ++q) best_sigma_[q] = warm.key.decrypt(q);
    best_obj_ = tables_.eval(best_sigma_);

    dfs(0);

    BreakResult out{key_from_sigma(best_sigma_),
                    masc_apply(inst_.ciphertext, key_from_sigma(best_sigma_),
                               Direction::kDecrypt),
                    {}};
    out.report.status = hit_time_    ? SolveStatus::kTimeLimit
                        : hit_nodes_ ? SolveStatus::kNodeLimit
                                     : SolveStatus::kOptimal;
    out.report.nodes = nodes_;
    out.report.objective = key_objective(inst_, out.key);
    out.report.wall_time =
        std::chrono::duration<double>(Clock::now() - t0).count();
    return out;
  }

 private:
  bool out_of_budget() {
    if (opt_.solver.node_limit >= 0 && nodes_ > opt_.solver.node_limit) {
      hit_nodes_ = true;
      return true;
    }
    if (has_deadline_ && (nodes_ & 255) == 0 && Clock::now() >= deadline_) {
      hit_time_ = true;
      return true;
    }
    return false;
  }

  void assign(int q, int p, double& delta) {
    sigma_[q] = p;
    plain_used_[p] = true;
    delta += tables_.key_cost[q * m_ + p];
    for (int id : tables_.incident[q]) {
      const ObservedBigram& b = tables_.bigrams[id];
      int other = b.c == q ? b.cn : b.c;
      if (other == q) {  // self bigram
        pool_ -= b.floor;
        delta += b.count * tables_.pair_cost(b.c, b.cn, p, p);
      } else if (sigma_[other] >= 0) {
        int pc = b.c == q ? p : sigma_[b.c];
        int pr = b.cn == q ? p : sigma_[b.cn];
        delta += b.count * tables_.pair_cost(b.c, b.cn, pc, pr);
      } else {
        pool_ -= b.floor;
      }
    }
  }

  void unassign(int q, int p) {
    for (int id : tables_.incident[q]) {
      const ObservedBigram& b = tables_.bigrams[id];
      int other = b.c == q ? b.cn : b.c;
      if (other == q || sigma_[other] < 0) pool_ += b.floor;
    }
    sigma_[q] = -1;
    plain_used_[p] = false;
  }

  // Row of the assignment-relaxation matrix for unassigned cipher letter q:
  // the exactly-known share of the cost of deciphering q as p.
  double relax_entry(int q, int p) {
    double v = tables_.key_cost[q * m_ + p];
    for (int id : tables_.incident[q]) {
      const ObservedBigram& b = tables_.bigrams[id];
      if (b.c == b.cn) continue;
      int other = b.c == q ? b.cn : b.c;
      if (sigma_[other] < 0) continue;
      int pc = b.c == q ? p : sigma_[b.c];
      int pr = b.cn == q ? p : sigma_[b.cn];
      v += b.count * tables_.pair_cost(b.c, b.cn, pc, pr);
    }
    return v;
  }

  double lower_bound(std::vector<int>& free_ciphers,
                     std::vector<int>& free_plains,
                     std::vector<double>& matrix) {
    free_ciphers.clear();
    free_plains.clear();
    for (int k = 0; k < m_; ++k) {
      int q = order_[k];
      if (sigma_[q] < 0) free_ciphers.push_back(q);
    }
    for (int p = 0; p < m_; ++p)
      if (!plain_used_[p]) free_plains.push_back(p);
    int k = static_cast<int>(free_ciphers.size());
    matrix.assign(static_cast<size_t>(k) * k, 0.0);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        matrix[i * k + j] = relax_entry(free_ciphers[i], free_plains[j]);
    return committed_ + pool_ + hungarian(matrix, k);
  }

  void dfs(int depth) {
    ++nodes_;
    if (out_of_budget()) return;
    if (depth == m_) {
      if (committed_ < best_obj_ - 1e-12) {
        best_obj_ = committed_;
        best_sigma_ = sigma_;
      }
      return;
    }

    std::vector<int> free_ciphers, free_plains;
    std::vector<double> matrix;
    double bound = lower_bound(free_ciphers, free_plains, matrix);
    if (bound >= best_obj_ - 1e-12) return;

    int q = free_ciphers.front();  // densest unassigned cipher letter
    // Children ordered by their relaxation row, cheapest first.
    struct Child {
      int p;
      double est;
    };
    std::vector<Child> children;
    int k = static_cast<int>(free_plains.size());
    for (int j = 0; j < k; ++j)
      children.push_back({free_plains[j], matrix[j]});
    std::stable_sort(children.begin(), children.end(),
                     [](const Child& a, const Child& b) {
                       return a.est < b.est;
                     });
    for (const Child& child : children) {
      double delta = 0.0;
      assign(q, child.p, delta);
      committed_ += delta;
      if (committed_ + pool_ < best_obj_ - 1e-12) dfs(depth + 1);
      committed_ -= delta;
      unassign(q, child.p);
      if (hit_nodes_ || hit_time_) return;
    }
  }

  const DeciphermentInstance& inst_;
  CostTables tables_;
  BreakOptions opt_;
  int m_;
  std::vector<int> sigma_;
  std::vector<bool> plain_used_;
  std::vector<int> order_;
  double committed_ = 0.0, pool_ = 0.0;
  double best_obj_ = kInf;
  std::vector<int> best_sigma_;
  long nodes_ = 0;
  bool hit_nodes_ = false, hit_time_ = false;
  bool has_deadline_ = false;
  Clock::time_point deadline_;
};

}  // namespace

HillClimbResult hill_climb(const DeciphermentInstance& inst, int restarts,
                           std::uint64_t seed) {
  CostTables tables(inst);
  const int m = tables.m;
  std::mt19937_64 rng(seed);
  std::vector<int> best_sigma;
  double best = kInf;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    std::vector<int> sigma = frequency_start(inst);
    if (r > 0) {
      // Perturb the frequency start with seeded random transpositions.
      for (int t = 0; t < m; ++t) {
        int a = static_cast<int>(rng() % m);
        int b = static_cast<int>(rng() % m);
        std::swap(sigma[a], sigma[b]);
      }
    }
    double obj = descend(tables, sigma);
    if (obj < best - 1e-12) {
      best = obj;
      best_sigma = sigma;
    }
  }
  return {key_from_sigma(best_sigma), best};
}

BreakResult break_masc(const DeciphermentInstance& inst,
                       const BreakOptions& options) {
  KeySearch search(inst, options);
  return search.run();
}

std::vector<BenchRow> run_model_bench(const NGramTable& corpus,
                                      const std::vector<NormalizedText>& texts,
                                      const std::vector<int>& lengths,
                                      int texts_per_length,
                                      const BreakOptions& options) {
  if (static_cast<int>(texts.size()) < texts_per_length)
    throw ModelError("not enough benchmark texts");
  std::vector<BenchRow> rows;
  for (int length : lengths) {
    for (int t = 0; t < texts_per_length; ++t) {
      const NormalizedText& master = texts[t];
      if (master.size() < length)
        throw ModelError("benchmark text shorter than requested length");
      NormalizedText plain = master.prefix(length);
      std::mt19937_64 rng(options.seed * 1000003ULL +
                          static_cast<std::uint64_t>(length) * 131ULL + t);
      MascKey true_key = MascKey::random(corpus.m, rng);
      NormalizedText ciphertext =
          masc_apply(plain, true_key, Direction::kEncrypt);
      for (MascModelKind kind : {MascModelKind::kRk, MascModelKind::kUr}) {
        DeciphermentInstance instance =
            DeciphermentInstance::make(ciphertext, corpus, kind);
        BreakResult result = break_masc(instance, options);
        BenchRow row;
        row.kind = kind;
        row.length = length;
        row.text_index = t;
        row.seconds = result.report.wall_time;
        row.objective = result.report.objective;
        row.status = result.report.status;
        row.pct_chars =
            score(plain, result.plaintext, true_key, result.key).pct_chars;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace bip::cipher
