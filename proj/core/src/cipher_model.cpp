#include "bip/cipher_model.hpp"

#include <cmath>

namespace bip::cipher {
namespace {

char letter(int i) { return static_cast<char>('a' + i); }

// Objective coefficient of link(i, p, r).
double link_coeff(const DeciphermentInstance& inst, int i, int p, int r) {
  const auto& ct = inst.ciphertext.letters();
  if (inst.kind == MascModelKind::kRk)
    return -std::log(inst.corpus.cond(p, r));
  return std::abs(inst.corpus.cond(p, r) -
                  inst.stats.cond(ct[i], ct[i + 1]));
}

// Objective coefficient of key(p, q).
double key_coeff(const DeciphermentInstance& inst, int p, int q) {
  double c = 0.0;
  if (inst.kind == MascModelKind::kUr)
    c = std::abs(inst.corpus.uni(p) - inst.stats.uni(q));
  if (inst.kind == MascModelKind::kRk && inst.rk_start_term &&
      q == inst.ciphertext.letters().front())
    c = -std::log(inst.corpus.uni(p));
  return c;
}

}  // namespace

MascModel build_masc_model(const DeciphermentInstance& inst) {
  const int m = inst.ciphertext.alphabet_size();
  const int n = inst.ciphertext.size();
  const auto& ct = inst.ciphertext.letters();

  MascModel out{LinearModel(Sense::kMinimize), m, n};
  LinearModel& model = out.model;
  LinearExpr objective;

  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      VarId v = model.add_binary(std::string("key(") + letter(p) + "," +
                                 letter(q) + ")");
      double c = key_coeff(inst, p, q);
      if (c != 0.0) objective.add(v, c);
    }
  }
  for (int i = 0; i < n - 1; ++i) {
    for (int p = 0; p < m; ++p) {
      for (int r = 0; r < m; ++r) {
        VarId v = model.add_binary("link(" + std::to_string(i + 1) + "," +
                                   letter(p) + "," + letter(r) + ")");
        double c = link_coeff(inst, i, p, r);
        if (c != 0.0) objective.add(v, c);
      }
    }
  }
  model.set_objective(std::move(objective));

  for (int p = 0; p < m; ++p) {
    LinearExpr row;
    for (int q = 0; q < m; ++q) row.add(out.key_var(p, q), 1.0);
    model.add_constraint(std::move(row), Relation::kEqual, 1.0,
                         std::string("key_row(") + letter(p) + ")");
  }
  for (int q = 0; q < m; ++q) {
    LinearExpr col;
    for (int p = 0; p < m; ++p) col.add(out.key_var(p, q), 1.0);
    model.add_constraint(std::move(col), Relation::kEqual, 1.0,
                         std::string("key_col(") + letter(q) + ")");
  }
  // Flow conservation between consecutive link layers.
  for (int i = 0; i + 1 < n - 1; ++i) {
    for (int r = 0; r < m; ++r) {
      LinearExpr flow;
      for (int p = 0; p < m; ++p) flow.add(out.link_var(i, p, r), 1.0);
      for (int p = 0; p < m; ++p) flow.add(out.link_var(i + 1, r, p), -1.0);
      model.add_constraint(std::move(flow), Relation::kEqual, 0.0,
                           "flow(" + std::to_string(i + 1) + "," + letter(r) +
                               ")");
    }
  }
  // Links entering position i+1 match the key of ciphertext letter c_{i+1}.
  for (int i = 0; i < n - 1; ++i) {
    for (int p = 0; p < m; ++p) {
      LinearExpr expr;
      for (int r = 0; r < m; ++r) expr.add(out.link_var(i, r, p), 1.0);
      expr.add(out.key_var(p, ct[i + 1]), -1.0);
      model.add_constraint(std::move(expr), Relation::kEqual, 0.0,
                           "keylink(" + std::to_string(i + 1) + "," +
                               letter(p) + ")");
    }
  }
  // First-position anchor: links leaving position 1 match the key of c_1.
  for (int p = 0; p < m; ++p) {
    LinearExpr expr;
    for (int r = 0; r < m; ++r) expr.add(out.link_var(0, p, r), 1.0);
    expr.add(out.key_var(p, ct[0]), -1.0);
    model.add_constraint(std::move(expr), Relation::kEqual, 0.0,
                         std::string("anchor(") + letter(p) + ")");
  }
  return out;
}

double key_objective(const DeciphermentInstance& inst, const MascKey& key) {
  const int m = inst.ciphertext.alphabet_size();
  if (key.size() != m) throw ModelError("key size does not match alphabet");
  const auto& ct = inst.ciphertext.letters();
  double total = 0.0;
  if (inst.kind == MascModelKind::kUr) {
    for (int p = 0; p < m; ++p)
      total += std::abs(inst.corpus.uni(p) - inst.stats.uni(key.encrypt(p)));
  } else if (inst.rk_start_term) {
    total += -std::log(inst.corpus.uni(key.decrypt(ct[0])));
  }
  for (size_t i = 0; i + 1 < ct.size(); ++i) {
    int p = key.decrypt(ct[i]);
    int r = key.decrypt(ct[i + 1]);
    if (inst.kind == MascModelKind::kRk) {
      total += -std::log(inst.corpus.cond(p, r));
    } else {
      total += std::abs(inst.corpus.cond(p, r) -
                        inst.stats.cond(ct[i], ct[i + 1]));
    }
  }
  return total;
}

Assignment induced_assignment(const MascModel& model,
                              const DeciphermentInstance& inst,
                              const MascKey& key) {
  const int m = model.m;
  const auto& ct = inst.ciphertext.letters();
  Assignment a(model.model.num_vars());
  for (int j = 0; j < model.model.num_vars(); ++j) a.set(VarId{j}, 0.0);
  for (int p = 0; p < m; ++p) a.set(model.key_var(p, key.encrypt(p)), 1.0);
  for (int i = 0; i + 1 < static_cast<int>(ct.size()); ++i) {
    int p = key.decrypt(ct[i]);
    int r = key.decrypt(ct[i + 1]);
    a.set(model.link_var(i, p, r), 1.0);
  }
  return a;
}

double shift_cost(const NormalizedText& ciphertext, const NGramTable& corpus,
                  int k) {
  DeciphermentInstance inst = DeciphermentInstance::make(
      ciphertext, corpus, MascModelKind::kUr, false);
  return key_objective(inst, MascKey::shift(ciphertext.alphabet_size(), k));
}

LinearModel build_shift_model(const NormalizedText& ciphertext,
                              const NGramTable& corpus) {
  const int m = ciphertext.alphabet_size();
  DeciphermentInstance inst = DeciphermentInstance::make(
      ciphertext, corpus, MascModelKind::kUr, false);
  LinearModel model(Sense::kMinimize);
  LinearExpr objective;
  std::vector<VarId> vars;
  for (int k = 0; k < m; ++k) {
    VarId v = model.add_binary("z(" + std::to_string(k) + ")");
    vars.push_back(v);
    objective.add(v, key_objective(inst, MascKey::shift(m, k)));
  }
  model.set_objective(std::move(objective));
  model.logic_count(vars, LinearModel::CountMode::kExactly, 1);
  return model;
}

int break_shift(const NormalizedText& ciphertext, const NGramTable& corpus) {
  const int m = ciphertext.alphabet_size();
  int best_k = 0;
  double best = shift_cost(ciphertext, corpus, 0);
  for (int k = 1; k < m; ++k) {
    double c = shift_cost(ciphertext, corpus, k);
    if (c < best - 1e-12) {
      best = c;
      best_k = k;
    }
  }
  return best_k;
}

}  // namespace bip::cipher
