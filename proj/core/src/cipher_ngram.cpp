#include <cmath>
#include <fstream>
#include <sstream>

#include "bip/cipher.hpp"

namespace bip::cipher {
namespace {

void floor_and_normalize(std::vector<double>& probs, double eps) {
  double total = 0.0;
  for (double p : probs) total += p;
  if (total <= 0.0) {
    // Nothing observed: fall back to uniform.
    for (double& p : probs) p = 1.0 / probs.size();
    return;
  }
  double floored_total = 0.0;
  for (double& p : probs) {
    p = std::max(p / total, eps);
    floored_total += p;
  }
  for (double& p : probs) p /= floored_total;
}

std::vector<std::pair<std::string, double>> read_counts(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open n-gram file " + path);
  std::vector<std::pair<std::string, double>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
    std::istringstream ls(line);
    std::string gram;
    double count;
    if (!(ls >> gram)) continue;
    if (!(ls >> count) || count < 0)
      throw ModelError("bad count in " + path + " line " +
                       std::to_string(line_no));
    out.push_back({gram, count});
  }
  if (out.empty()) throw ModelError("empty n-gram file " + path);
  return out;
}

int letter_of(char c, int m, const std::string& path) {
  if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  if (c < 'a' || c >= 'a' + m)
    throw ModelError("gram outside alphabet in " + path);
  return c - 'a';
}

}  // namespace

NGramTable ngrams_from_counts(int m, const std::vector<double>& uni_counts,
                              const std::vector<double>& bi_counts,
                              double eps) {
  if (static_cast<int>(uni_counts.size()) != m ||
      static_cast<int>(bi_counts.size()) != m * m)
    throw ModelError("count vectors do not match the alphabet size");
  NGramTable t;
  t.m = m;
  t.eps = eps;
  t.unigram = uni_counts;
  floor_and_normalize(t.unigram, eps);
  t.bigram.assign(m * m, 0.0);
  for (int p = 0; p < m; ++p) {
    std::vector<double> row(bi_counts.begin() + p * m,
                            bi_counts.begin() + (p + 1) * m);
    floor_and_normalize(row, eps);
    for (int r = 0; r < m; ++r) t.bigram[p * m + r] = row[r];
  }
  return t;
}

NGramTable load_ngram_files(const std::string& unigram_path,
                            const std::string& bigram_path, double eps,
                            int alphabet_size) {
  int m = alphabet_size;
  std::vector<double> uni(m, 0.0), bi(m * m, 0.0);
  for (const auto& [gram, count] : read_counts(unigram_path)) {
    if (gram.size() != 1)
      throw ModelError("expected 1-grams in " + unigram_path);
    uni[letter_of(gram[0], m, unigram_path)] += count;
  }
  for (const auto& [gram, count] : read_counts(bigram_path)) {
    if (gram.size() != 2)
      throw ModelError("expected 2-grams in " + bigram_path);
    int p = letter_of(gram[0], m, bigram_path);
    int r = letter_of(gram[1], m, bigram_path);
    bi[p * m + r] += count;
  }
  NGramTable t = ngrams_from_counts(m, uni, bi, eps);
  t.source = unigram_path + " + " + bigram_path;
  return t;
}

NGramTable load_ngrams(const std::string& dir, double eps) {
  return load_ngram_files(dir + "/english_1grams.txt",
                          dir + "/english_2grams.txt", eps);
}

CipherStats cipher_stats(const NormalizedText& text) {
  CipherStats s;
  s.m = text.alphabet_size();
  s.n = text.size();
  s.unigram.assign(s.m, 0.0);
  s.bigram_cond.assign(s.m * s.m, 0.0);
  s.row_present.assign(s.m, false);
  s.uni_counts.assign(s.m, 0);
  s.bi_counts.assign(s.m * s.m, 0);
  const auto& letters = text.letters();
  for (std::uint8_t l : letters) ++s.uni_counts[l];
  for (size_t i = 0; i + 1 < letters.size(); ++i)
    ++s.bi_counts[letters[i] * s.m + letters[i + 1]];
  if (s.n > 0) {
    for (int q = 0; q < s.m; ++q)
      s.unigram[q] = static_cast<double>(s.uni_counts[q]) / s.n;
  }
  for (int c = 0; c < s.m; ++c) {
    long row_total = 0;
    for (int cn = 0; cn < s.m; ++cn) row_total += s.bi_counts[c * s.m + cn];
    if (row_total == 0) continue;  // never occurs non-terminally
    s.row_present[c] = true;
    for (int cn = 0; cn < s.m; ++cn)
      s.bigram_cond[c * s.m + cn] =
          static_cast<double>(s.bi_counts[c * s.m + cn]) / row_total;
  }
  return s;
}

DeciphermentInstance DeciphermentInstance::make(NormalizedText ciphertext,
                                                NGramTable corpus,
                                                MascModelKind kind,
                                                bool rk_start_term) {
  if (ciphertext.size() < 2)
    throw ModelError("decipherment needs at least two letters");
  if (corpus.m != ciphertext.alphabet_size())
    throw ModelError("corpus and ciphertext alphabets differ");
  DeciphermentInstance inst;
  inst.stats = cipher_stats(ciphertext);
  inst.ciphertext = std::move(ciphertext);
  inst.corpus = std::move(corpus);
  inst.kind = kind;
  inst.rk_start_term = rk_start_term;
  return inst;
}

}  // namespace bip::cipher
