#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "bip/model.hpp"

namespace bip::cipher {

inline constexpr int kDefaultAlphabet = 26;

// Lowercased letters with everything else stripped, stored as symbols in
// [0, m). With a reduced alphabet only the first m letters survive.
class NormalizedText {
 public:
  NormalizedText() = default;
  NormalizedText(std::vector<std::uint8_t> letters, int alphabet_size);
  static NormalizedText from_utf8(std::string_view raw,
                                  int alphabet_size = kDefaultAlphabet);

  const std::vector<std::uint8_t>& letters() const { return letters_; }
  int size() const { return static_cast<int>(letters_.size()); }
  int alphabet_size() const { return m_; }
  NormalizedText prefix(int length) const;
  std::string to_string() const;

 private:
  std::vector<std::uint8_t> letters_;
  int m_ = kDefaultAlphabet;
};

// A permutation of the alphabet; plaintext letter p encrypts to image(p).
class MascKey {
 public:
  explicit MascKey(std::vector<std::uint8_t> image);
  static MascKey identity(int m);
  static MascKey shift(int m, int k);
  static MascKey random(int m, std::mt19937_64& rng);
  // One letter per alphabet symbol, e.g. "lmnop...jk" for shift 11.
  static MascKey parse(const std::string& text, int m = kDefaultAlphabet);

  int size() const { return static_cast<int>(image_.size()); }
  std::uint8_t encrypt(std::uint8_t p) const { return image_[p]; }
  std::uint8_t decrypt(std::uint8_t q) const { return preimage_[q]; }
  MascKey inverse() const;
  std::string to_string() const;

  friend bool operator==(const MascKey&, const MascKey&) = default;

 private:
  std::vector<std::uint8_t> image_;     // plain -> cipher
  std::vector<std::uint8_t> preimage_;  // cipher -> plain
};

enum class Direction { kEncrypt, kDecrypt };

NormalizedText masc_apply(const NormalizedText& text, const MascKey& key,
                          Direction direction);

// Letterwise shift by k modulo 26 after normalization.
std::string shift_encrypt(std::string_view text, int k);
std::string shift_decrypt(std::string_view text, int k);

// Corpus letter statistics: unigram frequencies E_p and row-stochastic
// conditional bigram frequencies P(r|p), floored at eps and renormalized.
struct NGramTable {
  int m = kDefaultAlphabet;
  std::vector<double> unigram;  // size m, sums to 1
  std::vector<double> bigram;   // row-major m*m, each row sums to 1
  double eps = 0.0;
  std::string source;

  double uni(int p) const { return unigram[p]; }
  double cond(int p, int r) const { return bigram[p * m + r]; }
};

// Count files hold "gram count" lines ("e 12700" / "th 2703"). The
// directory form expects english_1grams.txt and english_2grams.txt.
NGramTable load_ngrams(const std::string& dir, double eps = 1e-6);
NGramTable load_ngram_files(const std::string& unigram_path,
                            const std::string& bigram_path, double eps = 1e-6,
                            int alphabet_size = kDefaultAlphabet);
NGramTable ngrams_from_counts(int m, const std::vector<double>& uni_counts,
                              const std::vector<double>& bi_counts,
                              double eps = 1e-6);

// Observed ciphertext statistics: C_q and C(c'|c), plus the raw counts the
// solvers work from. Rows for letters that never occur non-terminally are
// flagged absent and left at zero.
struct CipherStats {
  int m = kDefaultAlphabet;
  long n = 0;
  std::vector<double> unigram;      // C_q
  std::vector<double> bigram_cond;  // C(c'|c), row-major
  std::vector<bool> row_present;
  std::vector<long> uni_counts;
  std::vector<long> bi_counts;  // row-major

  double uni(int q) const { return unigram[q]; }
  double cond(int c, int cn) const { return bigram_cond[c * m + cn]; }
};

CipherStats cipher_stats(const NormalizedText& text);

enum class MascModelKind { kRk, kUr };

// Everything a decipherment model needs: the ciphertext, its statistics,
// the corpus tables, and which objective to build.
struct DeciphermentInstance {
  NormalizedText ciphertext;
  NGramTable corpus;
  CipherStats stats;
  MascModelKind kind = MascModelKind::kUr;
  bool rk_start_term = true;  // weight the first letter by the unigram table

  static DeciphermentInstance make(NormalizedText ciphertext,
                                   NGramTable corpus, MascModelKind kind,
                                   bool rk_start_term = true);
};

struct Score {
  double pct_chars = 0.0;
  double pct_key_entries = 0.0;
};

Score score(const NormalizedText& plain, const NormalizedText& deciphered,
            const MascKey& true_key, const MascKey& found_key);

}  // namespace bip::cipher
