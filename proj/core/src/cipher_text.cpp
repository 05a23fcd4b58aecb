#include "bip/cipher.hpp"

#include <algorithm>
#include <numeric>

namespace bip::cipher {

NormalizedText::NormalizedText(std::vector<std::uint8_t> letters,
                               int alphabet_size)
    : letters_(std::move(letters)), m_(alphabet_size) {
  if (m_ < 2 || m_ > 26) throw ModelError("alphabet size must be in [2, 26]");
  for (std::uint8_t l : letters_)
    if (l >= m_) throw ModelError("letter outside the alphabet");
}

NormalizedText NormalizedText::from_utf8(std::string_view raw,
                                         int alphabet_size) {
  if (alphabet_size < 2 || alphabet_size > 26)
    throw ModelError("alphabet size must be in [2, 26]");
  std::vector<std::uint8_t> letters;
  letters.reserve(raw.size());
  for (char c : raw) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c >= 'a' && c < 'a' + alphabet_size)
      letters.push_back(static_cast<std::uint8_t>(c - 'a'));
  }
  return NormalizedText(std::move(letters), alphabet_size);
}

NormalizedText NormalizedText::prefix(int length) const {
  if (length > size()) throw ModelError("prefix longer than the text");
  return NormalizedText(
      std::vector<std::uint8_t>(letters_.begin(), letters_.begin() + length),
      m_);
}

std::string NormalizedText::to_string() const {
  std::string out;
  out.reserve(letters_.size());
  for (std::uint8_t l : letters_) out += static_cast<char>('a' + l);
  return out;
}

MascKey::MascKey(std::vector<std::uint8_t> image) : image_(std::move(image)) {
  int m = static_cast<int>(image_.size());
  if (m < 2 || m > 26) throw ModelError("key size must be in [2, 26]");
  preimage_.assign(m, 255);
  for (int p = 0; p < m; ++p) {
    std::uint8_t q = image_[p];
    if (q >= m || preimage_[q] != 255)
      throw ModelError("key must be a bijection on the alphabet");
    preimage_[q] = static_cast<std::uint8_t>(p);
  }
}

MascKey MascKey::identity(int m) {
  std::vector<std::uint8_t> image(m);
  std::iota(image.begin(), image.end(), 0);
  return MascKey(std::move(image));
}

MascKey MascKey::shift(int m, int k) {
  std::vector<std::uint8_t> image(m);
  for (int p = 0; p < m; ++p)
    image[p] = static_cast<std::uint8_t>((p + k) % m);
  return MascKey(std::move(image));
}

MascKey MascKey::random(int m, std::mt19937_64& rng) {
  std::vector<std::uint8_t> image(m);
  std::iota(image.begin(), image.end(), 0);
  for (int i = m - 1; i > 0; --i) {
    int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(image[i], image[j]);
  }
  return MascKey(std::move(image));
}

MascKey MascKey::parse(const std::string& text, int m) {
  NormalizedText t = NormalizedText::from_utf8(text, m);
  if (t.size() != m) throw ModelError("key must list every alphabet letter");
  return MascKey(t.letters());
}

MascKey MascKey::inverse() const { return MascKey(preimage_); }

std::string MascKey::to_string() const {
  std::string out;
  for (std::uint8_t q : image_) out += static_cast<char>('a' + q);
  return out;
}

NormalizedText masc_apply(const NormalizedText& text, const MascKey& key,
                          Direction direction) {
  if (key.size() != text.alphabet_size())
    throw ModelError("key and text alphabets differ");
  std::vector<std::uint8_t> out;
  out.reserve(text.size());
  for (std::uint8_t l : text.letters())
    out.push_back(direction == Direction::kEncrypt ? key.encrypt(l)
                                                   : key.decrypt(l));
  return NormalizedText(std::move(out), text.alphabet_size());
}

std::string shift_encrypt(std::string_view text, int k) {
  if (k < 0 || k >= 26) throw ModelError("shift must be in [0, 26)");
  NormalizedText t = NormalizedText::from_utf8(text);
  return masc_apply(t, MascKey::shift(26, k), Direction::kEncrypt).to_string();
}

std::string shift_decrypt(std::string_view text, int k) {
  if (k < 0 || k >= 26) throw ModelError("shift must be in [0, 26)");
  NormalizedText t = NormalizedText::from_utf8(text);
  return masc_apply(t, MascKey::shift(26, k), Direction::kDecrypt).to_string();
}

Score score(const NormalizedText& plain, const NormalizedText& deciphered,
            const MascKey& true_key, const MascKey& found_key) {
  if (plain.size() != deciphered.size())
    throw ModelError("texts to score differ in length");
  if (true_key.size() != found_key.size())
    throw ModelError("keys to score differ in size");
  Score s;
  long matches = 0;
  for (int i = 0; i < plain.size(); ++i)
    if (plain.letters()[i] == deciphered.letters()[i]) ++matches;
  s.pct_chars = plain.size() == 0 ? 100.0 : 100.0 * matches / plain.size();
  int key_matches = 0;
  for (int p = 0; p < true_key.size(); ++p)
    if (true_key.encrypt(static_cast<std::uint8_t>(p)) ==
        found_key.encrypt(static_cast<std::uint8_t>(p)))
      ++key_matches;
  s.pct_key_entries = 100.0 * key_matches / true_key.size();
  return s;
}

}  // namespace bip::cipher
