#include "evoflow/alphabet.hpp"

#include <stdexcept>

namespace evoflow {

Alphabet::Alphabet(std::string tokens, char gap) : tokens_(std::move(tokens)), gap_(gap) {
  if (tokens_.size() < 2) throw std::invalid_argument("Alphabet: need at least 2 tokens");
  lut_.fill(-1);
  for (size_t i = 0; i < tokens_.size(); ++i) {
    const auto c = static_cast<unsigned char>(tokens_[i]);
    if (lut_[c] != -1) throw std::invalid_argument("Alphabet: duplicate token");
    lut_[c] = int(i);
  }
  if (lut_[static_cast<unsigned char>(gap_)] != -1)
    throw std::invalid_argument("Alphabet: gap symbol collides with a token");
}

AlphabetPtr Alphabet::amino20() {
  static const AlphabetPtr instance = std::make_shared<Alphabet>("ARNDCQEGHILKMFPSTWYV", '-');
  return instance;
}

AlphabetPtr Alphabet::make(std::string tokens, char gap) {
  return std::make_shared<Alphabet>(std::move(tokens), gap);
}

int Alphabet::index_of(char c) const {
  const int idx = try_index(c);
  if (idx < 0) throw std::invalid_argument(std::string("Alphabet: unknown symbol '") + c + "'");
  return idx;
}

Sequence::Sequence(AlphabetPtr ab, std::vector<int> sym)
    : alphabet(std::move(ab)), symbols(std::move(sym)) {
  for (int s : symbols)
    if (s < 0 || s >= alphabet->size())
      throw std::invalid_argument("Sequence: token index out of range");
}

Sequence Sequence::from_string(const AlphabetPtr& ab, std::string_view s) {
  std::vector<int> sym;
  sym.reserve(s.size());
  for (char c : s) sym.push_back(ab->index_of(c));
  return Sequence(ab, std::move(sym));
}

std::string Sequence::str() const {
  std::string out;
  out.reserve(symbols.size());
  for (int s : symbols) out.push_back(alphabet->token(s));
  return out;
}

bool same_alphabet(const Sequence& a, const Sequence& b) {
  if (a.alphabet == b.alphabet) return true;
  return a.alphabet && b.alphabet && *a.alphabet == *b.alphabet;
}

void require_same_alphabet(const Sequence& a, const Sequence& b, const char* where) {
  if (!same_alphabet(a, b))
    throw std::invalid_argument(std::string(where) + ": alphabet mismatch");
}

std::string augmented_str(const Alphabet& ab, const std::vector<int>& z) {
  std::string out;
  out.reserve(z.size());
  for (int s : z) out.push_back(s == kGap ? ab.gap_symbol() : ab.token(s));
  return out;
}

}  // namespace evoflow
