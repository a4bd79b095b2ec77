#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace evoflow {

class Alphabet;
using AlphabetPtr = std::shared_ptr<const Alphabet>;

// Token index used in augmented (gap-extended) sequences to mark the gap.
inline constexpr int kGap = -1;

// An ordered set of sequence symbols plus a distinguished gap character that
// is never itself a token. The alphabet is plain data so toy alphabets can be
// constructed in tests and configs.
class Alphabet {
 public:
  Alphabet(std::string tokens, char gap = '-');

  // The 20 standard amino acids in substitution-matrix row order.
  static AlphabetPtr amino20();
  static AlphabetPtr make(std::string tokens, char gap = '-');

  int size() const { return int(tokens_.size()); }
  char gap_symbol() const { return gap_; }
  const std::string& tokens() const { return tokens_; }
  char token(int idx) const { return tokens_.at(size_t(idx)); }

  // Index of a symbol, or -1 if the symbol is not in the alphabet.
  int try_index(char c) const { return lut_[static_cast<unsigned char>(c)]; }
  // Index of a symbol; throws on unknown symbols.
  int index_of(char c) const;

  bool operator==(const Alphabet& other) const {
    return tokens_ == other.tokens_ && gap_ == other.gap_;
  }

 private:
  std::string tokens_;
  char gap_;
  std::array<int, 256> lut_{};
};

// A gap-free token sequence over a shared alphabet.
struct Sequence {
  AlphabetPtr alphabet;
  std::vector<int> symbols;

  Sequence() = default;
  Sequence(AlphabetPtr ab, std::vector<int> sym);

  static Sequence from_string(const AlphabetPtr& ab, std::string_view s);

  size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
  int operator[](size_t i) const { return symbols[i]; }
  std::string str() const;

  bool operator==(const Sequence& other) const { return symbols == other.symbols; }
  bool operator<(const Sequence& other) const { return symbols < other.symbols; }
};

// True when both sequences reference equal alphabets.
bool same_alphabet(const Sequence& a, const Sequence& b);
// Throws std::invalid_argument when alphabets differ.
void require_same_alphabet(const Sequence& a, const Sequence& b, const char* where);

// Render an augmented (gap-containing) token vector as text.
std::string augmented_str(const Alphabet& ab, const std::vector<int>& z);

}  // namespace evoflow
