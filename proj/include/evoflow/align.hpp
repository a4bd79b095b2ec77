#pragma once

#include <iosfwd>
#include <vector>

#include "evoflow/alphabet.hpp"
#include "evoflow/edits.hpp"

namespace evoflow {

// Substitution matrix plus affine gap penalties. A gap run of length k costs
// gap_open + k * gap_extend; both penalties are non-negative and subtracted
// from the alignment score.
struct ScoringScheme {
  AlphabetPtr alphabet;
  std::vector<int> matrix;  // size() == n*n, row-major, symmetric
  int gap_open = 10;
  int gap_extend = 1;

  int score(int a, int b) const { return matrix[size_t(a) * alphabet->size() + b]; }

  // BLOSUM62 restricted to the 20 standard amino acids.
  static ScoringScheme blosum62();
  // match/mismatch scheme for toy alphabets.
  static ScoringScheme simple(const AlphabetPtr& ab, int match, int mismatch,
                              int gap_open, int gap_extend);
  // Parse the standard whitespace-separated matrix text format: optional '#'
  // comment lines, a header row of symbols, then one row per symbol. Symbols
  // outside the alphabet are ignored; all alphabet tokens must be present.
  static ScoringScheme parse_matrix(std::istream& in, const AlphabetPtr& ab,
                                    int gap_open = 10, int gap_extend = 1);

  void validate() const;
};

// Background frequencies of the 20 standard amino acids (substitution-matrix
// row order), as used for pseudo-count priors and synthetic corpora.
const std::vector<double>& blosum62_background();

// Two gap-augmented rows of equal length. Removing gaps from z0/z1 recovers
// the original sequences; no column is gap in both rows.
struct AlignedPair {
  AlphabetPtr alphabet;
  std::vector<int> z0, z1;

  size_t length() const { return z0.size(); }
  Sequence x0() const { return Sequence(alphabet, strip_gaps(z0)); }
  Sequence x1() const { return Sequence(alphabet, strip_gaps(z1)); }

  static AlignedPair from_strings(const AlphabetPtr& ab, std::string_view a,
                                  std::string_view b);
  void validate() const;
};

struct AlignmentResult {
  AlignedPair pair;
  int score = 0;
};

// Global alignment maximizing the affine-gap score. Traceback ties are broken
// deterministically, preferring diagonal over gap-in-z1 over gap-in-z0.
AlignmentResult nw_align(const Sequence& x, const Sequence& y, const ScoringScheme& scoring);

enum class EditLabel : uint8_t { NoOp = 0, Sub = 1, Ins = 2, Del = 3 };
const char* edit_label_name(EditLabel l);

// Per-augmented-position labels plus the edit script that maps x(z0) to
// x(z1) under apply_edits' in-order coordinate convention.
struct LabeledEdits {
  std::vector<EditLabel> labels;
  EditScript script;
};
LabeledEdits extract_edit_labels(const AlignedPair& pair);

// Minimum number of substitutions, insertions and deletions turning x into y.
int levenshtein(const Sequence& x, const Sequence& y);

}  // namespace evoflow
