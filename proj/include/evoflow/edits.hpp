#pragma once

#include <string>
#include <vector>

#include "evoflow/alphabet.hpp"

namespace evoflow {

enum class EditKind { Sub, Ins, Del };

// An elementary edit on a gap-free sequence.
//   Sub(pos, token): replace the symbol at pos.
//   Ins(pos, token): insert token before index pos; pos may equal the length,
//                    meaning append at the end.
//   Del(pos):        remove the symbol at pos.
struct EditOp {
  EditKind kind;
  int pos = 0;
  int token = -1;  // alphabet index; unused for Del

  static EditOp sub(int pos, int token) { return {EditKind::Sub, pos, token}; }
  static EditOp ins(int pos, int token) { return {EditKind::Ins, pos, token}; }
  static EditOp del(int pos) { return {EditKind::Del, pos, -1}; }

  bool operator==(const EditOp&) const = default;
};

using EditScript = std::vector<EditOp>;

const char* edit_kind_name(EditKind k);
std::string edit_str(const Alphabet& ab, const EditOp& op);

// Apply edits in script order. Positions are interpreted against the current
// intermediate sequence, i.e. each edit sees the result of all previous ones.
// Throws std::out_of_range when a position is invalid at any step.
Sequence apply_edits(const Sequence& x, const EditScript& script);

// Coordinate map from augmented positions to ungapped positions.
// For z[i] != gap, value is the index the symbol occupies after removing
// gaps and is_slot is false. For z[i] == gap, value is the insertion slot
// (the number of non-gap symbols strictly before i) and is_slot is true.
struct AugmentedIndex {
  bool is_slot;
  int value;
  bool operator==(const AugmentedIndex&) const = default;
};
std::vector<AugmentedIndex> augmented_to_ungapped(const std::vector<int>& z);

// Strip gaps from an augmented token vector.
std::vector<int> strip_gaps(const std::vector<int>& z);

}  // namespace evoflow
