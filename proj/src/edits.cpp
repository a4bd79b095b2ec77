#include "evoflow/edits.hpp"

#include <stdexcept>

namespace evoflow {

const char* edit_kind_name(EditKind k) {
  switch (k) {
    case EditKind::Sub: return "sub";
    case EditKind::Ins: return "ins";
    case EditKind::Del: return "del";
  }
  return "?";
}

std::string edit_str(const Alphabet& ab, const EditOp& op) {
  std::string s = edit_kind_name(op.kind);
  s += "(" + std::to_string(op.pos);
  if (op.kind != EditKind::Del) {
    s += ",";
    s += ab.token(op.token);
  }
  s += ")";
  return s;
}

Sequence apply_edits(const Sequence& x, const EditScript& script) {
  std::vector<int> sym = x.symbols;
  for (const EditOp& op : script) {
    const int n = int(sym.size());
    switch (op.kind) {
      case EditKind::Sub:
        if (op.pos < 0 || op.pos >= n) throw std::out_of_range("apply_edits: sub position");
        sym[size_t(op.pos)] = op.token;
        break;
      case EditKind::Ins:
        if (op.pos < 0 || op.pos > n) throw std::out_of_range("apply_edits: ins position");
        sym.insert(sym.begin() + op.pos, op.token);
        break;
      case EditKind::Del:
        if (op.pos < 0 || op.pos >= n) throw std::out_of_range("apply_edits: del position");
        sym.erase(sym.begin() + op.pos);
        break;
    }
  }
  return Sequence(x.alphabet, std::move(sym));
}

std::vector<AugmentedIndex> augmented_to_ungapped(const std::vector<int>& z) {
  std::vector<AugmentedIndex> map;
  map.reserve(z.size());
  int ungapped = 0;
  for (int zi : z) {
    if (zi == kGap) {
      map.push_back({true, ungapped});
    } else {
      map.push_back({false, ungapped});
      ++ungapped;
    }
  }
  return map;
}

std::vector<int> strip_gaps(const std::vector<int>& z) {
  std::vector<int> out;
  out.reserve(z.size());
  for (int zi : z)
    if (zi != kGap) out.push_back(zi);
  return out;
}

}  // namespace evoflow
