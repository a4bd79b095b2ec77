#pragma once

#include <vector>

#include "evoflow/alphabet.hpp"
#include "evoflow/edits.hpp"

namespace evoflow {

// Per-position edit rates and token distributions for one sequence of length
// L over an alphabet of size A:
//   lam_sub[i], lam_del[i]   for i in [0, L)
//   lam_ins[s]               for s in [0, L]   (insert-before slots)
//   q_sub[i*A + a]           categorical over tokens, rows sum to 1
//   q_ins[s*A + a]           categorical over tokens, rows sum to 1
// The rate of an individual edit is lam * q (deletions carry no q).
struct RateTable {
  int length = 0;
  int alphabet_size = 0;
  std::vector<double> lam_sub, lam_del, lam_ins;
  std::vector<double> q_sub, q_ins;

  double qsub(int i, int a) const { return q_sub[size_t(i) * alphabet_size + a]; }
  double qins(int s, int a) const { return q_ins[size_t(s) * alphabet_size + a]; }
};

// Rate of one edit. Substituting a position with its current token is not a
// transition; requesting it throws std::invalid_argument.
double edit_rate(const RateTable& table, const Sequence& x, const EditOp& op);

// Total rate of leaving x: sum over all legal single edits, with the
// self-substitution mass excluded via (1 - q_sub[i][x_i]).
double total_rate(const RateTable& table, const Sequence& x);

// Adjoint of a scalar loss with respect to every RateTable entry, same
// shapes as the table itself.
struct RateTableAdjoint {
  std::vector<double> lam_sub, lam_del, lam_ins;
  std::vector<double> q_sub, q_ins;

  static RateTableAdjoint zeros_like(const RateTable& t);
};

}  // namespace evoflow
