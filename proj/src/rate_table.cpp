#include "evoflow/rate_table.hpp"

#include <stdexcept>

namespace evoflow {

double edit_rate(const RateTable& table, const Sequence& x, const EditOp& op) {
  const int L = table.length;
  switch (op.kind) {
    case EditKind::Sub:
      if (op.pos < 0 || op.pos >= L) throw std::out_of_range("edit_rate: sub position");
      if (op.token == x[size_t(op.pos)])
        throw std::invalid_argument("edit_rate: self-substitution is not a transition");
      return table.lam_sub[size_t(op.pos)] * table.qsub(op.pos, op.token);
    case EditKind::Ins:
      if (op.pos < 0 || op.pos > L) throw std::out_of_range("edit_rate: ins slot");
      return table.lam_ins[size_t(op.pos)] * table.qins(op.pos, op.token);
    case EditKind::Del:
      if (op.pos < 0 || op.pos >= L) throw std::out_of_range("edit_rate: del position");
      return table.lam_del[size_t(op.pos)];
  }
  throw std::logic_error("edit_rate: bad kind");
}

double total_rate(const RateTable& table, const Sequence& x) {
  if (int(x.size()) != table.length)
    throw std::invalid_argument("total_rate: table/sequence length mismatch");
  double total = 0.0;
  for (int i = 0; i < table.length; ++i)
    total += table.lam_sub[size_t(i)] * (1.0 - table.qsub(i, x[size_t(i)]));
  for (double v : table.lam_del) total += v;
  for (double v : table.lam_ins) total += v;
  return total;
}

RateTableAdjoint RateTableAdjoint::zeros_like(const RateTable& t) {
  RateTableAdjoint a;
  a.lam_sub.assign(t.lam_sub.size(), 0.0);
  a.lam_del.assign(t.lam_del.size(), 0.0);
  a.lam_ins.assign(t.lam_ins.size(), 0.0);
  a.q_sub.assign(t.q_sub.size(), 0.0);
  a.q_ins.assign(t.q_ins.size(), 0.0);
  return a;
}

}  // namespace evoflow
