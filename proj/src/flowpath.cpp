#include "evoflow/flowpath.hpp"

#include <cmath>
#include <stdexcept>

namespace evoflow {

std::vector<int> sample_path_state(const AlignedPair& pair, double t, const Schedule& schedule,
                                   Rng& rng) {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("sample_path_state: t outside [0,1]");
  const double k = schedule.kappa(t);
  std::vector<int> z(pair.length());
  for (size_t i = 0; i < pair.length(); ++i)
    z[i] = rng.uniform() < k ? pair.z1[i] : pair.z0[i];
  return z;
}

ConditionalTarget conditional_rate(const std::vector<int>& z, const std::vector<int>& z1,
                                   double t, const Schedule& schedule) {
  if (z.size() != z1.size())
    throw std::invalid_argument("conditional_rate: state/target length mismatch");
  const double coeff = schedule.rate_coeff(t);  // throws for t >= 1

  ConditionalTarget target;
  const auto coord = augmented_to_ungapped(z);
  for (size_t i = 0; i < z.size(); ++i) {
    if (z[i] == z1[i]) continue;
    EditOp op;
    if (z[i] == kGap) {
      op = EditOp::ins(coord[i].value, z1[i]);
    } else if (z1[i] == kGap) {
      op = EditOp::del(coord[i].value);
    } else {
      op = EditOp::sub(coord[i].value, z1[i]);
    }
    target.edits.push_back({op, coeff});
    target.total_target_rate += coeff;
  }
  return target;
}

BregmanResult bregman_loss(const RateTable& table, const Sequence& x,
                           const ConditionalTarget& target) {
  BregmanResult res;
  res.adjoint = RateTableAdjoint::zeros_like(table);
  const int A = table.alphabet_size;

  // Rate-suppression term: total model rate of leaving x.
  res.loss = total_rate(table, x);
  for (int i = 0; i < table.length; ++i) {
    const int xi = x[size_t(i)];
    res.adjoint.lam_sub[size_t(i)] += 1.0 - table.qsub(i, xi);
    res.adjoint.q_sub[size_t(i) * A + xi] -= table.lam_sub[size_t(i)];
    res.adjoint.lam_del[size_t(i)] += 1.0;
  }
  for (size_t s = 0; s < table.lam_ins.size(); ++s) res.adjoint.lam_ins[s] += 1.0;

  // Log-likelihood term over the target edits.
  for (const TargetEdit& e : target.edits) {
    const double u = edit_rate(table, x, e.op);
    if (u <= 0.0)
      throw std::domain_error("bregman_loss: target edit has zero model rate (" +
                              edit_str(*x.alphabet, e.op) + ")");
    res.loss -= e.rate * std::log(u);
    const auto p = size_t(e.op.pos);
    switch (e.op.kind) {
      case EditKind::Sub:
        res.adjoint.lam_sub[p] -= e.rate / table.lam_sub[p];
        res.adjoint.q_sub[p * A + e.op.token] -= e.rate / table.qsub(e.op.pos, e.op.token);
        break;
      case EditKind::Ins:
        res.adjoint.lam_ins[p] -= e.rate / table.lam_ins[p];
        res.adjoint.q_ins[p * A + e.op.token] -= e.rate / table.qins(e.op.pos, e.op.token);
        break;
      case EditKind::Del:
        res.adjoint.lam_del[p] -= e.rate / table.lam_del[p];
        break;
    }
  }
  return res;
}

}  // namespace evoflow
