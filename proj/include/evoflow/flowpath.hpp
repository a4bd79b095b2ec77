#pragma once

#include <vector>

#include "evoflow/align.hpp"
#include "evoflow/rate_table.hpp"
#include "evoflow/rng.hpp"
#include "evoflow/schedule.hpp"

namespace evoflow {

// One edit the conditional path demands, with its per-unit-time rate.
struct TargetEdit {
  EditOp op;
  double rate = 0.0;
};

// The conditional transport target at a path state z: one entry per
// augmented position still differing from z1, each carrying the rate
// kappa_dot(t) / (1 - kappa(t)). Ops are expressed against x(z).
struct ConditionalTarget {
  std::vector<TargetEdit> edits;
  double total_target_rate = 0.0;
};

// Draw z from the factorized conditional path: each augmented position is
// z1[i] with probability kappa(t) and z0[i] otherwise. Deterministic at the
// endpoints t=0 and t=1.
std::vector<int> sample_path_state(const AlignedPair& pair, double t, const Schedule& schedule,
                                   Rng& rng);

// Conditional rates for transporting the augmented state z toward z1.
// Requires |z| == |z1| and t < 1.
ConditionalTarget conditional_rate(const std::vector<int>& z, const std::vector<int>& z1,
                                   double t, const Schedule& schedule);

struct BregmanResult {
  double loss = 0.0;
  RateTableAdjoint adjoint;  // d loss / d table entries
};

// The rate-matching objective for one path sample:
//   loss = total_rate(table, x) - sum_e target.rate(e) * log(rate of e in table)
// Its pointwise minimizer over a free rate is the target rate. Throws
// std::domain_error when a target edit has zero model rate.
BregmanResult bregman_loss(const RateTable& table, const Sequence& x,
                           const ConditionalTarget& target);

}  // namespace evoflow
