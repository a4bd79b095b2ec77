#pragma once

#include <cstdint>
#include <vector>

#include "evoflow/metrics.hpp"
#include "evoflow/rng.hpp"

namespace evoflow {

// Per-column smoothed amino-acid distributions fitted on an aligned train
// set with gap observations excluded, plus the column entropies.
struct ColumnProfile {
  AlphabetPtr alphabet;
  int width = 0;
  std::vector<double> p;        // width x |A|, rows sum to 1
  std::vector<double> entropy;  // width

  double prob(int col, int a) const { return p[size_t(col) * alphabet->size() + a]; }
  static ColumnProfile fit(const AlignedDataset& data, double alpha = 1.0,
                           double entropy_eps = 1e-9);
};

// Normalized positional weights from the column entropies. Columns with zero
// total entropy fall back to uniform weights.
std::vector<double> column_entropy_weights(const ColumnProfile& profile);

enum class BaselineMethod { RandomPairing, ProfileInfill, ProfileInfillForced, RandomMutation };
const char* baseline_method_name(BaselineMethod m);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::ProfileInfill;
  double expected_edits = 1.0;  // Poisson mean of the edit count
  double temperature = 1.0;
  uint64_t seed = 0;
};

// Entropy-weighted substitution infilling from the column profile. Positions
// are drawn without replacement proportional to the entropy weights of their
// columns; each drawn position is resampled from its (temperature-scaled)
// column distribution. col_of_pos maps sequence positions to profile columns
// (-1 = unmapped, never selected).
Sequence profile_infill(const Sequence& x0, const ColumnProfile& profile,
                        const std::vector<int>& col_of_pos, const BaselineConfig& config,
                        Rng& rng);

// As profile_infill, but the original residue's probability is zeroed before
// sampling so every selected position changes. A column with all mass on the
// original residue causes the position to be redrawn.
Sequence profile_infill_forced(const Sequence& x0, const ColumnProfile& profile,
                               const std::vector<int>& col_of_pos, const BaselineConfig& config,
                               Rng& rng);

// Uniform positions, uniform replacement over the other residues.
Sequence random_mutation(const Sequence& x0, const BaselineConfig& config, Rng& rng);

// Uniform draw from the pool.
const Sequence& random_pairing(const std::vector<Sequence>& pool, Rng& rng);

}  // namespace evoflow
