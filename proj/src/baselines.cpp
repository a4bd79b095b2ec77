#include "evoflow/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evoflow {

ColumnProfile ColumnProfile::fit(const AlignedDataset& data, double alpha, double entropy_eps) {
  if (data.rows.empty()) throw std::invalid_argument("ColumnProfile: empty dataset");
  ColumnProfile profile;
  profile.alphabet = data.alphabet;
  profile.width = data.width;
  const int A = data.alphabet->size();
  const int gap = data.gap_code();
  profile.p.resize(size_t(profile.width) * size_t(A), 0.0);
  profile.entropy.resize(size_t(profile.width), 0.0);

  // Gap-free smoothing: background prior over the plain alphabet.
  std::vector<double> mu;
  if (A == 20) {
    mu = blosum62_background();
  } else {
    mu.assign(size_t(A), 1.0 / double(A));
  }

  std::vector<double> counts(static_cast<size_t>(A), 0.0);
  for (int col = 0; col < profile.width; ++col) {
    std::fill(counts.begin(), counts.end(), 0.0);
    double n = 0.0;
    for (const auto& row : data.rows) {
      const int s = row[size_t(col)];
      if (s == gap) continue;
      counts[size_t(s)] += 1.0;
      n += 1.0;
    }
    double msum = 0.0;
    for (double m : mu) msum += m;
    const double z = n + alpha * msum;
    double H = 0.0;
    for (int a = 0; a < A; ++a) {
      const double pa = z > 0 ? (counts[size_t(a)] + alpha * mu[size_t(a)]) / z : 1.0 / A;
      profile.p[size_t(col) * A + a] = pa;
      H -= pa * std::log(pa + entropy_eps);
    }
    profile.entropy[size_t(col)] = std::max(0.0, H);
  }
  return profile;
}

std::vector<double> column_entropy_weights(const ColumnProfile& profile) {
  double total = 0.0;
  for (double h : profile.entropy) total += h;
  std::vector<double> w(profile.entropy.size());
  if (total <= 0.0) {
    std::fill(w.begin(), w.end(), 1.0 / double(w.size()));
  } else {
    for (size_t i = 0; i < w.size(); ++i) w[i] = profile.entropy[i] / total;
  }
  return w;
}

const char* baseline_method_name(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::RandomPairing: return "random_pairing";
    case BaselineMethod::ProfileInfill: return "profile_infill";
    case BaselineMethod::ProfileInfillForced: return "profile_infill_forced";
    case BaselineMethod::RandomMutation: return "random_mutation";
  }
  return "?";
}

namespace {

// Distinct positions drawn sequentially without replacement, proportional to
// the weights.
std::vector<int> draw_positions(std::vector<double> weights, int count, Rng& rng) {
  std::vector<int> picked;
  for (int c = 0; c < count; ++c) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) break;
    const int pos = rng.categorical(weights);
    picked.push_back(pos);
    weights[size_t(pos)] = 0.0;
  }
  return picked;
}

std::vector<double> tempered(std::vector<double> p, double temperature) {
  if (temperature <= 0.0) throw std::invalid_argument("baseline: temperature must be positive");
  if (temperature == 1.0) return p;
  double z = 0.0;
  for (auto& v : p) {
    v = v > 0 ? std::pow(v, 1.0 / temperature) : 0.0;
    z += v;
  }
  if (z > 0)
    for (auto& v : p) v /= z;
  return p;
}

std::vector<int> select_infill_positions(const Sequence& x0, const ColumnProfile& profile,
                                         const std::vector<int>& col_of_pos,
                                         const BaselineConfig& config, Rng& rng) {
  if (col_of_pos.size() != x0.size())
    throw std::invalid_argument("profile_infill: column map size mismatch");
  const auto col_weights = column_entropy_weights(profile);
  std::vector<double> weights(x0.size(), 0.0);
  int mappable = 0;
  for (size_t i = 0; i < x0.size(); ++i) {
    const int col = col_of_pos[i];
    if (col < 0) continue;
    weights[i] = col_weights[size_t(col)];
    ++mappable;
  }
  if (mappable == 0) throw std::invalid_argument("profile_infill: no mappable positions");
  // All-mapped-but-zero entropy weights: fall back to uniform over mappable.
  double total = 0.0;
  for (double w : weights) total += w;
  if (total <= 0.0)
    for (size_t i = 0; i < weights.size(); ++i)
      if (col_of_pos[i] >= 0) weights[i] = 1.0;

  const int edits = std::min(rng.poisson(config.expected_edits), mappable);
  return draw_positions(std::move(weights), edits, rng);
}

int sample_column(const ColumnProfile& profile, int col, double temperature, Rng& rng,
                  int blocked = -1) {
  const int A = profile.alphabet->size();
  std::vector<double> p(static_cast<size_t>(A), 0.0);
  for (int a = 0; a < A; ++a) p[size_t(a)] = profile.prob(col, a);
  if (blocked >= 0) p[size_t(blocked)] = 0.0;
  double z = 0.0;
  for (double v : p) z += v;
  if (z <= 0.0) return -1;
  if (temperature < 1e-9) {
    // Temperature -> 0 limit: argmax.
    int best = 0;
    for (int a = 1; a < A; ++a)
      if (p[size_t(a)] > p[size_t(best)]) best = a;
    return best;
  }
  p = tempered(std::move(p), temperature);
  return rng.categorical(p);
}

}  // namespace

Sequence profile_infill(const Sequence& x0, const ColumnProfile& profile,
                        const std::vector<int>& col_of_pos, const BaselineConfig& config,
                        Rng& rng) {
  const auto positions = select_infill_positions(x0, profile, col_of_pos, config, rng);
  Sequence out = x0;
  for (int pos : positions) {
    const int tok = sample_column(profile, col_of_pos[size_t(pos)], config.temperature, rng);
    if (tok >= 0) out.symbols[size_t(pos)] = tok;
  }
  return out;
}

Sequence profile_infill_forced(const Sequence& x0, const ColumnProfile& profile,
                               const std::vector<int>& col_of_pos, const BaselineConfig& config,
                               Rng& rng) {
  auto positions = select_infill_positions(x0, profile, col_of_pos, config, rng);
  Sequence out = x0;
  for (size_t idx = 0; idx < positions.size(); ++idx) {
    const int pos = positions[idx];
    const int tok = sample_column(profile, col_of_pos[size_t(pos)], config.temperature, rng,
                                  x0[size_t(pos)]);
    if (tok >= 0) {
      out.symbols[size_t(pos)] = tok;
      continue;
    }
    // The column is entirely on the original residue: redraw the position
    // among those not yet selected.
    std::vector<double> weights(x0.size(), 0.0);
    const auto col_weights = column_entropy_weights(profile);
    for (size_t i = 0; i < x0.size(); ++i)
      if (col_of_pos[i] >= 0) weights[i] = std::max(col_weights[size_t(col_of_pos[i])], 1e-12);
    for (int p : positions) weights[size_t(p)] = 0.0;
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) continue;  // nothing left to force
    const int repl = rng.categorical(weights);
    positions[idx] = repl;
    const int tok2 = sample_column(profile, col_of_pos[size_t(repl)], config.temperature, rng,
                                   x0[size_t(repl)]);
    if (tok2 >= 0) out.symbols[size_t(repl)] = tok2;
  }
  return out;
}

Sequence random_mutation(const Sequence& x0, const BaselineConfig& config, Rng& rng) {
  const int L = int(x0.size());
  const int A = x0.alphabet->size();
  const int edits = std::min(rng.poisson(config.expected_edits), L);
  std::vector<double> weights(size_t(L), 1.0);
  const auto positions = draw_positions(std::move(weights), edits, rng);
  Sequence out = x0;
  for (int pos : positions) {
    // Uniform over the A-1 residues other than the original.
    int tok = rng.uniform_int(A - 1);
    if (tok >= x0[size_t(pos)]) ++tok;
    out.symbols[size_t(pos)] = tok;
  }
  return out;
}

const Sequence& random_pairing(const std::vector<Sequence>& pool, Rng& rng) {
  if (pool.empty()) throw std::invalid_argument("random_pairing: empty pool");
  return pool[size_t(rng.uniform_int(int(pool.size())))];
}

}  // namespace evoflow
