#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "evoflow/align.hpp"

namespace evoflow {

// Sequences mapped to the column space of a reference sequence: each column
// holds a token index or the gap code (= alphabet size). Insertions relative
// to the reference are not representable in this view and are dropped.
struct AlignedDataset {
  AlphabetPtr alphabet;
  int width = 0;  // reference length
  std::vector<std::vector<int>> rows;  // N x width, values in [0, |A|]

  int gap_code() const { return alphabet->size(); }
  int symbols() const { return alphabet->size() + 1; }
  size_t size() const { return rows.size(); }

  // Pairwise-align every sequence to the reference; reference positions
  // define the columns.
  static AlignedDataset from_reference(const Sequence& reference,
                                       const std::vector<Sequence>& seqs,
                                       const ScoringScheme& scoring);
  // Directly from pre-aligned rows of equal length (MSA ingestion).
  static AlignedDataset from_msa(const AlphabetPtr& ab, const std::vector<std::string>& rows);
};

// Column mapping of one sequence against a reference: for every position of
// the sequence, the reference column it occupies, or -1 for positions that
// are insertions relative to the reference.
std::vector<int> map_to_reference_columns(const Sequence& reference, const Sequence& seq,
                                          const ScoringScheme& scoring);

// Pseudo-count smoothing over alphabet+gap symbol frequencies:
//   p_a = (x_a + alpha * mu_a) / (N + alpha * sum(mu))
struct SmoothingConfig {
  double alpha = 1.0;
  std::vector<double> mu;  // prior over d symbols

  int d() const { return int(mu.size()); }
  // Amino-acid priors from substitution-matrix background frequencies scaled
  // to 0.993 plus a 0.7% gap prior, d = 21.
  static SmoothingConfig amino_default(double alpha = 1.0);
  std::vector<double> smooth(const std::vector<double>& counts) const;
};

struct LengthStats {
  std::map<size_t, int> histogram;
  double mean = 0.0;
  double sd = 0.0;
};

struct DatasetHeuristics {
  LengthStats lengths;
  std::vector<double> residue_freq;            // over alphabet tokens
  std::vector<std::vector<double>> profile;    // width x (|A|+1), empty without alignment
};

DatasetHeuristics dataset_heuristics(const std::vector<Sequence>& seqs,
                                     const AlignedDataset* aligned = nullptr);

// Smoothed per-column categorical model over alphabet+gap.
struct ProfileModel {
  int width = 0;
  int symbols = 0;
  std::vector<double> p;  // width x symbols, rows sum to 1

  double prob(int col, int sym) const { return p[size_t(col) * symbols + sym]; }
  static ProfileModel fit(const AlignedDataset& data, const SmoothingConfig& smoothing);
};

// Sum over columns of the log smoothed column probability of the residue
// (or gap) occupying it; order-independent by construction.
double profile_pll(const std::vector<int>& columnized, const ProfileModel& model);

// Frequencies and pairwise covariance of one-hot columns.
struct Covariance4D {
  int width = 0;
  int symbols = 0;
  std::vector<double> f_i;   // width x symbols
  std::vector<double> f_ij;  // width x width x symbols x symbols

  double fi(int i, int a) const { return f_i[size_t(i) * symbols + a]; }
  double fij(int i, int j, int a, int b) const {
    return f_ij[((size_t(i) * width + j) * symbols + a) * symbols + b];
  }
  double c(int i, int j, int a, int b) const { return fij(i, j, a, b) - fi(i, a) * fi(j, b); }
};

Covariance4D covariance_4d(const AlignedDataset& data);

// Frobenius norm of C_ij over the symbol dimensions; width x width.
std::vector<double> interaction_strength(const Covariance4D& cov);

// Mutual information between columns with average product correction. Row
// and global means exclude the diagonal self-information so that the APC of
// independent columns cancels the finite-sample bias; the diagonal of the
// result is fixed at zero.
std::vector<double> mip(const AlignedDataset& data, double log_eps = 1e-12);

// KL divergence between smoothed count vectors. Returns +infinity when the
// unsmoothed (alpha = 0) distributions have mismatched support.
double blosum_kl(const std::vector<double>& counts_p, const std::vector<double>& counts_q,
                 const SmoothingConfig& smoothing);

// Sparse contiguous k-mer counts; k-mers are base-|A| packed.
using KmerCounts = std::unordered_map<uint64_t, int64_t>;
KmerCounts spectrum_features(const Sequence& x, int k);
double spectrum_kernel(const KmerCounts& a, const KmerCounts& b);
double spectrum_kernel(const Sequence& x, const Sequence& y, int k);

// Biased (V-statistic) squared maximum mean discrepancy under the spectrum
// kernel; zero exactly when X == Y elementwise.
double mmd2(const std::vector<Sequence>& X, const std::vector<Sequence>& Y, int k);

struct MetricsReport {
  std::string label;
  DatasetHeuristics heuristics;
  double pll_mean = 0.0;
  double pll_sd = 0.0;
  std::vector<double> interaction;  // width x width
  std::vector<double> mip_matrix;   // width x width
  int width = 0;
  double kl_to_reference = 0.0;     // smoothed KL (set vs reference set)
  double kl_from_reference = 0.0;   // reverse direction
  double mmd2_to_reference = 0.0;
  int spectrum_k = 3;
};

// Full metric suite for one generated set against a reference (holdout) set.
MetricsReport evaluate_set(const std::string& label, const std::vector<Sequence>& generated,
                           const std::vector<Sequence>& reference, const Sequence& align_ref,
                           const ScoringScheme& scoring, const SmoothingConfig& smoothing,
                           int spectrum_k);

void write_metrics_report(std::ostream& out, const MetricsReport& report);
void write_matrix(std::ostream& out, const std::vector<double>& m, int width);

}  // namespace evoflow
