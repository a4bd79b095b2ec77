#include "evoflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace evoflow {

AlignedDataset AlignedDataset::from_reference(const Sequence& reference,
                                              const std::vector<Sequence>& seqs,
                                              const ScoringScheme& scoring) {
  AlignedDataset data;
  data.alphabet = reference.alphabet;
  data.width = int(reference.size());
  data.rows.reserve(seqs.size());
  const int gap = data.gap_code();
  for (const auto& seq : seqs) {
    const AlignmentResult res = nw_align(reference, seq, scoring);
    std::vector<int> row(size_t(data.width), gap);
    int ref_pos = 0;
    for (size_t i = 0; i < res.pair.length(); ++i) {
      const int a = res.pair.z0[i];
      const int b = res.pair.z1[i];
      if (a == kGap) continue;  // insertion relative to the reference
      if (b != kGap) row[size_t(ref_pos)] = b;
      ++ref_pos;
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

AlignedDataset AlignedDataset::from_msa(const AlphabetPtr& ab,
                                        const std::vector<std::string>& rows) {
  if (rows.empty()) throw std::invalid_argument("AlignedDataset: no rows");
  AlignedDataset data;
  data.alphabet = ab;
  data.width = int(rows.front().size());
  const int gap = data.gap_code();
  for (const auto& r : rows) {
    if (int(r.size()) != data.width)
      throw std::invalid_argument("AlignedDataset: ragged MSA rows");
    std::vector<int> row;
    row.reserve(r.size());
    for (char c : r) row.push_back(c == ab->gap_symbol() ? gap : ab->index_of(c));
    data.rows.push_back(std::move(row));
  }
  return data;
}

std::vector<int> map_to_reference_columns(const Sequence& reference, const Sequence& seq,
                                          const ScoringScheme& scoring) {
  const AlignmentResult res = nw_align(reference, seq, scoring);
  std::vector<int> cols(seq.size(), -1);
  int ref_pos = 0, seq_pos = 0;
  for (size_t i = 0; i < res.pair.length(); ++i) {
    const int a = res.pair.z0[i];
    const int b = res.pair.z1[i];
    if (a != kGap && b != kGap) cols[size_t(seq_pos)] = ref_pos;
    if (a != kGap) ++ref_pos;
    if (b != kGap) ++seq_pos;
  }
  return cols;
}

SmoothingConfig SmoothingConfig::amino_default(double alpha) {
  SmoothingConfig cfg;
  cfg.alpha = alpha;
  const auto& bg = blosum62_background();
  cfg.mu.assign(bg.begin(), bg.end());
  const double gap_prior = 0.007;
  for (auto& m : cfg.mu) m *= 1.0 - gap_prior;
  cfg.mu.push_back(gap_prior);
  return cfg;
}

std::vector<double> SmoothingConfig::smooth(const std::vector<double>& counts) const {
  if (int(counts.size()) != d())
    throw std::invalid_argument("SmoothingConfig: counts dimension mismatch");
  double n = 0.0, msum = 0.0;
  for (double c : counts) {
    if (c < 0) throw std::invalid_argument("SmoothingConfig: negative count");
    n += c;
  }
  for (double m : mu) msum += m;
  const double z = n + alpha * msum;
  std::vector<double> p(counts.size(), 0.0);
  if (z <= 0) return p;
  for (size_t a = 0; a < counts.size(); ++a) p[a] = (counts[a] + alpha * mu[a]) / z;
  return p;
}

DatasetHeuristics dataset_heuristics(const std::vector<Sequence>& seqs,
                                     const AlignedDataset* aligned) {
  if (seqs.empty()) throw std::invalid_argument("dataset_heuristics: empty set");
  DatasetHeuristics out;
  double sum = 0.0, sum2 = 0.0;
  const int A = seqs.front().alphabet->size();
  std::vector<double> counts(size_t(A), 0.0);
  double total = 0.0;
  for (const auto& s : seqs) {
    ++out.lengths.histogram[s.size()];
    sum += double(s.size());
    sum2 += double(s.size()) * double(s.size());
    for (int sym : s.symbols) {
      counts[size_t(sym)] += 1.0;
      total += 1.0;
    }
  }
  const double n = double(seqs.size());
  out.lengths.mean = sum / n;
  const double var = std::max(0.0, sum2 / n - out.lengths.mean * out.lengths.mean);
  out.lengths.sd = std::sqrt(var);
  out.residue_freq.resize(size_t(A), 0.0);
  for (int a = 0; a < A; ++a) out.residue_freq[size_t(a)] = total > 0 ? counts[size_t(a)] / total : 0.0;

  if (aligned && !aligned->rows.empty()) {
    out.profile.assign(size_t(aligned->width), std::vector<double>(size_t(aligned->symbols()), 0.0));
    for (const auto& row : aligned->rows)
      for (int i = 0; i < aligned->width; ++i) out.profile[size_t(i)][size_t(row[size_t(i)])] += 1.0;
    for (auto& col : out.profile)
      for (auto& v : col) v /= double(aligned->rows.size());
  }
  return out;
}

ProfileModel ProfileModel::fit(const AlignedDataset& data, const SmoothingConfig& smoothing) {
  if (data.rows.empty()) throw std::invalid_argument("ProfileModel: empty dataset");
  if (smoothing.d() != data.symbols())
    throw std::invalid_argument("ProfileModel: smoothing dimension mismatch");
  ProfileModel model;
  model.width = data.width;
  model.symbols = data.symbols();
  model.p.resize(size_t(model.width) * size_t(model.symbols), 0.0);
  std::vector<double> counts(size_t(model.symbols));
  for (int col = 0; col < model.width; ++col) {
    std::fill(counts.begin(), counts.end(), 0.0);
    for (const auto& row : data.rows) counts[size_t(row[size_t(col)])] += 1.0;
    const auto p = smoothing.smooth(counts);
    for (int s = 0; s < model.symbols; ++s) model.p[size_t(col) * model.symbols + s] = p[size_t(s)];
  }
  return model;
}

double profile_pll(const std::vector<int>& columnized, const ProfileModel& model) {
  if (int(columnized.size()) != model.width)
    throw std::invalid_argument("profile_pll: width mismatch");
  double ll = 0.0;
  for (int col = 0; col < model.width; ++col) {
    const double p = model.prob(col, columnized[size_t(col)]);
    if (p <= 0.0) throw std::domain_error("profile_pll: zero column probability");
    ll += std::log(p);
  }
  return ll;
}

Covariance4D covariance_4d(const AlignedDataset& data) {
  if (data.rows.empty()) throw std::invalid_argument("covariance_4d: empty dataset");
  Covariance4D cov;
  cov.width = data.width;
  cov.symbols = data.symbols();
  const size_t L = size_t(cov.width);
  const size_t S = size_t(cov.symbols);
  cov.f_i.assign(L * S, 0.0);
  cov.f_ij.assign(L * L * S * S, 0.0);
  const double inv_n = 1.0 / double(data.rows.size());
  for (const auto& row : data.rows) {
    for (size_t i = 0; i < L; ++i) cov.f_i[i * S + size_t(row[i])] += inv_n;
    for (size_t i = 0; i < L; ++i)
      for (size_t j = 0; j < L; ++j)
        cov.f_ij[((i * L + j) * S + size_t(row[i])) * S + size_t(row[j])] += inv_n;
  }
  return cov;
}

std::vector<double> interaction_strength(const Covariance4D& cov) {
  const int L = cov.width, S = cov.symbols;
  std::vector<double> out(size_t(L) * L, 0.0);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      double acc = 0.0;
      for (int a = 0; a < S; ++a)
        for (int b = 0; b < S; ++b) {
          const double c = cov.c(i, j, a, b);
          acc += c * c;
        }
      out[size_t(i) * L + j] = std::sqrt(acc);
    }
  return out;
}

std::vector<double> mip(const AlignedDataset& data, double log_eps) {
  const Covariance4D cov = covariance_4d(data);
  const int L = cov.width, S = cov.symbols;
  std::vector<double> I(size_t(L) * L, 0.0);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      double acc = 0.0;
      for (int a = 0; a < S; ++a)
        for (int b = 0; b < S; ++b) {
          const double fij = cov.fij(i, j, a, b);
          if (fij <= 0.0) continue;
          acc += fij * std::log(fij / (cov.fi(i, a) * cov.fi(j, b) + log_eps));
        }
      I[size_t(i) * L + j] = acc;
    }

  // Diagonal-excluded means; with a single column there is nothing to
  // correct and the result is identically zero.
  std::vector<double> out(size_t(L) * L, 0.0);
  if (L < 2) return out;
  std::vector<double> row_mean(size_t(L), 0.0);
  double global = 0.0;
  for (int i = 0; i < L; ++i) {
    double acc = 0.0;
    for (int k = 0; k < L; ++k)
      if (k != i) acc += I[size_t(i) * L + k];
    row_mean[size_t(i)] = acc / double(L - 1);
    global += acc;
  }
  global /= double(L) * double(L - 1);

  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      if (i == j) continue;
      const double apc = global > 0 ? row_mean[size_t(i)] * row_mean[size_t(j)] / global : 0.0;
      out[size_t(i) * L + j] = I[size_t(i) * L + j] - apc;
    }
  return out;
}

double blosum_kl(const std::vector<double>& counts_p, const std::vector<double>& counts_q,
                 const SmoothingConfig& smoothing) {
  const auto p = smoothing.smooth(counts_p);
  const auto q = smoothing.smooth(counts_q);
  double kl = 0.0;
  for (size_t a = 0; a < p.size(); ++a) {
    if (p[a] <= 0.0) continue;
    if (q[a] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p[a] * std::log(p[a] / q[a]);
  }
  return std::max(kl, 0.0);
}

KmerCounts spectrum_features(const Sequence& x, int k) {
  if (k < 1) throw std::invalid_argument("spectrum_features: k must be >= 1");
  KmerCounts counts;
  const int A = x.alphabet->size();
  const size_t n = x.size();
  if (n < size_t(k)) return counts;
  // Check that packed k-mers fit 64 bits.
  double spanbits = double(k) * std::log2(double(A));
  if (spanbits > 62.0) throw std::invalid_argument("spectrum_features: k too large to pack");
  uint64_t code = 0;
  uint64_t modulus = 1;
  for (int i = 0; i < k; ++i) modulus *= uint64_t(A);
  for (size_t i = 0; i < n; ++i) {
    code = (code * uint64_t(A) + uint64_t(x[i])) % modulus;
    if (i + 1 >= size_t(k)) ++counts[code];
  }
  return counts;
}

double spectrum_kernel(const KmerCounts& a, const KmerCounts& b) {
  const KmerCounts& small = a.size() <= b.size() ? a : b;
  const KmerCounts& large = a.size() <= b.size() ? b : a;
  double dot = 0.0;
  for (const auto& [code, count] : small) {
    const auto it = large.find(code);
    if (it != large.end()) dot += double(count) * double(it->second);
  }
  return dot;
}

double spectrum_kernel(const Sequence& x, const Sequence& y, int k) {
  return spectrum_kernel(spectrum_features(x, k), spectrum_features(y, k));
}

double mmd2(const std::vector<Sequence>& X, const std::vector<Sequence>& Y, int k) {
  if (X.empty() || Y.empty()) throw std::invalid_argument("mmd2: empty sample set");
  std::vector<KmerCounts> fx, fy;
  fx.reserve(X.size());
  fy.reserve(Y.size());
  for (const auto& s : X) fx.push_back(spectrum_features(s, k));
  for (const auto& s : Y) fy.push_back(spectrum_features(s, k));

  const double n = double(X.size()), m = double(Y.size());
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < fx.size(); ++i)
    for (size_t j = 0; j < fx.size(); ++j) sxx += spectrum_kernel(fx[i], fx[j]);
  for (size_t i = 0; i < fy.size(); ++i)
    for (size_t j = 0; j < fy.size(); ++j) syy += spectrum_kernel(fy[i], fy[j]);
  for (size_t i = 0; i < fx.size(); ++i)
    for (size_t j = 0; j < fy.size(); ++j) sxy += spectrum_kernel(fx[i], fy[j]);
  return sxx / (n * n) + syy / (m * m) - 2.0 * sxy / (n * m);
}

MetricsReport evaluate_set(const std::string& label, const std::vector<Sequence>& generated,
                           const std::vector<Sequence>& reference, const Sequence& align_ref,
                           const ScoringScheme& scoring, const SmoothingConfig& smoothing,
                           int spectrum_k) {
  if (generated.empty() || reference.empty())
    throw std::invalid_argument("evaluate_set: empty sequence set");
  MetricsReport report;
  report.label = label;
  report.spectrum_k = spectrum_k;

  const AlignedDataset gen_cols = AlignedDataset::from_reference(align_ref, generated, scoring);
  const AlignedDataset ref_cols = AlignedDataset::from_reference(align_ref, reference, scoring);
  report.heuristics = dataset_heuristics(generated, &gen_cols);
  report.width = gen_cols.width;

  // PLL of generated sequences under the reference-set profile.
  const ProfileModel profile = ProfileModel::fit(ref_cols, smoothing);
  double pll_sum = 0.0, pll_sum2 = 0.0;
  for (const auto& row : gen_cols.rows) {
    const double ll = profile_pll(row, profile);
    pll_sum += ll;
    pll_sum2 += ll * ll;
  }
  const double n = double(gen_cols.rows.size());
  report.pll_mean = pll_sum / n;
  report.pll_sd = std::sqrt(std::max(0.0, pll_sum2 / n - report.pll_mean * report.pll_mean));

  report.interaction = interaction_strength(covariance_4d(gen_cols));
  report.mip_matrix = mip(gen_cols);

  // Global residue frequency KL in both directions, over alphabet+gap counts
  // taken from the columnized views.
  const auto count_syms = [](const AlignedDataset& d) {
    std::vector<double> counts(size_t(d.symbols()), 0.0);
    for (const auto& row : d.rows)
      for (int s : row) counts[size_t(s)] += 1.0;
    return counts;
  };
  const auto gen_counts = count_syms(gen_cols);
  const auto ref_counts = count_syms(ref_cols);
  report.kl_to_reference = blosum_kl(gen_counts, ref_counts, smoothing);
  report.kl_from_reference = blosum_kl(ref_counts, gen_counts, smoothing);
  report.mmd2_to_reference = mmd2(generated, reference, spectrum_k);
  return report;
}

void write_metrics_report(std::ostream& out, const MetricsReport& report) {
  out << "metrics report: " << report.label << '\n';
  out << "  sequences: length mean " << report.heuristics.lengths.mean << " sd "
      << report.heuristics.lengths.sd << '\n';
  out << "  length histogram:";
  for (const auto& [len, count] : report.heuristics.lengths.histogram)
    out << ' ' << len << ':' << count;
  out << '\n';
  out << "  residue frequencies:";
  for (double f : report.heuristics.residue_freq) out << ' ' << f;
  out << '\n';
  out << "  pll mean " << report.pll_mean << " sd " << report.pll_sd << '\n';
  out << "  kl(set||reference) " << report.kl_to_reference << '\n';
  out << "  kl(reference||set) " << report.kl_from_reference << '\n';
  out << "  mmd2 (k=" << report.spectrum_k << ") " << report.mmd2_to_reference << '\n';
}

void write_matrix(std::ostream& out, const std::vector<double>& m, int width) {
  for (int i = 0; i < width; ++i) {
    for (int j = 0; j < width; ++j) {
      if (j) out << ' ';
      out << m[size_t(i) * width + j];
    }
    out << '\n';
  }
}

}  // namespace evoflow
