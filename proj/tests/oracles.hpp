#pragma once

// Test-only reference implementations, independent of the library code they
// check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "evoflow/align.hpp"
#include "evoflow/ratemodel.hpp"

namespace evoflow::testing {

// Exhaustive global alignment: enumerate every gap placement (no double-gap
// columns) and score with affine penalties applied per maximal gap run in
// each row. Returns the maximum score.
inline int brute_force_align_score(const Sequence& x, const Sequence& y,
                                   const ScoringScheme& s) {
  struct Rec {
    const std::vector<int>&xs, &ys;
    const ScoringScheme& s;
    int best = std::numeric_limits<int>::min();

    // state: next indices i, j; score so far; last column type (0 diag,
    // 1 gap-in-y, 2 gap-in-x, -1 none)
    void go(size_t i, size_t j, int score, int last) {
      if (i == xs.size() && j == ys.size()) {
        best = std::max(best, score);
        return;
      }
      if (i < xs.size() && j < ys.size())
        go(i + 1, j + 1, score + s.score(xs[i], ys[j]), 0);
      if (i < xs.size()) {
        const int open = last == 1 ? 0 : s.gap_open;
        go(i + 1, j, score - open - s.gap_extend, 1);
      }
      if (j < ys.size()) {
        const int open = last == 2 ? 0 : s.gap_open;
        go(i, j + 1, score - open - s.gap_extend, 2);
      }
    }
  };
  Rec rec{x.symbols, y.symbols, s};
  rec.go(0, 0, 0, -1);
  return rec.best;
}

// Score an explicit alignment with the same affine convention.
inline int score_alignment(const AlignedPair& p, const ScoringScheme& s) {
  int score = 0;
  int run0 = 0, run1 = 0;
  for (size_t i = 0; i < p.length(); ++i) {
    if (p.z0[i] == kGap) {
      score -= (run0 == 0 ? s.gap_open : 0) + s.gap_extend;
      ++run0;
      run1 = 0;
    } else if (p.z1[i] == kGap) {
      score -= (run1 == 0 ? s.gap_open : 0) + s.gap_extend;
      ++run1;
      run0 = 0;
    } else {
      score += s.score(p.z0[i], p.z1[i]);
      run0 = run1 = 0;
    }
  }
  return score;
}

// All sequences of length <= max_len over the alphabet.
inline std::vector<Sequence> all_sequences(const AlphabetPtr& ab, size_t max_len) {
  std::vector<Sequence> out;
  out.emplace_back(ab, std::vector<int>{});
  size_t begin = 0;
  for (size_t len = 1; len <= max_len; ++len) {
    const size_t end = out.size();
    for (size_t i = begin; i < end; ++i)
      for (int a = 0; a < ab->size(); ++a) {
        auto sym = out[i].symbols;
        sym.push_back(a);
        out.emplace_back(ab, std::move(sym));
      }
    begin = end;
  }
  return out;
}

// Central finite difference of a scalar loss with respect to one float32
// parameter. The perturbed values are materialized in float32 and the exact
// realized step is used as the denominator.
inline double fd_param_grad(ModelParams& params, size_t tensor, size_t index,
                            const std::function<double()>& loss, double h = 1e-4) {
  float& slot = params.tensors[tensor].v[index];
  const float saved = slot;
  const float plus = float(double(saved) + h);
  const float minus = float(double(saved) - h);
  slot = plus;
  const double lp = loss();
  slot = minus;
  const double lm = loss();
  slot = saved;
  return (lp - lm) / (double(plus) - double(minus));
}

inline double rel_err(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// One-sample Kolmogorov-Smirnov statistic against an exponential with the
// given rate.
inline double ks_stat_exponential(std::vector<double> samples, double rate) {
  std::sort(samples.begin(), samples.end());
  const double n = double(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 1.0 - std::exp(-rate * samples[i]);
    d = std::max(d, std::abs(cdf - double(i) / n));
    d = std::max(d, std::abs(cdf - double(i + 1) / n));
  }
  return d;
}

// Chi-square statistic for observed counts against uniform expectation.
inline double chi_square_uniform(const std::vector<int>& counts) {
  double total = 0.0;
  for (int c : counts) total += c;
  const double expect = total / double(counts.size());
  double stat = 0.0;
  for (int c : counts) {
    const double d = double(c) - expect;
    stat += d * d / expect;
  }
  return stat;
}

// Dense spectrum feature vector over all |A|^k k-mers.
inline std::vector<int64_t> dense_spectrum(const Sequence& x, int k) {
  const int A = x.alphabet->size();
  size_t total = 1;
  for (int i = 0; i < k; ++i) total *= size_t(A);
  std::vector<int64_t> counts(total, 0);
  if (x.size() < size_t(k)) return counts;
  for (size_t i = 0; i + size_t(k) <= x.size(); ++i) {
    size_t code = 0;
    for (int j = 0; j < k; ++j) code = code * size_t(A) + size_t(x[i + size_t(j)]);
    ++counts[code];
  }
  return counts;
}

inline double dense_kernel(const Sequence& x, const Sequence& y, int k) {
  const auto fx = dense_spectrum(x, k);
  const auto fy = dense_spectrum(y, k);
  double dot = 0.0;
  for (size_t i = 0; i < fx.size(); ++i) dot += double(fx[i]) * double(fy[i]);
  return dot;
}

inline double dense_mmd2(const std::vector<Sequence>& X, const std::vector<Sequence>& Y, int k) {
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& a : X)
    for (const auto& b : X) sxx += dense_kernel(a, b, k);
  for (const auto& a : Y)
    for (const auto& b : Y) syy += dense_kernel(a, b, k);
  for (const auto& a : X)
    for (const auto& b : Y) sxy += dense_kernel(a, b, k);
  const double n = double(X.size()), m = double(Y.size());
  return sxx / (n * n) + syy / (m * m) - 2.0 * sxy / (n * m);
}

}  // namespace evoflow::testing
