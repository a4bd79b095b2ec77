#include "evoflow/align.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace evoflow {

namespace {

// BLOSUM62, rows/cols in ARNDCQEGHILKMFPSTWYV order.
constexpr int kBlosum62[20][20] = {
    {4, -1, -2, -2, 0, -1, -1, 0, -2, -1, -1, -1, -1, -2, -1, 1, 0, -3, -2, 0},
    {-1, 5, 0, -2, -3, 1, 0, -2, 0, -3, -2, 2, -1, -3, -2, -1, -1, -3, -2, -3},
    {-2, 0, 6, 1, -3, 0, 0, 0, 1, -3, -3, 0, -2, -3, -2, 1, 0, -4, -2, -3},
    {-2, -2, 1, 6, -3, 0, 2, -1, -1, -3, -4, -1, -3, -3, -1, 0, -1, -4, -3, -3},
    {0, -3, -3, -3, 9, -3, -4, -3, -3, -1, -1, -3, -1, -2, -3, -1, -1, -2, -2, -1},
    {-1, 1, 0, 0, -3, 5, 2, -2, 0, -3, -2, 1, 0, -3, -1, 0, -1, -2, -1, -2},
    {-1, 0, 0, 2, -4, 2, 5, -2, 0, -3, -3, 1, -2, -3, -1, 0, -1, -3, -2, -2},
    {0, -2, 0, -1, -3, -2, -2, 6, -2, -4, -4, -2, -3, -3, -2, 0, -2, -2, -3, -3},
    {-2, 0, 1, -1, -3, 0, 0, -2, 8, -3, -3, -1, -2, -1, -2, -1, -2, -2, 2, -3},
    {-1, -3, -3, -3, -1, -3, -3, -4, -3, 4, 2, -3, 1, 0, -3, -2, -1, -3, -1, 3},
    {-1, -2, -3, -4, -1, -2, -3, -4, -3, 2, 4, -2, 2, 0, -3, -2, -1, -2, -1, 1},
    {-1, 2, 0, -1, -3, 1, 1, -2, -1, -3, -2, 5, -1, -3, -1, 0, -1, -3, -2, -2},
    {-1, -1, -2, -3, -1, 0, -2, -3, -2, 1, 2, -1, 5, 0, -2, -1, -1, -1, -1, 1},
    {-2, -3, -3, -3, -2, -3, -3, -3, -1, 0, 0, -3, 0, 6, -4, -2, -2, 1, 3, -1},
    {-1, -2, -2, -1, -3, -1, -1, -2, -2, -3, -3, -1, -2, -4, 7, -1, -1, -4, -3, -2},
    {1, -1, 1, 0, -1, 0, 0, 0, -1, -2, -2, 0, -1, -2, -1, 4, 1, -3, -2, -2},
    {0, -1, 0, -1, -1, -1, -1, -2, -2, -1, -1, -1, -1, -2, -1, 1, 5, -2, -2, 0},
    {-3, -3, -4, -4, -2, -2, -3, -2, -2, -3, -2, -3, -1, 1, -4, -3, -2, 11, 2, -3},
    {-2, -2, -2, -3, -2, -1, -2, -3, 2, -1, -1, -2, -1, 3, -3, -2, -2, 2, 7, -2},
    {0, -3, -3, -3, -1, -2, -2, -3, -3, 3, 1, -2, 1, -1, -2, -2, 0, -3, -2, 4}};

constexpr double kBlosum62Background[20] = {
    0.074, 0.052, 0.045, 0.054, 0.025, 0.034, 0.054, 0.074, 0.026, 0.068,
    0.099, 0.058, 0.025, 0.047, 0.039, 0.057, 0.051, 0.013, 0.032, 0.073};

constexpr int kNegInf = std::numeric_limits<int>::min() / 4;

}  // namespace

ScoringScheme ScoringScheme::blosum62() {
  ScoringScheme s;
  s.alphabet = Alphabet::amino20();
  s.matrix.resize(400);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) s.matrix[size_t(i) * 20 + j] = kBlosum62[i][j];
  s.gap_open = 10;
  s.gap_extend = 1;
  return s;
}

const std::vector<double>& blosum62_background() {
  static const std::vector<double> bg(kBlosum62Background, kBlosum62Background + 20);
  return bg;
}

ScoringScheme ScoringScheme::simple(const AlphabetPtr& ab, int match, int mismatch,
                                    int gap_open, int gap_extend) {
  ScoringScheme s;
  s.alphabet = ab;
  const int n = ab->size();
  s.matrix.assign(size_t(n) * n, mismatch);
  for (int i = 0; i < n; ++i) s.matrix[size_t(i) * n + i] = match;
  s.gap_open = gap_open;
  s.gap_extend = gap_extend;
  s.validate();
  return s;
}

ScoringScheme ScoringScheme::parse_matrix(std::istream& in, const AlphabetPtr& ab,
                                          int gap_open, int gap_extend) {
  std::string line;
  std::vector<char> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream hs(line);
    std::string tok;
    while (hs >> tok) {
      if (tok.size() != 1) throw std::runtime_error("matrix: bad header symbol '" + tok + "'");
      header.push_back(tok[0]);
    }
    break;
  }
  if (header.empty()) throw std::runtime_error("matrix: missing header row");

  std::map<std::pair<char, char>, int> entries;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream rs(line);
    std::string sym;
    if (!(rs >> sym)) continue;
    if (sym.size() != 1) throw std::runtime_error("matrix: bad row symbol '" + sym + "'");
    for (char h : header) {
      int v;
      if (!(rs >> v)) throw std::runtime_error(std::string("matrix: short row for '") + sym + "'");
      entries[{sym[0], h}] = v;
    }
  }

  ScoringScheme s;
  s.alphabet = ab;
  const int n = ab->size();
  s.matrix.assign(size_t(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto it = entries.find({ab->token(i), ab->token(j)});
      if (it == entries.end())
        throw std::runtime_error(std::string("matrix: missing entry for '") + ab->token(i) +
                                 "' vs '" + ab->token(j) + "'");
      s.matrix[size_t(i) * n + j] = it->second;
    }
  }
  s.gap_open = gap_open;
  s.gap_extend = gap_extend;
  s.validate();
  return s;
}

void ScoringScheme::validate() const {
  const int n = alphabet->size();
  if (int(matrix.size()) != n * n) throw std::invalid_argument("ScoringScheme: bad matrix size");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (matrix[size_t(i) * n + j] != matrix[size_t(j) * n + i])
        throw std::invalid_argument("ScoringScheme: matrix not symmetric");
  if (gap_open < 0 || gap_extend < 0)
    throw std::invalid_argument("ScoringScheme: negative gap penalty");
}

AlignedPair AlignedPair::from_strings(const AlphabetPtr& ab, std::string_view a,
                                      std::string_view b) {
  if (a.size() != b.size())
    throw std::invalid_argument("AlignedPair: rows differ in length");
  AlignedPair p;
  p.alphabet = ab;
  p.z0.reserve(a.size());
  p.z1.reserve(b.size());
  for (char c : a) p.z0.push_back(c == ab->gap_symbol() ? kGap : ab->index_of(c));
  for (char c : b) p.z1.push_back(c == ab->gap_symbol() ? kGap : ab->index_of(c));
  p.validate();
  return p;
}

void AlignedPair::validate() const {
  if (z0.size() != z1.size()) throw std::invalid_argument("AlignedPair: rows differ in length");
  for (size_t i = 0; i < z0.size(); ++i)
    if (z0[i] == kGap && z1[i] == kGap)
      throw std::invalid_argument("AlignedPair: double-gap column");
}

AlignmentResult nw_align(const Sequence& x, const Sequence& y, const ScoringScheme& scoring) {
  require_same_alphabet(x, y, "nw_align");
  if (!(*x.alphabet == *scoring.alphabet))
    throw std::invalid_argument("nw_align: scoring alphabet mismatch");

  const int n = int(x.size());
  const int m = int(y.size());
  const int open = scoring.gap_open;
  const int ext = scoring.gap_extend;

  // Gotoh three-state DP. M ends in a substitution column, X ends with a gap
  // in y (x consumed), Y ends with a gap in x (y consumed).
  const auto idx = [m](int i, int j) { return size_t(i) * size_t(m + 1) + size_t(j); };
  std::vector<int> M(size_t(n + 1) * (m + 1), kNegInf);
  std::vector<int> X(size_t(n + 1) * (m + 1), kNegInf);
  std::vector<int> Y(size_t(n + 1) * (m + 1), kNegInf);

  M[idx(0, 0)] = 0;
  for (int i = 1; i <= n; ++i) X[idx(i, 0)] = -(open + i * ext);
  for (int j = 1; j <= m; ++j) Y[idx(0, j)] = -(open + j * ext);

  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= m; ++j) {
      const int s = scoring.score(x[size_t(i - 1)], y[size_t(j - 1)]);
      const int dm = std::max({M[idx(i - 1, j - 1)], X[idx(i - 1, j - 1)], Y[idx(i - 1, j - 1)]});
      M[idx(i, j)] = dm + s;
      X[idx(i, j)] = std::max({M[idx(i - 1, j)] - open - ext, X[idx(i - 1, j)] - ext,
                               Y[idx(i - 1, j)] - open - ext});
      Y[idx(i, j)] = std::max({M[idx(i, j - 1)] - open - ext, X[idx(i, j - 1)] - open - ext,
                               Y[idx(i, j - 1)] - ext});
    }
  }

  // State selection everywhere prefers M, then X, then Y on ties.
  enum State { SM = 0, SX = 1, SY = 2 };
  const auto pick = [](int vm, int vx, int vy) {
    if (vm >= vx && vm >= vy) return SM;
    if (vx >= vy) return SX;
    return SY;
  };

  int i = n, j = m;
  State st = pick(M[idx(n, m)], X[idx(n, m)], Y[idx(n, m)]);
  const int best = std::max({M[idx(n, m)], X[idx(n, m)], Y[idx(n, m)]});

  std::vector<int> rz0, rz1;  // built backwards
  rz0.reserve(size_t(n + m));
  rz1.reserve(size_t(n + m));
  while (i > 0 || j > 0) {
    if (st == SM) {
      // i, j > 0 whenever the M state is reachable here.
      const int s = scoring.score(x[size_t(i - 1)], y[size_t(j - 1)]);
      rz0.push_back(x[size_t(i - 1)]);
      rz1.push_back(y[size_t(j - 1)]);
      const int want = M[idx(i, j)] - s;
      --i;
      --j;
      if (i == 0 && j == 0) break;
      st = pick(M[idx(i, j)] == want ? want : kNegInf, X[idx(i, j)] == want ? want : kNegInf,
                Y[idx(i, j)] == want ? want : kNegInf);
    } else if (st == SX) {
      rz0.push_back(x[size_t(i - 1)]);
      rz1.push_back(kGap);
      const int cur = X[idx(i, j)];
      --i;
      const bool fm = M[idx(i, j)] - open - ext == cur;
      const bool fx = X[idx(i, j)] - ext == cur;
      const bool fy = Y[idx(i, j)] - open - ext == cur;
      st = pick(fm ? 0 : kNegInf, fx ? 0 : kNegInf, fy ? 0 : kNegInf);
    } else {
      rz0.push_back(kGap);
      rz1.push_back(y[size_t(j - 1)]);
      const int cur = Y[idx(i, j)];
      --j;
      const bool fm = M[idx(i, j)] - open - ext == cur;
      const bool fx = X[idx(i, j)] - open - ext == cur;
      const bool fy = Y[idx(i, j)] - ext == cur;
      st = pick(fm ? 0 : kNegInf, fx ? 0 : kNegInf, fy ? 0 : kNegInf);
    }
  }
  std::reverse(rz0.begin(), rz0.end());
  std::reverse(rz1.begin(), rz1.end());

  AlignmentResult res;
  res.pair.alphabet = x.alphabet;
  res.pair.z0 = std::move(rz0);
  res.pair.z1 = std::move(rz1);
  res.score = best;
  res.pair.validate();
  return res;
}

const char* edit_label_name(EditLabel l) {
  switch (l) {
    case EditLabel::NoOp: return "noop";
    case EditLabel::Sub: return "sub";
    case EditLabel::Ins: return "ins";
    case EditLabel::Del: return "del";
  }
  return "?";
}

LabeledEdits extract_edit_labels(const AlignedPair& pair) {
  pair.validate();
  LabeledEdits out;
  out.labels.reserve(pair.length());
  // cur tracks the position in the intermediate sequence built by applying
  // the script emitted so far, so positions follow apply_edits' convention.
  int cur = 0;
  for (size_t i = 0; i < pair.length(); ++i) {
    const int a = pair.z0[i];
    const int b = pair.z1[i];
    if (a == kGap) {
      out.labels.push_back(EditLabel::Ins);
      out.script.push_back(EditOp::ins(cur, b));
      ++cur;
    } else if (b == kGap) {
      out.labels.push_back(EditLabel::Del);
      out.script.push_back(EditOp::del(cur));
    } else if (a != b) {
      out.labels.push_back(EditLabel::Sub);
      out.script.push_back(EditOp::sub(cur, b));
      ++cur;
    } else {
      out.labels.push_back(EditLabel::NoOp);
      ++cur;
    }
  }
  return out;
}

int levenshtein(const Sequence& x, const Sequence& y) {
  require_same_alphabet(x, y, "levenshtein");
  const size_t n = x.size(), m = y.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = int(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = int(i);
    for (size_t j = 1; j <= m; ++j) {
      const int subcost = prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1);
      cur[j] = std::min({subcost, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace evoflow
