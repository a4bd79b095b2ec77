#include "evoflow/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "evoflow/rng.hpp"

namespace evoflow {

std::vector<EditLabel> events_to_labels(const RuleEvents& ev, size_t length) {
  std::vector<EditLabel> labels(length, EditLabel::NoOp);
  for (size_t j = 0; j < length; ++j) {
    if (ev.ins_before[j]) {
      labels[j] = EditLabel::Ins;
    } else if (ev.deleted[j]) {
      labels[j] = EditLabel::Del;
    } else if (ev.subbed[j]) {
      labels[j] = EditLabel::Sub;
    }
  }
  return labels;
}

RuleEvents gen_rule_edits(const Sequence& z0, const RuleTriggers& rules) {
  const auto& ab = *z0.alphabet;
  const int L = int(z0.size());
  const int sub_trigger = ab.index_of(rules.sub_trigger);
  const int sub_token = ab.index_of(rules.sub_token);
  const int ins_trigger = ab.index_of(rules.ins_trigger);
  const int ins_token = ab.index_of(rules.ins_token);
  const int del_trigger = ab.index_of(rules.del_trigger);
  const int del_left = ab.index_of(rules.del_left);
  const int del_right = ab.index_of(rules.del_right);

  RuleEvents ev;
  ev.ins_before.assign(size_t(L) + 1, 0);
  ev.ins_token.assign(size_t(L) + 1, -1);
  ev.deleted.assign(size_t(L), 0);
  ev.subbed.assign(size_t(L), 0);
  ev.sub_token.assign(size_t(L), -1);

  // Substitutions: lowest trigger index claims a target first (the token is
  // fixed by the rule, so later triggers are simply redundant). Targets that
  // already hold the rule token are skipped: a self-substitution is not a
  // transition and leaves no trace in z1.
  for (int i = 0; i < L; ++i) {
    if (z0[size_t(i)] != sub_trigger) continue;
    const int target = i + rules.sub_offset;
    if (target < 0 || target >= L) continue;
    if (z0[size_t(target)] == sub_token) continue;
    if (!ev.subbed[size_t(target)]) {
      ev.subbed[size_t(target)] = 1;
      ev.sub_token[size_t(target)] = sub_token;
    }
  }

  // Deletions: trigger flanked by del_left somewhere before and del_right
  // somewhere after.
  std::vector<uint8_t> has_left(size_t(L) + 1, 0), has_right(size_t(L) + 1, 0);
  for (int i = 0; i < L; ++i)
    has_left[size_t(i) + 1] = has_left[size_t(i)] | uint8_t(z0[size_t(i)] == del_left);
  for (int i = L - 1; i >= 0; --i)
    has_right[size_t(i)] = has_right[size_t(i) + 1] | uint8_t(z0[size_t(i)] == del_right);
  for (int i = 0; i < L; ++i)
    if (z0[size_t(i)] == del_trigger && has_left[size_t(i)] && has_right[size_t(i) + 1])
      ev.deleted[size_t(i)] = 1;

  // A substitution landing on a deleted position is dropped.
  for (int i = 0; i < L; ++i)
    if (ev.deleted[size_t(i)]) {
      ev.subbed[size_t(i)] = 0;
      ev.sub_token[size_t(i)] = -1;
    }

  // Insertions, anchored to the next surviving position at or after the raw
  // target so the anchor survives neighboring deletions.
  for (int i = 0; i < L; ++i) {
    if (z0[size_t(i)] != ins_trigger) continue;
    const int target = i + rules.ins_offset + (rules.ins_before ? 0 : 1);
    if (target < 0 || target > L) continue;
    int anchor = target;
    while (anchor < L && ev.deleted[size_t(anchor)]) ++anchor;
    ++ev.ins_before[size_t(anchor)];
    ev.ins_token[size_t(anchor)] = ins_token;
  }
  return ev;
}

std::pair<Sequence, AlignedPair> apply_rule_edits(const Sequence& z0, const RuleEvents& ev) {
  const int L = int(z0.size());
  AlignedPair aligned;
  aligned.alphabet = z0.alphabet;
  for (int j = 0; j <= L; ++j) {
    for (int c = 0; c < int(ev.ins_before[size_t(j)]); ++c) {
      aligned.z0.push_back(kGap);
      aligned.z1.push_back(ev.ins_token[size_t(j)]);
    }
    if (j == L) break;
    aligned.z0.push_back(z0[size_t(j)]);
    if (ev.deleted[size_t(j)]) {
      aligned.z1.push_back(kGap);
    } else if (ev.subbed[size_t(j)]) {
      aligned.z1.push_back(ev.sub_token[size_t(j)]);
    } else {
      aligned.z1.push_back(z0[size_t(j)]);
    }
  }
  aligned.validate();
  return {aligned.x1(), aligned};
}

RuleEditCase build_rule_case(const Sequence& z0, const RuleTriggers& rules) {
  RuleEditCase c;
  c.z0 = z0;
  c.events = gen_rule_edits(z0, rules);
  auto [z1, alignment] = apply_rule_edits(z0, c.events);
  c.z1 = std::move(z1);
  c.alignment = std::move(alignment);
  c.labels = events_to_labels(c.events, z0.size());
  const int L = int(z0.size());
  for (int j = 0; j <= L; ++j)
    if (c.events.ins_before[size_t(j)])
      c.script.push_back(EditOp::ins(j, c.events.ins_token[size_t(j)]));
  for (int j = 0; j < L; ++j)
    if (c.events.deleted[size_t(j)]) c.script.push_back(EditOp::del(j));
  for (int j = 0; j < L; ++j)
    if (c.events.subbed[size_t(j)]) c.script.push_back(EditOp::sub(j, c.events.sub_token[size_t(j)]));
  return c;
}

std::vector<RuleEditCase> build_rule_dataset(const std::vector<Sequence>& source,
                                             const RuleTriggers& rules) {
  if (source.empty()) throw std::invalid_argument("build_rule_dataset: empty source");
  std::vector<RuleEditCase> cases;
  cases.reserve(source.size());
  for (const auto& z0 : source) cases.push_back(build_rule_case(z0, rules));
  return cases;
}

std::vector<Sequence> random_protein_corpus(int count, int len_min, int len_max, uint64_t seed) {
  if (count <= 0 || len_min < 1 || len_max < len_min)
    throw std::invalid_argument("random_protein_corpus: bad arguments");
  const AlphabetPtr ab = Alphabet::amino20();
  const auto& bg = blosum62_background();
  Rng rng(seed);
  std::vector<Sequence> out;
  out.reserve(size_t(count));
  for (int n = 0; n < count; ++n) {
    const int len = len_min + rng.uniform_int(len_max - len_min + 1);
    std::vector<int> sym(static_cast<size_t>(len), 0);
    for (auto& s : sym) s = rng.categorical(bg);
    out.emplace_back(ab, std::move(sym));
  }
  return out;
}

RuleEvents events_from_trajectory(const Trajectory& traj, size_t z0_length) {
  const int L = int(z0_length);
  RuleEvents ev;
  ev.ins_before.assign(size_t(L) + 1, 0);
  ev.ins_token.assign(size_t(L) + 1, -1);
  ev.deleted.assign(size_t(L), 0);
  ev.subbed.assign(size_t(L), 0);
  ev.sub_token.assign(size_t(L), -1);

  struct Entry {
    int origin;  // z0 index, or -1 for inserted symbols
    int token;   // current token of inserted symbols
  };
  std::vector<Entry> entries;
  entries.reserve(z0_length);
  for (int j = 0; j < L; ++j) entries.push_back({j, -1});

  for (const auto& event : traj.events) {
    const EditOp& op = event.op;
    switch (op.kind) {
      case EditKind::Sub: {
        Entry& e = entries.at(size_t(op.pos));
        if (e.origin >= 0) {
          ev.subbed[size_t(e.origin)] = 1;
          ev.sub_token[size_t(e.origin)] = op.token;
        } else {
          e.token = op.token;  // re-substituted insertion stays an insertion
        }
        break;
      }
      case EditKind::Del: {
        const Entry e = entries.at(size_t(op.pos));
        if (e.origin >= 0) {
          ev.deleted[size_t(e.origin)] = 1;
          ev.subbed[size_t(e.origin)] = 0;
          ev.sub_token[size_t(e.origin)] = -1;
        }
        // Deleting an inserted symbol cancels the insertion entirely.
        entries.erase(entries.begin() + op.pos);
        break;
      }
      case EditKind::Ins:
        entries.insert(entries.begin() + op.pos, {-1, op.token});
        break;
    }
  }

  // Resolve insertion anchors against the final configuration: the next
  // surviving original to the right, matching the ground-truth convention.
  for (size_t e = 0; e < entries.size(); ++e) {
    if (entries[e].origin >= 0) continue;
    int anchor = L;
    for (size_t k = e + 1; k < entries.size(); ++k)
      if (entries[k].origin >= 0) {
        anchor = entries[k].origin;
        break;
      }
    ++ev.ins_before[size_t(anchor)];
    ev.ins_token[size_t(anchor)] = entries[e].token;
  }
  return ev;
}

RuleEvents events_from_alignment(const Sequence& z0, const Sequence& y,
                                 const ScoringScheme& scoring) {
  const int L = int(z0.size());
  RuleEvents ev;
  ev.ins_before.assign(size_t(L) + 1, 0);
  ev.ins_token.assign(size_t(L) + 1, -1);
  ev.deleted.assign(size_t(L), 0);
  ev.subbed.assign(size_t(L), 0);
  ev.sub_token.assign(size_t(L), -1);

  const AlignmentResult res = nw_align(z0, y, scoring);
  const auto coord = augmented_to_ungapped(res.pair.z0);
  std::vector<std::pair<int, int>> raw_ins;  // (slot, token)
  for (size_t i = 0; i < res.pair.length(); ++i) {
    const int a = res.pair.z0[i];
    const int b = res.pair.z1[i];
    if (a == kGap) {
      raw_ins.emplace_back(coord[i].value, b);
    } else if (b == kGap) {
      ev.deleted[size_t(coord[i].value)] = 1;
    } else if (a != b) {
      ev.subbed[size_t(coord[i].value)] = 1;
      ev.sub_token[size_t(coord[i].value)] = b;
    }
  }
  // Canonicalize insertion anchors past deleted positions, as in the
  // trajectory path.
  for (const auto& [slot, token] : raw_ins) {
    int anchor = slot;
    while (anchor < L && ev.deleted[size_t(anchor)]) ++anchor;
    ++ev.ins_before[size_t(anchor)];
    ev.ins_token[size_t(anchor)] = token;
  }
  return ev;
}

RateSourceFactory model_source_factory(const ModelConfig& config, const ModelParams& params) {
  return [config, params](const RuleEditCase&) -> std::unique_ptr<RateSource> {
    return std::make_unique<NeuralRateSource>(config, params);
  };
}

RateSourceFactory oracle_source_factory(Schedule schedule) {
  return [schedule](const RuleEditCase& c) -> std::unique_ptr<RateSource> {
    return std::make_unique<OracleRateSource>(c.alignment, schedule);
  };
}

namespace {

struct ClassCounts {
  double precision(int c, const Confusion& m) const {
    int64_t tp = m[size_t(c)][size_t(c)], pred = 0;
    for (int r = 0; r < 4; ++r) pred += m[size_t(r)][size_t(c)];
    return pred > 0 ? double(tp) / double(pred) : 0.0;
  }
  double recall(int c, const Confusion& m) const {
    int64_t tp = m[size_t(c)][size_t(c)], truth = 0;
    for (int p = 0; p < 4; ++p) truth += m[size_t(c)][size_t(p)];
    return truth > 0 ? double(tp) / double(truth) : 0.0;
  }
  double f1(int c, const Confusion& m) const {
    const double p = precision(c, m), r = recall(c, m);
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }
};

Confusion add(const Confusion& a, const Confusion& b) {
  Confusion out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[size_t(i)][size_t(j)] = a[size_t(i)][size_t(j)] + b[size_t(i)][size_t(j)];
  return out;
}

double percentile(std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double idx = q * double(v.size() - 1);
  const size_t lo = size_t(std::floor(idx));
  const size_t hi = size_t(std::ceil(idx));
  const double w = idx - double(lo);
  return v[lo] * (1.0 - w) + v[hi] * w;
}

}  // namespace

ClassificationReport evaluate_edit_classification(const RateSourceFactory& make_source,
                                                  const std::vector<RuleEditCase>& cases,
                                                  const BenchEvalConfig& config) {
  if (cases.empty()) throw std::invalid_argument("evaluate_edit_classification: no cases");
  config.sampler.validate();

  ClassificationReport report;
  report.clock_values = config.clock_values;

  // Ground-truth prevalence, clock-independent.
  std::array<int64_t, 4> label_counts{};
  int64_t total_positions = 0;
  for (const auto& c : cases)
    for (EditLabel l : c.labels) {
      ++label_counts[size_t(l)];
      ++total_positions;
    }
  for (int k = 0; k < 4; ++k)
    report.prevalence[size_t(k)] =
        total_positions > 0 ? double(label_counts[size_t(k)]) / double(total_positions) : 0.0;

  const ScoringScheme realign_scoring =
      cases.front().z0.alphabet->tokens() == Alphabet::amino20()->tokens()
          ? ScoringScheme::blosum62()
          : ScoringScheme::simple(cases.front().z0.alphabet, 2, -1, 3, 1);

  ClassCounts stats;
  size_t min_len = cases.front().z0.size(), max_len = min_len;
  for (const auto& c : cases) {
    min_len = std::min(min_len, c.z0.size());
    max_len = std::max(max_len, c.z0.size());
  }

  for (size_t ci = 0; ci < config.clock_values.size(); ++ci) {
    const double clock = config.clock_values[ci];
    SamplerConfig scfg = config.sampler;
    scfg.clock_norm = clock;

    std::vector<Confusion> per_case(cases.size(), Confusion{});
    for (size_t n = 0; n < cases.size(); ++n) {
      const RuleEditCase& c = cases[n];
      auto source = make_source(c);
      Rng rng(config.seed ^ (0x9e3779b97f4a7c15ULL * (n + 1)) ^ (0xbf58476d1ce4e5b9ULL * (ci + 1)));
      const Trajectory traj = generate(c.z0, *source, scfg, rng);

      const RuleEvents pred_events =
          config.scoring == BenchScoring::Trajectory
              ? events_from_trajectory(traj, c.z0.size())
              : events_from_alignment(c.z0, traj.final_sequence, realign_scoring);
      const auto pred = events_to_labels(pred_events, c.z0.size());

      for (size_t j = 0; j < c.labels.size(); ++j)
        ++per_case[n][size_t(c.labels[j])][size_t(pred[j])];
    }

    Confusion totals{};
    for (const auto& m : per_case) totals = add(totals, m);
    report.confusion.push_back(totals);

    // Bootstrap over cases.
    const double lo_q = (1.0 - config.bootstrap_level) / 2.0;
    const double hi_q = 1.0 - lo_q;
    std::array<std::vector<double>, 4> boot_p, boot_r, boot_f;
    Rng brng(config.seed ^ 0x5bd1e9955bd1e995ULL ^ ci);
    for (int b = 0; b < config.bootstrap_resamples; ++b) {
      Confusion m{};
      for (size_t n = 0; n < cases.size(); ++n)
        m = add(m, per_case[size_t(brng.uniform_int(int(cases.size())))]);
      for (int k = 0; k < 4; ++k) {
        boot_p[size_t(k)].push_back(stats.precision(k, m));
        boot_r[size_t(k)].push_back(stats.recall(k, m));
        boot_f[size_t(k)].push_back(stats.f1(k, m));
      }
    }

    for (int k = 0; k < 4; ++k) {
      ClassRow row;
      row.clock = clock;
      row.cls = EditLabel(k);
      row.precision = stats.precision(k, totals);
      row.recall = stats.recall(k, totals);
      row.f1 = stats.f1(k, totals);
      if (config.bootstrap_resamples > 0) {
        row.precision_lo = percentile(boot_p[size_t(k)], lo_q);
        row.precision_hi = percentile(boot_p[size_t(k)], hi_q);
        row.recall_lo = percentile(boot_r[size_t(k)], lo_q);
        row.recall_hi = percentile(boot_r[size_t(k)], hi_q);
        row.f1_lo = percentile(boot_f[size_t(k)], lo_q);
        row.f1_hi = percentile(boot_f[size_t(k)], hi_q);
      }
      report.rows.push_back(row);
    }

    // F1 by sequence-length bin.
    const int nbins = max_len > min_len ? 5 : 1;
    const double width = max_len > min_len ? double(max_len - min_len + 1) / nbins : 1.0;
    for (int bin = 0; bin < nbins; ++bin) {
      const int lo = int(double(min_len) + bin * width);
      const int hi = bin + 1 == nbins ? int(max_len) : int(double(min_len) + (bin + 1) * width) - 1;
      Confusion m{};
      bool any = false;
      for (size_t n = 0; n < cases.size(); ++n) {
        const int len = int(cases[n].z0.size());
        if (len < lo || len > hi) continue;
        m = add(m, per_case[n]);
        any = true;
      }
      if (!any) continue;
      LengthBinRow lr;
      lr.clock = clock;
      lr.len_lo = lo;
      lr.len_hi = hi;
      for (int k = 0; k < 4; ++k) lr.f1[size_t(k)] = stats.f1(k, m);
      report.f1_by_length.push_back(lr);
    }
  }
  return report;
}

void write_classification_report(std::ostream& out, const ClassificationReport& report) {
  out << "edit classification report\n";
  out << "prevalence:";
  for (int k = 0; k < 4; ++k)
    out << ' ' << edit_label_name(EditLabel(k)) << '=' << report.prevalence[size_t(k)];
  out << "\n\n";
  for (size_t ci = 0; ci < report.clock_values.size(); ++ci) {
    out << "clock " << report.clock_values[ci] << '\n';
    out << "  class       precision            recall               f1\n";
    for (const auto& row : report.rows) {
      if (row.clock != report.clock_values[ci]) continue;
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "  %-8s  %.3f [%.3f,%.3f]  %.3f [%.3f,%.3f]  %.3f [%.3f,%.3f]",
                    edit_label_name(row.cls), row.precision, row.precision_lo, row.precision_hi,
                    row.recall, row.recall_lo, row.recall_hi, row.f1, row.f1_lo, row.f1_hi);
      out << buf << '\n';
    }
    out << "  confusion (rows=truth, cols=predicted; noop ins sub del):\n";
    for (int r = 0; r < 4; ++r) {
      out << "    " << edit_label_name(EditLabel(r)) << ':';
      for (int p = 0; p < 4; ++p) out << ' ' << report.confusion[ci][size_t(r)][size_t(p)];
      out << '\n';
    }
    out << '\n';
  }
  if (!report.f1_by_length.empty()) {
    out << "f1 by length bin (class columns: noop ins sub del)\n";
    for (const auto& lr : report.f1_by_length) {
      out << "  clock " << lr.clock << " len [" << lr.len_lo << ',' << lr.len_hi << "]:";
      for (int k = 0; k < 4; ++k) out << ' ' << lr.f1[size_t(k)];
      out << '\n';
    }
  }
}

void write_classification_csv(std::ostream& out, const ClassificationReport& report) {
  out << "class,clock,precision,recall,f1,ci_low,ci_high\n";
  for (const auto& row : report.rows) {
    out << edit_label_name(row.cls) << ',' << row.clock << ',' << row.precision << ','
        << row.recall << ',' << row.f1 << ',' << row.f1_lo << ',' << row.f1_hi << '\n';
  }
}

}  // namespace evoflow
