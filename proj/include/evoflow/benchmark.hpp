#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "evoflow/align.hpp"
#include "evoflow/sampler.hpp"

namespace evoflow {

// Position-dependent edit rules on a source sequence z0 (0-indexed):
//   - 'A' at i triggers Sub(i+5, 'H')   when i+5 < L
//   - 'C' at i triggers Ins(i-2, 'S')   when i-2 >= 0 (insert before i-2)
//   - 'G' at i triggers Del(i)          when some 'L' precedes and some 'K'
//                                       follows i
// Conflicts: a substitution landing on a deleted position is dropped; when
// two substitutions target one position the lower trigger index wins.
struct RuleTriggers {
  char sub_trigger = 'A';
  int sub_offset = 5;
  char sub_token = 'H';
  char ins_trigger = 'C';
  int ins_offset = -2;
  char ins_token = 'S';
  bool ins_before = true;  // insert before the target index
  char del_trigger = 'G';
  char del_left = 'L';
  char del_right = 'K';
};

// Per-position edit events in z0 coordinates. Insertion anchors are
// canonicalized to the next surviving (non-deleted) z0 position at or after
// the raw insertion point, which makes them recoverable from the final
// sequence regardless of the order edits fired in. Substitutions that would
// rewrite a position with its current token are dropped: they are not
// transitions in the edit space and no observer can detect them.
struct RuleEvents {
  std::vector<uint8_t> ins_before;  // size L+1, count of insertions per slot
  std::vector<int> ins_token;      // size L+1, -1 when absent
  std::vector<uint8_t> deleted;    // size L
  std::vector<uint8_t> subbed;     // size L
  std::vector<int> sub_token;      // size L, -1 when absent
};

// Single 4-class label per z0 position with precedence Ins > Del > Sub.
std::vector<EditLabel> events_to_labels(const RuleEvents& ev, size_t length);

struct RuleEditCase {
  Sequence z0;
  Sequence z1;
  EditScript script;  // canonical z0-coordinate order: ins, del, sub
  RuleEvents events;
  std::vector<EditLabel> labels;  // per z0 position
  AlignedPair alignment;          // exact construction alignment
};

// Collect the rule-triggered edits for z0.
RuleEvents gen_rule_edits(const Sequence& z0, const RuleTriggers& rules = {});

// Apply the collected edits: insertions in increasing index order, then
// deletions, then substitutions, all in z0 coordinates. Also returns the
// exact alignment between z0 and the result.
std::pair<Sequence, AlignedPair> apply_rule_edits(const Sequence& z0, const RuleEvents& ev);

RuleEditCase build_rule_case(const Sequence& z0, const RuleTriggers& rules = {});
std::vector<RuleEditCase> build_rule_dataset(const std::vector<Sequence>& source,
                                             const RuleTriggers& rules = {});

// Random sequences with letters drawn from the substitution-matrix background
// frequencies; the deterministic benchmark corpus.
std::vector<Sequence> random_protein_corpus(int count, int len_min, int len_max, uint64_t seed);

// Predicted per-position events extracted from a sampled trajectory by
// tracking each position's provenance back to z0 coordinates. Exact: no
// re-alignment involved.
RuleEvents events_from_trajectory(const Trajectory& traj, size_t z0_length);

// Fallback scoring path: re-align the output to z0 and read events off the
// alignment labels.
RuleEvents events_from_alignment(const Sequence& z0, const Sequence& y,
                                 const ScoringScheme& scoring);

enum class BenchScoring { Trajectory, Alignment };

struct ClassRow {
  double clock = 0.0;
  EditLabel cls = EditLabel::NoOp;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  double precision_lo = 0.0, precision_hi = 0.0;
  double recall_lo = 0.0, recall_hi = 0.0;
  double f1_lo = 0.0, f1_hi = 0.0;
};

using Confusion = std::array<std::array<int64_t, 4>, 4>;  // [truth][predicted]

struct LengthBinRow {
  double clock = 0.0;
  int len_lo = 0, len_hi = 0;
  std::array<double, 4> f1{};  // per class
};

struct ClassificationReport {
  std::vector<double> clock_values;
  std::vector<ClassRow> rows;          // classes x clocks
  std::vector<Confusion> confusion;    // per clock
  std::array<double, 4> prevalence{};  // ground-truth class fractions
  std::vector<LengthBinRow> f1_by_length;
};

struct BenchEvalConfig {
  std::vector<double> clock_values{1.0};
  SamplerConfig sampler;
  BenchScoring scoring = BenchScoring::Trajectory;
  int bootstrap_resamples = 1000;
  double bootstrap_level = 0.95;
  uint64_t seed = 0;
};

// Factory producing a fresh rate source per case: the model under test, or
// an oracle built from the case's ground-truth alignment.
using RateSourceFactory = std::function<std::unique_ptr<RateSource>(const RuleEditCase&)>;

RateSourceFactory model_source_factory(const ModelConfig& config, const ModelParams& params);
RateSourceFactory oracle_source_factory(Schedule schedule);

ClassificationReport evaluate_edit_classification(const RateSourceFactory& make_source,
                                                  const std::vector<RuleEditCase>& cases,
                                                  const BenchEvalConfig& config);

void write_classification_report(std::ostream& out, const ClassificationReport& report);
void write_classification_csv(std::ostream& out, const ClassificationReport& report);

}  // namespace evoflow
