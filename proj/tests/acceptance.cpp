// Acceptance suite: one self-contained check per criterion, each printing a
// single PASS/FAIL line. Run everything with no arguments or one criterion
// with --criterion N.

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <map>
#include <sstream>

#include "evoflow/baselines.hpp"
#include "evoflow/benchmark.hpp"
#include "evoflow/metrics.hpp"
#include "evoflow/sampler.hpp"
#include "evoflow/trainer.hpp"
#include "oracles.hpp"

using namespace evoflow;

namespace {

struct CheckList {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) ok = false;
    detail << "    " << (cond ? "ok" : "FAIL") << ": " << what << "\n";
  }
};

// ---------------------------------------------------------------------------
// 1. Oracle transport: analytic conditional rates move x0 to the paired x1
//    in >= 99% of 200 trials on pairs of length <= 20.
bool criterion_transport(CheckList& c) {
  const AlphabetPtr amino = Alphabet::amino20();
  const ScoringScheme scoring = ScoringScheme::blosum62();
  SamplerConfig cfg;
  cfg.t_max = 1.0 - 1e-4;
  cfg.substep = 1e-3;
  cfg.max_events = 2000;

  Rng gen(20240817);
  int hits = 0;
  const int trials = 200;
  for (int n = 0; n < trials; ++n) {
    std::vector<int> xs(size_t(1 + gen.uniform_int(20)));
    std::vector<int> ys(size_t(1 + gen.uniform_int(20)));
    for (auto& v : xs) v = gen.uniform_int(20);
    for (auto& v : ys) v = gen.uniform_int(20);
    const Sequence x(amino, xs), y(amino, ys);
    const auto pair = nw_align(x, y, scoring).pair;
    OracleRateSource source(pair, Schedule::linear());
    Rng rng = gen.fork(uint64_t(n));
    const Trajectory traj = generate(x, source, cfg, rng);
    hits += traj.final_sequence == y;
  }
  c.expect(hits >= 198, "exact transport in " + std::to_string(hits) + "/200 trials (need 198)");
  return c.ok;
}

// ---------------------------------------------------------------------------
// 2. Gradient correctness: analytic gradients of the training loss through
//    the full rate model (D = 8) match central finite differences to
//    relative error < 1e-4 on 100 random parameter/input draws.
bool criterion_gradients(CheckList& c) {
  ModelConfig mc;
  mc.alphabet_tokens = "ABCD";
  mc.embed_dim = 8;
  mc.layers = 1;
  mc.heads = 2;
  mc.time_freqs = 8;

  const AlphabetPtr ab = mc.make_alphabet();
  Rng gen(7);
  double worst = 0.0;
  int draws_done = 0;
  for (int draw = 0; draw < 100; ++draw) {
    ModelParams params = ModelParams::init(mc, gen.next_u64());
    const int len = 2 + gen.uniform_int(5);
    std::vector<int> xs(static_cast<size_t>(len), 0), ys(static_cast<size_t>(len), 0);
    for (auto& v : xs) v = gen.uniform_int(4);
    for (auto& v : ys) v = gen.uniform_int(4);
    const Sequence x(ab, xs), y(ab, ys);
    const auto pair = nw_align(x, y, ScoringScheme::simple(ab, 2, -1, 3, 1)).pair;
    const double t = gen.uniform(0.05, 0.9);
    Rng path_rng = gen.fork(uint64_t(draw));
    const auto z = sample_path_state(pair, t, Schedule::linear(), path_rng);
    const auto target = conditional_rate(z, pair.z1, t, Schedule::linear());
    const Sequence xz(ab, strip_gaps(z));

    const auto loss_fn = [&]() {
      return bregman_loss(model_forward(xz, t, params, mc), xz, target).loss;
    };
    const auto br = bregman_loss(model_forward(xz, t, params, mc), xz, target);
    const GradBuffer grad = model_backward(xz, t, params, mc, br.adjoint);

    for (int probe = 0; probe < 3; ++probe) {
      const size_t tensor = size_t(gen.uniform_int(int(params.tensors.size())));
      if (params.tensors[tensor].v.empty()) continue;
      const size_t index = size_t(gen.uniform_int(int(params.tensors[tensor].v.size())));
      const double fd = testing::fd_param_grad(params, tensor, index, loss_fn);
      worst = std::max(worst, testing::rel_err(fd, grad.g[tensor][index]));
    }
    ++draws_done;
  }
  std::ostringstream msg;
  msg << "worst relative error " << worst << " over " << draws_done
      << " draws x 3 coordinates (need < 1e-4)";
  c.expect(worst < 1e-4 && draws_done == 100, msg.str());
  return c.ok;
}

// --------------------------------------------------------------------------
// Shared toy-cluster setup for criteria 3 and 7.
struct ToySetup {
  AlphabetPtr ab = Alphabet::make("ABCD");
  HomologCluster cluster;
  SplitAssignment split;
  PairDataset dataset;
  ModelConfig mc;
  ModelParams params;
  Sequence x0;
  std::vector<Sequence> targets;  // pair partners of x0 in the train split
};

ToySetup train_toy_model(int epochs, uint64_t seed) {
  ToySetup s;
  Rng gen(seed);
  for (int n = 0; n < 20; ++n) {
    std::vector<int> sym(size_t(4 + gen.uniform_int(3)));  // lengths 4..6
    for (auto& v : sym) v = gen.uniform_int(4);
    s.cluster.members.emplace_back(s.ab, std::move(sym));
  }
  s.split = split_cluster(s.cluster, {0.8, 0.1, 0.1}, seed);
  s.dataset = build_pairs(s.cluster, s.split, ScoringScheme::simple(s.ab, 2, -1, 3, 1));

  s.mc.alphabet_tokens = "ABCD";
  s.mc.encoder = EncoderKind::MiniTransformer;
  s.mc.embed_dim = 32;
  s.mc.layers = 2;
  s.mc.heads = 4;
  s.mc.time_freqs = 16;

  TrainConfig tc;
  tc.seed = seed;
  tc.epochs = epochs;
  tc.batch_size = 8;
  tc.time_samples = 4;
  s.params = train(s.dataset, tc, s.mc).params;

  const auto train_members = s.dataset.members_in(Split::Train);
  s.x0 = s.cluster.members[size_t(train_members.front())];
  for (int m : train_members)
    if (m != train_members.front()) s.targets.push_back(s.cluster.members[size_t(m)]);
  return s;
}

// 3. Distribution matching at desk scale: TV(model samples from x0, empirical
//    pair-target distribution) < 0.2 over 10,000 samples.
bool criterion_distribution(CheckList& c) {
  const ToySetup s = train_toy_model(220, 12345);

  SamplerConfig cfg;
  cfg.substep = 2e-3;
  cfg.t_max = 1.0 - 1e-4;
  cfg.max_events = 200;

  NeuralRateSource source(s.mc, s.params);
  std::map<std::string, double> counts;
  const int draws = 10000;
  Rng rng(999);
  for (int n = 0; n < draws; ++n) {
    Rng traj_rng = rng.fork(uint64_t(n));
    const Trajectory traj = generate(s.x0, source, cfg, traj_rng);
    counts[traj.final_sequence.str()] += 1.0;
  }

  std::map<std::string, double> target;
  for (const auto& t : s.targets) target[t.str()] += 1.0 / double(s.targets.size());

  double tv = 0.0;
  for (const auto& [seq, cnt] : counts) {
    const double p = cnt / draws;
    const auto it = target.find(seq);
    const double q = it == target.end() ? 0.0 : it->second;
    tv += std::abs(p - q);
  }
  for (const auto& [seq, q] : target)
    if (!counts.count(seq)) tv += q;
  tv *= 0.5;

  std::ostringstream msg;
  msg << "total variation to the pair-target distribution " << tv << " (need < 0.2; "
      << s.targets.size() << " target sequences)";
  c.expect(tv < 0.2, msg.str());
  return c.ok;
}

// ---------------------------------------------------------------------------
// 4. Deterministic benchmark at desk scale: No-op F1 >= 0.90, Ins/Sub/Del
//    F1 >= 0.50 at the unit clock, and a monotone recall sweep over five
//    clock values. Full-scale reference F1 (not gated here):
//    0.982 / 0.808 / 0.823 / 0.879 for no-op / ins / sub / del.
bool criterion_benchmark(CheckList& c) {
  const auto train_corpus = random_protein_corpus(2000, 50, 300, 71);
  const auto train_cases = build_rule_dataset(train_corpus);
  PairDataset dataset;
  dataset.split.assign(train_cases.size(), Split::Train);
  for (size_t i = 0; i < train_cases.size(); ++i)
    dataset.pairs.push_back({int(i), int(i), train_cases[i].alignment});

  ModelConfig mc;
  mc.alphabet_tokens = Alphabet::amino20()->tokens();
  mc.encoder = EncoderKind::WindowMlp;
  mc.window = 11;
  mc.embed_dim = 32;
  mc.time_freqs = 16;

  TrainConfig tc;
  tc.seed = 71;
  tc.epochs = 2;
  tc.batch_size = 8;
  tc.time_samples = 4;
  const ModelParams params = train(dataset, tc, mc).params;

  const auto eval_cases = build_rule_dataset(random_protein_corpus(500, 50, 300, 72));
  BenchEvalConfig ec;
  ec.clock_values = {0.125, 0.25, 0.5, 1.0, 2.0};
  ec.sampler.substep = 1e-2;
  ec.sampler.t_max = 1.0 - 1e-4;
  ec.sampler.max_events = 4000;
  ec.bootstrap_resamples = 1000;
  ec.seed = 73;
  const auto report =
      evaluate_edit_classification(model_source_factory(mc, params), eval_cases, ec);

  std::map<int, double> f1_at_unit, recall_prev;
  bool monotone = true;
  for (const auto& row : report.rows) {
    if (row.clock == 1.0) f1_at_unit[int(row.cls)] = row.f1;
    if (row.cls != EditLabel::NoOp) {
      const auto it = recall_prev.find(int(row.cls));
      if (it != recall_prev.end() && row.recall < it->second - 0.01) monotone = false;
      recall_prev[int(row.cls)] = row.recall;
    }
  }
  std::ostringstream msg;
  msg << "F1 at clock 1.0: noop " << f1_at_unit[0] << " ins " << f1_at_unit[2] << " sub "
      << f1_at_unit[1] << " del " << f1_at_unit[3];
  c.expect(f1_at_unit[int(EditLabel::NoOp)] >= 0.90, msg.str() + " (noop needs >= 0.90)");
  c.expect(f1_at_unit[int(EditLabel::Ins)] >= 0.50, "ins F1 >= 0.50");
  c.expect(f1_at_unit[int(EditLabel::Sub)] >= 0.50, "sub F1 >= 0.50");
  c.expect(f1_at_unit[int(EditLabel::Del)] >= 0.50, "del F1 >= 0.50");
  c.expect(monotone, "recall non-decreasing across clocks 0.125..2.0 (1% slack)");
  return c.ok;
}

// ---------------------------------------------------------------------------
// 5. Oracle-mode benchmark: rates built from the ground-truth scripts score
//    F1 >= 0.99 on every class.
bool criterion_oracle_benchmark(CheckList& c) {
  const auto eval_cases = build_rule_dataset(random_protein_corpus(500, 50, 300, 81));
  BenchEvalConfig ec;
  ec.clock_values = {1.0};
  ec.sampler.substep = 1e-3;
  ec.sampler.t_max = 1.0 - 1e-4;
  ec.sampler.max_events = 5000;
  ec.bootstrap_resamples = 200;
  ec.seed = 82;
  const auto report =
      evaluate_edit_classification(oracle_source_factory(Schedule::linear()), eval_cases, ec);
  for (const auto& row : report.rows) {
    std::ostringstream msg;
    msg << edit_label_name(row.cls) << " F1 " << row.f1 << " (need >= 0.99)";
    c.expect(row.f1 >= 0.99, msg.str());
  }
  return c.ok;
}

// ---------------------------------------------------------------------------
// 6. Metric identities.
bool criterion_metrics(CheckList& c) {
  const AlphabetPtr toy4 = Alphabet::make("ABCD");

  {  // mmd2(X, X) == 0 exactly
    Rng rng(3);
    std::vector<Sequence> X;
    for (int n = 0; n < 50; ++n) {
      std::string s;
      for (int i = 0; i < 6 + rng.uniform_int(4); ++i) s.push_back("ABCD"[rng.uniform_int(4)]);
      X.push_back(Sequence::from_string(toy4, s));
    }
    c.expect(mmd2(X, X, 3) == 0.0, "mmd2(X, X) == 0 exactly");
  }
  {  // blosum_kl(p, p) == 0
    const auto sm = SmoothingConfig::amino_default(1.0);
    std::vector<double> counts(21, 0.0);
    Rng rng(5);
    for (auto& v : counts) v = double(rng.uniform_int(40));
    c.expect(blosum_kl(counts, counts, sm) == 0.0, "blosum_kl(p, p) == 0");
  }
  {  // C == 0 for N = 1 and column sums vanish
    const auto one = AlignedDataset::from_msa(toy4, {"ABCD"});
    const auto cov1 = covariance_4d(one);
    double max_abs = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int a = 0; a < 5; ++a)
          for (int b = 0; b < 5; ++b) max_abs = std::max(max_abs, std::abs(cov1.c(i, j, a, b)));
    c.expect(max_abs == 0.0, "C == 0 exactly for a single sample");

    Rng rng(7);
    std::vector<std::string> rows;
    for (int n = 0; n < 200; ++n) {
      std::string r;
      for (int i = 0; i < 6; ++i) r.push_back("ABCD"[rng.uniform_int(4)]);
      rows.push_back(r);
    }
    const auto cov = covariance_4d(AlignedDataset::from_msa(toy4, rows));
    double worst = 0.0;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        for (int b = 0; b < 5; ++b) {
          double s = 0.0;
          for (int a = 0; a < 5; ++a) s += cov.c(i, j, a, b);
          worst = std::max(worst, std::abs(s));
        }
    std::ostringstream msg;
    msg << "one-hot completeness: max |sum_a C_ij(a,b)| = " << worst << " (need <= 1e-10)";
    c.expect(worst <= 1e-10, msg.str());
  }
  {  // MIp of iid uniform columns near zero at N = 10,000
    Rng rng(11);
    std::vector<std::string> rows;
    for (int n = 0; n < 10000; ++n) {
      std::string r;
      for (int i = 0; i < 8; ++i) r.push_back("ABCD"[rng.uniform_int(4)]);
      rows.push_back(r);
    }
    const auto m = mip(AlignedDataset::from_msa(toy4, rows));
    double mean = 0.0;
    int cnt = 0;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        if (i == j) continue;
        mean += m[size_t(i) * 8 + j];
        ++cnt;
      }
    mean /= cnt;
    std::ostringstream msg;
    msg << "mean off-diagonal MIp of iid columns " << mean << " (need within +-0.01)";
    c.expect(std::abs(mean) < 0.01, msg.str());
  }
  {  // sparse/dense spectrum agreement, exhaustive
    bool all_match = true;
    int64_t strings = 0;
    for (const auto& ab : {Alphabet::make("AB"), Alphabet::make("ABC"), Alphabet::make("ABCDE")}) {
      const auto seqs = testing::all_sequences(ab, 6);
      for (int k = 1; k <= 3 && all_match; ++k) {
        for (const auto& s : seqs) {
          ++strings;
          const auto sparse = spectrum_features(s, k);
          const auto dense = testing::dense_spectrum(s, k);
          int64_t nonzero = 0;
          for (size_t code = 0; code < dense.size(); ++code) {
            if (dense[code] == 0) continue;
            ++nonzero;
            const auto it = sparse.find(uint64_t(code));
            if (it == sparse.end() || it->second != dense[code]) all_match = false;
          }
          if (nonzero != int64_t(sparse.size())) all_match = false;
        }
      }
    }
    std::ostringstream msg;
    msg << "sparse/dense spectrum features agree on " << strings
        << " (alphabet <= 5, k <= 3, length <= 6) strings";
    c.expect(all_match, msg.str());
  }
  return c.ok;
}

// ---------------------------------------------------------------------------
// 7. Sampler cross-validation: grid-free and Euler-grid samplers agree in
//    edit-count distribution (TV < 0.1 over 10,000 samples each) on a
//    trained toy model.
bool criterion_cross_sampler(CheckList& c) {
  const ToySetup s = train_toy_model(120, 777);

  SamplerConfig cfg;
  cfg.substep = 2e-3;
  cfg.t_max = 1.0 - 1e-4;
  cfg.max_events = 200;

  const int draws = 10000;
  std::map<int, double> grid_free, euler;
  NeuralRateSource source(s.mc, s.params);
  Rng rng(31415);
  for (int n = 0; n < draws; ++n) {
    Rng r1 = rng.fork(uint64_t(2 * n));
    grid_free[levenshtein(s.x0, generate(s.x0, source, cfg, r1).final_sequence)] += 1.0;
  }
  for (int n = 0; n < draws; ++n) {
    Rng r2 = rng.fork(uint64_t(2 * n + 1));
    euler[levenshtein(s.x0, generate_euler(s.x0, source, cfg, 5e-3, r2).final_sequence)] += 1.0;
  }
  double tv = 0.0;
  std::map<int, double> keys = grid_free;
  for (const auto& [k, v] : euler) keys[k] += 0;  // union of keys
  for (const auto& [k, unused] : keys) {
    const double p = (grid_free.count(k) ? grid_free[k] : 0.0) / draws;
    const double q = (euler.count(k) ? euler[k] : 0.0) / draws;
    tv += std::abs(p - q);
  }
  tv *= 0.5;
  std::ostringstream msg;
  msg << "edit-count distribution TV between samplers " << tv << " (need < 0.1)";
  c.expect(tv < 0.1, msg.str());
  return c.ok;
}

// ---------------------------------------------------------------------------
// 8. Baseline contracts: edit counts within 10% of target over 10,000 runs;
//    the forced variant never reproduces the original at edited positions.
bool criterion_baselines(CheckList& c) {
  const AlphabetPtr amino = Alphabet::amino20();
  const ScoringScheme scoring = ScoringScheme::blosum62();

  // A diverse synthetic train set so the profile columns carry spread mass.
  const auto pool = random_protein_corpus(40, 40, 40, 2025);
  const Sequence reference = pool.front();
  const auto data = AlignedDataset::from_reference(reference, pool, scoring);
  const auto profile = ColumnProfile::fit(data, 1.0);
  const Sequence x0 = pool[1];
  const auto cols = map_to_reference_columns(reference, x0, scoring);

  BaselineConfig bc;
  bc.expected_edits = 5.0;
  const int runs = 10000;

  {
    Rng rng(1);
    double total = 0.0;
    for (int n = 0; n < runs; ++n) total += levenshtein(x0, profile_infill(x0, profile, cols, bc, rng));
    const double mean = total / runs;
    std::ostringstream msg;
    msg << "profile_infill mean edits " << mean << " (target 5, need within 10%)";
    c.expect(std::abs(mean - 5.0) <= 0.5, msg.str());
  }
  {
    Rng rng(2);
    double total = 0.0;
    for (int n = 0; n < runs; ++n)
      total += levenshtein(x0, profile_infill_forced(x0, profile, cols, bc, rng));
    const double mean = total / runs;
    std::ostringstream msg;
    msg << "profile_infill_forced mean edits " << mean << " (target 5, need within 10%)";
    c.expect(std::abs(mean - 5.0) <= 0.5, msg.str());
  }
  {
    Rng rng(3);
    double total = 0.0;
    for (int n = 0; n < runs; ++n) total += levenshtein(x0, random_mutation(x0, bc, rng));
    const double mean = total / runs;
    std::ostringstream msg;
    msg << "random_mutation mean edits " << mean << " (target 5, need within 10%)";
    c.expect(std::abs(mean - 5.0) <= 0.5, msg.str());
  }
  {
    // Forced infill with every position selected: the output must differ
    // from the original at every position, in every run.
    BaselineConfig all;
    all.expected_edits = 400.0;  // far above L: the Poisson cap selects all
    Rng rng(4);
    bool never_same = true;
    for (int n = 0; n < 2000 && never_same; ++n) {
      const Sequence out = profile_infill_forced(x0, profile, cols, all, rng);
      for (size_t i = 0; i < out.size(); ++i)
        if (out[i] == x0[i]) never_same = false;
    }
    c.expect(never_same, "forced infill changes every selected position (2000 full-length runs)");
  }
  return c.ok;
}

// ---------------------------------------------------------------------------
// 9. End-to-end ordering: in the toy pipeline, random_mutation scores worst
//    on MMD^2 and smoothed KL among {model samples, profile_infill,
//    random_mutation}.
bool criterion_ordering(CheckList& c) {
  const AlphabetPtr amino = Alphabet::amino20();
  const ScoringScheme scoring = ScoringScheme::blosum62();

  // Synthetic family: a fixed template with 14 variable positions, each
  // drawing from its own 3-residue repertoire.
  Rng gen(90210);
  const int length = 40;
  std::vector<int> base(static_cast<size_t>(length), 0);
  for (auto& v : base) v = gen.uniform_int(20);
  std::vector<int> variable;
  for (int i = 0; i < length; i += 3) variable.push_back(i);
  std::map<int, std::array<int, 3>> repertoire;
  for (int pos : variable) {
    std::array<int, 3> reps{};
    for (auto& r : reps) r = gen.uniform_int(20);
    repertoire[pos] = reps;
  }
  HomologCluster cluster;
  for (int n = 0; n < 40; ++n) {
    std::vector<int> sym = base;
    for (int pos : variable) sym[size_t(pos)] = repertoire[pos][size_t(gen.uniform_int(3))];
    cluster.members.emplace_back(amino, std::move(sym));
  }
  const auto split = split_cluster(cluster, {0.75, 0.125, 0.125}, 90211);
  const auto dataset = build_pairs(cluster, split, scoring);

  ModelConfig mc;
  mc.alphabet_tokens = amino->tokens();
  mc.encoder = EncoderKind::MiniTransformer;
  mc.embed_dim = 32;
  mc.layers = 2;
  mc.heads = 4;
  mc.time_freqs = 16;
  TrainConfig tc;
  tc.seed = 90212;
  tc.epochs = 3;
  tc.batch_size = 8;
  tc.time_samples = 4;
  const ModelParams params = train(dataset, tc, mc).params;

  std::vector<Sequence> train_pool, holdout, inference;
  for (size_t i = 0; i < cluster.members.size(); ++i) {
    if (split[i] == Split::Train) train_pool.push_back(cluster.members[i]);
    if (split[i] == Split::Holdout) holdout.push_back(cluster.members[i]);
    if (split[i] == Split::Inference) inference.push_back(cluster.members[i]);
  }

  // Model samples, clock-calibrated to ~5 edits per sequence.
  SamplerConfig scfg;
  scfg.substep = 2e-3;
  scfg.t_max = 1.0 - 1e-4;
  scfg.max_events = 400;
  NeuralRateSource source(mc, params);
  const double target_edits = 5.0;
  const auto cal = calibrate_clock(source, inference, target_edits, scfg, 90213);
  scfg.clock_norm = cal.clock_norm;

  const int per_x0 = 24;
  std::vector<Sequence> model_set, infill_set, random_set;
  const Sequence& reference = train_pool.front();
  const auto profile = ColumnProfile::fit(
      AlignedDataset::from_reference(reference, train_pool, scoring), 1.0);
  Rng rng(90214);
  for (const auto& x0 : inference) {
    const auto cols = map_to_reference_columns(reference, x0, scoring);
    for (int rep = 0; rep < per_x0; ++rep) {
      Rng r = rng.fork(uint64_t(model_set.size()));
      model_set.push_back(generate(x0, source, scfg, r).final_sequence);
      BaselineConfig bc;
      bc.expected_edits = target_edits;
      infill_set.push_back(profile_infill(x0, profile, cols, bc, r));
      random_set.push_back(random_mutation(x0, bc, r));
    }
  }

  const auto smoothing = SmoothingConfig::amino_default(1.0);
  const auto score = [&](const std::vector<Sequence>& set, const std::string& label) {
    return evaluate_set(label, set, holdout, reference, scoring, smoothing, 3);
  };
  const auto model_report = score(model_set, "model");
  const auto infill_report = score(infill_set, "profile_infill");
  const auto random_report = score(random_set, "random_mutation");

  std::ostringstream msg;
  msg << "mmd2: model " << model_report.mmd2_to_reference << ", infill "
      << infill_report.mmd2_to_reference << ", random " << random_report.mmd2_to_reference;
  c.expect(random_report.mmd2_to_reference > model_report.mmd2_to_reference &&
               random_report.mmd2_to_reference > infill_report.mmd2_to_reference,
           msg.str() + " (random must be worst)");
  std::ostringstream msg2;
  msg2 << "kl: model " << model_report.kl_to_reference << ", infill "
       << infill_report.kl_to_reference << ", random " << random_report.kl_to_reference;
  c.expect(random_report.kl_to_reference > model_report.kl_to_reference &&
               random_report.kl_to_reference > infill_report.kl_to_reference,
           msg2.str() + " (random must be worst)");
  std::ostringstream msg3;
  msg3 << "calibrated clock " << cal.clock_norm << " mean edits " << cal.achieved_mean_edits;
  c.expect(cal.reached, msg3.str());
  return c.ok;
}

struct Criterion {
  int id;
  const char* name;
  bool (*run)(CheckList&);
};

const Criterion kCriteria[] = {
    {1, "oracle transport reaches the paired target", criterion_transport},
    {2, "analytic gradients match finite differences", criterion_gradients},
    {3, "trained toy model matches the pair-target distribution", criterion_distribution},
    {4, "deterministic benchmark F1 gates and monotone clock sweep", criterion_benchmark},
    {5, "oracle-mode benchmark F1", criterion_oracle_benchmark},
    {6, "metric identities", criterion_metrics},
    {7, "grid-free and Euler samplers agree", criterion_cross_sampler},
    {8, "baseline edit-count contracts", criterion_baselines},
    {9, "end-to-end ordering of methods", criterion_ordering},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::strcmp(argv[i], "--criterion") == 0) only = std::atoi(argv[i + 1]);

  bool all_ok = true;
  for (const auto& crit : kCriteria) {
    if (only != 0 && crit.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    CheckList checks;
    bool ok = false;
    try {
      ok = crit.run(checks);
    } catch (const std::exception& e) {
      checks.detail << "    exception: " << e.what() << "\n";
      ok = false;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << crit.id << ": " << crit.name << " ["
              << secs << "s]\n"
              << checks.detail.str();
    std::cout.flush();
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
