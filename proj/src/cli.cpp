#include "evoflow/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "evoflow/baselines.hpp"
#include "evoflow/benchmark.hpp"
#include "evoflow/fasta.hpp"
#include "evoflow/metrics.hpp"
#include "evoflow/sampler.hpp"
#include "evoflow/trainer.hpp"
#include "nlohmann/json.hpp"

namespace evoflow {

namespace {

using json = nlohmann::json;

struct IngestOptions {
  std::string input;
  bool aligned = false;
  std::string alphabet = "ARNDCQEGHILKMFPSTWYV";
};

HomologCluster ingest_cluster(const IngestOptions& opt, std::vector<std::string>* msa_rows,
                              std::ostream* summary) {
  const auto records = read_fasta_file(opt.input);
  if (records.empty()) throw std::runtime_error("empty FASTA file: " + opt.input);
  const AlphabetPtr ab = Alphabet::make(opt.alphabet);

  HomologCluster cluster;
  cluster.source = opt.input;
  cluster.members = records_to_sequences(records, ab, opt.aligned, msa_rows);
  for (const auto& rec : records) cluster.ids.push_back(rec.id);
  cluster.validate();

  if (summary) {
    double sum = 0.0, sum2 = 0.0;
    for (const auto& m : cluster.members) {
      sum += double(m.size());
      sum2 += double(m.size()) * double(m.size());
    }
    const double n = double(cluster.members.size());
    const double mean = sum / n;
    const double sd = std::sqrt(std::max(0.0, sum2 / n - mean * mean));
    char buf[128];
    std::snprintf(buf, sizeof(buf), "records: %zu\nsequence length: %.1f \xc2\xb1 %.1f\n",
                  cluster.members.size(), mean, sd);
    *summary << buf;
  }
  return cluster;
}

std::string run_info(const std::string& command, const json& options) {
  json j;
  j["command"] = command;
  j["options"] = options;
  return j.dump();
}

void write_csv(const std::string& path, const std::string& info,
               const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << "# " << info << '\n';
  for (const auto& l : lines) out << l << '\n';
}

ModelConfig model_config_from_flags(const std::string& encoder, int embed_dim, int layers,
                                    int heads, int window, const std::string& activation,
                                    double max_rate, const std::string& alphabet) {
  ModelConfig mc;
  mc.alphabet_tokens = alphabet;
  mc.embed_dim = embed_dim;
  mc.layers = layers;
  mc.heads = heads;
  mc.window = window;
  mc.max_rate = max_rate;
  if (encoder == "window_mlp") {
    mc.encoder = EncoderKind::WindowMlp;
  } else if (encoder == "mini_transformer") {
    mc.encoder = EncoderKind::MiniTransformer;
  } else {
    throw std::runtime_error("unknown encoder: " + encoder);
  }
  if (activation == "softplus") {
    mc.rate_activation = RateActivation::Softplus;
  } else if (activation == "bounded_sigmoid") {
    mc.rate_activation = RateActivation::BoundedSigmoid;
  } else {
    throw std::runtime_error("unknown rate activation: " + activation);
  }
  mc.validate();
  return mc;
}

std::array<double, 3> parse_fractions(const std::string& text) {
  std::array<double, 3> f{};
  std::istringstream ss(text);
  std::string tok;
  int i = 0;
  while (std::getline(ss, tok, ',') && i < 3) f[size_t(i++)] = std::stod(tok);
  if (i != 3) throw std::runtime_error("fractions must be three comma-separated values");
  return f;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}


// ----------------------------- subcommands ---------------------------------

int cmd_ingest(const IngestOptions& opt) {
  ingest_cluster(opt, nullptr, &std::cout);
  return 0;
}

struct TrainOptions {
  IngestOptions ingest;
  std::string output = "model.ckpt";
  std::string loss_trace;
  std::string fractions = "0.8,0.1,0.1";
  uint64_t seed = 0;
  int epochs = 10;
  int batch = 8;
  int time_samples = 4;
  double lr = 1e-3;
  double t_clamp = 1e-3;
  std::string encoder = "mini_transformer";
  int embed_dim = 64;
  int layers = 2;
  int heads = 4;
  int window = 9;
  std::string activation = "softplus";
  double max_rate = 50.0;
  int gap_open = 10;
  int gap_extend = 1;
};

int cmd_train(const TrainOptions& opt) {
  HomologCluster cluster = ingest_cluster(opt.ingest, nullptr, &std::cout);
  const auto split = split_cluster(cluster, parse_fractions(opt.fractions), opt.seed);

  ScoringScheme scoring = opt.ingest.alphabet == Alphabet::amino20()->tokens()
                              ? ScoringScheme::blosum62()
                              : ScoringScheme::simple(cluster.members.front().alphabet, 2, -1,
                                                      opt.gap_open, opt.gap_extend);
  scoring.gap_open = opt.gap_open;
  scoring.gap_extend = opt.gap_extend;
  std::cout << "aligning train pairs...\n";
  const PairDataset dataset = build_pairs(cluster, split, scoring);
  std::cout << "pairs: " << dataset.pairs.size() << "\n";

  const ModelConfig mc = model_config_from_flags(opt.encoder, opt.embed_dim, opt.layers,
                                                 opt.heads, opt.window, opt.activation,
                                                 opt.max_rate, opt.ingest.alphabet);
  TrainConfig tc;
  tc.seed = opt.seed;
  tc.epochs = opt.epochs;
  tc.batch_size = opt.batch;
  tc.time_samples = opt.time_samples;
  tc.step_size = opt.lr;
  tc.t_clamp = opt.t_clamp;

  const TrainResult result = train(dataset, tc, mc, [](int step, double loss) {
    if (step % 50 == 0) std::cout << "step " << step << " loss " << loss << '\n';
  });

  Checkpoint ckpt;
  ckpt.config = mc;
  ckpt.params = result.params;
  ckpt.meta.epoch = opt.epochs;
  ckpt.meta.seed = opt.seed;
  ckpt.meta.loss_trace = result.loss_trace;
  save_checkpoint(ckpt, opt.output);
  std::cout << "checkpoint written: " << opt.output << '\n';

  if (!opt.loss_trace.empty()) {
    json j{{"input", opt.ingest.input}, {"seed", opt.seed}, {"epochs", opt.epochs},
           {"batch", opt.batch}, {"lr", opt.lr}};
    std::vector<std::string> lines{"step,loss"};
    for (size_t i = 0; i < result.loss_trace.size(); ++i)
      lines.push_back(std::to_string(i) + "," + std::to_string(result.loss_trace[i]));
    write_csv(opt.loss_trace, run_info("train", j), lines);
  }
  return 0;
}

struct SampleOptions {
  std::string checkpoint;
  std::string inputs;
  std::string output = "samples.fasta";
  std::string trajectories;
  int num = 1;
  double clock_norm = 1.0;
  bool length_normalize = false;
  bool euler = false;
  double euler_step = 1e-3;
  double substep = 1e-3;
  double t_max = 1.0 - 1e-4;
  double target_edits = -1.0;
  uint64_t seed = 0;
};

int cmd_sample(const SampleOptions& opt) {
  const Checkpoint ckpt = load_checkpoint(opt.checkpoint);
  const AlphabetPtr ab = ckpt.config.make_alphabet();
  const auto records = read_fasta_file(opt.inputs);
  if (records.empty()) throw std::runtime_error("no input sequences");
  const auto inputs = records_to_sequences(records, ab, false);

  SamplerConfig scfg;
  scfg.clock_norm = opt.clock_norm;
  scfg.length_normalize = opt.length_normalize;
  scfg.substep = opt.substep;
  scfg.t_max = opt.t_max;
  scfg.seed = opt.seed;

  NeuralRateSource source(ckpt.config, ckpt.params);
  double resolved_clock = opt.clock_norm;
  if (opt.target_edits >= 0.0) {
    const CalibrationResult cal =
        calibrate_clock(source, inputs, opt.target_edits, scfg, opt.seed);
    resolved_clock = cal.clock_norm;
    std::cout << "calibrated clock_norm " << resolved_clock << " (mean edits "
              << cal.achieved_mean_edits << (cal.reached ? ")" : ", target unreachable)")
              << '\n';
    if (!cal.reached)
      std::cerr << "warning: target edit count unreachable; proceeding with best clock\n";
    scfg.clock_norm = resolved_clock;
  }

  std::ofstream traj_out;
  if (!opt.trajectories.empty()) {
    traj_out.open(opt.trajectories);
    if (!traj_out) throw std::runtime_error("cannot write: " + opt.trajectories);
  }

  std::vector<FastaRecord> out_records;
  for (size_t i = 0; i < inputs.size(); ++i) {
    for (int rep = 0; rep < opt.num; ++rep) {
      Rng rng(opt.seed ^ (0x9e3779b97f4a7c15ULL * (i * size_t(opt.num) + size_t(rep) + 1)));
      const Trajectory traj = opt.euler
                                  ? generate_euler(inputs[i], source, scfg, opt.euler_step, rng)
                                  : generate(inputs[i], source, scfg, rng);
      FastaRecord rec;
      rec.id = records[i].id + (opt.num > 1 ? "#" + std::to_string(rep) : "");
      rec.desc = "edits=" + std::to_string(traj.events.size());
      rec.seq = traj.final_sequence.str();
      out_records.push_back(std::move(rec));
      if (traj_out.is_open())
        write_trajectory(traj_out, traj, *ab, records[i].id + "#" + std::to_string(rep));
    }
  }

  json j{{"checkpoint", opt.checkpoint}, {"inputs", opt.inputs},
         {"clock_norm", resolved_clock}, {"length_normalize", opt.length_normalize},
         {"euler", opt.euler},           {"seed", opt.seed},
         {"t_max", opt.t_max},           {"num", opt.num}};
  write_fasta_file(opt.output, out_records, run_info("sample", j));
  std::cout << "wrote " << out_records.size() << " sequences to " << opt.output << '\n';
  return 0;
}

struct BenchOptions {
  int train_cases = 2000;
  int eval_cases = 500;
  int len_min = 50;
  int len_max = 300;
  uint64_t seed = 0;
  bool oracle = false;
  std::string checkpoint_in;
  std::string checkpoint_out;
  std::string clocks = "0.25,0.5,1.0,2.0,4.0";
  std::string output_prefix = "bench";
  std::string scoring = "trajectory";
  // training knobs tuned for the deterministic rules
  std::string encoder = "window_mlp";
  int embed_dim = 32;
  int window = 11;
  int layers = 2;
  int heads = 4;
  int epochs = 2;
  int batch = 8;
  int time_samples = 4;
  double lr = 1e-3;
  double substep = 1e-2;
  int bootstrap = 1000;
};

int cmd_bench_det(const BenchOptions& opt) {
  const auto eval_corpus =
      random_protein_corpus(opt.eval_cases, opt.len_min, opt.len_max, opt.seed + 1);
  const auto eval_cases = build_rule_dataset(eval_corpus);

  RateSourceFactory factory;
  ModelConfig mc;
  if (opt.oracle) {
    factory = oracle_source_factory(Schedule::linear());
  } else if (!opt.checkpoint_in.empty()) {
    const Checkpoint ckpt = load_checkpoint(opt.checkpoint_in);
    mc = ckpt.config;
    factory = model_source_factory(ckpt.config, ckpt.params);
  } else {
    const auto train_corpus =
        random_protein_corpus(opt.train_cases, opt.len_min, opt.len_max, opt.seed);
    const auto train_cases = build_rule_dataset(train_corpus);
    PairDataset dataset;
    dataset.split.assign(train_cases.size(), Split::Train);
    for (size_t i = 0; i < train_cases.size(); ++i)
      dataset.pairs.push_back({int(i), int(i), train_cases[i].alignment});

    mc = model_config_from_flags(opt.encoder, opt.embed_dim, opt.layers, opt.heads, opt.window,
                                 "softplus", 50.0, Alphabet::amino20()->tokens());
    TrainConfig tc;
    tc.seed = opt.seed;
    tc.epochs = opt.epochs;
    tc.batch_size = opt.batch;
    tc.time_samples = opt.time_samples;
    tc.step_size = opt.lr;
    std::cout << "training on " << dataset.pairs.size() << " rule cases...\n";
    const TrainResult result = train(dataset, tc, mc, [](int step, double loss) {
      if (step % 100 == 0) std::cout << "step " << step << " loss " << loss << '\n';
    });
    if (!opt.checkpoint_out.empty()) {
      Checkpoint ckpt;
      ckpt.config = mc;
      ckpt.params = result.params;
      ckpt.meta.epoch = opt.epochs;
      ckpt.meta.seed = opt.seed;
      ckpt.meta.loss_trace = result.loss_trace;
      save_checkpoint(ckpt, opt.checkpoint_out);
      std::cout << "checkpoint written: " << opt.checkpoint_out << '\n';
    }
    factory = model_source_factory(mc, result.params);
  }

  BenchEvalConfig ec;
  ec.clock_values = parse_doubles(opt.clocks);
  ec.sampler.substep = opt.substep;
  ec.sampler.seed = opt.seed;
  ec.scoring = opt.scoring == "alignment" ? BenchScoring::Alignment : BenchScoring::Trajectory;
  ec.bootstrap_resamples = opt.bootstrap;
  ec.seed = opt.seed;

  std::cout << "evaluating " << eval_cases.size() << " cases over " << ec.clock_values.size()
            << " clock values...\n";
  const ClassificationReport report = evaluate_edit_classification(factory, eval_cases, ec);

  json j{{"train_cases", opt.train_cases}, {"eval_cases", opt.eval_cases},
         {"len_min", opt.len_min},         {"len_max", opt.len_max},
         {"seed", opt.seed},               {"oracle", opt.oracle},
         {"clocks", opt.clocks},           {"scoring", opt.scoring}};
  const std::string info = run_info("bench-det", j);

  {
    std::ofstream out(opt.output_prefix + ".report.txt");
    if (!out) throw std::runtime_error("cannot write report");
    out << "# " << info << '\n';
    write_classification_report(out, report);
  }
  {
    std::ofstream out(opt.output_prefix + ".table.csv");
    if (!out) throw std::runtime_error("cannot write table");
    out << "# " << info << '\n';
    write_classification_csv(out, report);
  }
  write_classification_report(std::cout, report);
  return 0;
}

struct EvalOptions {
  std::vector<std::string> generated;  // name=path
  std::string holdout;
  std::string inputs;
  std::string alphabet = "ARNDCQEGHILKMFPSTWYV";
  std::string output_prefix = "eval";
  int spectrum_k = 3;
  double alpha = 1.0;
  int ref_index = 0;
};

int cmd_eval(const EvalOptions& opt) {
  const AlphabetPtr ab = Alphabet::make(opt.alphabet);
  const auto load = [&](const std::string& path) {
    const auto recs = read_fasta_file(path);
    if (recs.empty()) throw std::runtime_error("empty FASTA file: " + path);
    return records_to_sequences(recs, ab, false);
  };
  const auto holdout = load(opt.holdout);
  const auto inputs = load(opt.inputs);
  if (opt.ref_index < 0 || opt.ref_index >= int(inputs.size()))
    throw std::runtime_error("ref index out of range");
  const Sequence& align_ref = inputs[size_t(opt.ref_index)];

  const ScoringScheme scoring = opt.alphabet == Alphabet::amino20()->tokens()
                                    ? ScoringScheme::blosum62()
                                    : ScoringScheme::simple(ab, 2, -1, 3, 1);
  SmoothingConfig smoothing;
  if (ab->size() == 20) {
    smoothing = SmoothingConfig::amino_default(opt.alpha);
  } else {
    smoothing.alpha = opt.alpha;
    smoothing.mu.assign(size_t(ab->size()) + 1, 1.0 / double(ab->size() + 1));
  }

  json j{{"holdout", opt.holdout}, {"inputs", opt.inputs}, {"k", opt.spectrum_k},
         {"alpha", opt.alpha},     {"ref_index", opt.ref_index}};
  const std::string info = run_info("eval", j);

  std::vector<std::string> comparison{
      "method,mmd2,kl_to_holdout,kl_from_holdout,pll_mean,mean_lev_to_x0,mean_length"};
  for (const auto& spec_str : opt.generated) {
    const auto eq = spec_str.find('=');
    const std::string name = eq == std::string::npos ? "generated" : spec_str.substr(0, eq);
    const std::string path = eq == std::string::npos ? spec_str : spec_str.substr(eq + 1);
    const auto gen = load(path);

    const MetricsReport report =
        evaluate_set(name, gen, holdout, align_ref, scoring, smoothing, opt.spectrum_k);

    double lev = 0.0;
    for (size_t i = 0; i < gen.size(); ++i) {
      const size_t xi = gen.size() >= inputs.size() ? i * inputs.size() / gen.size()
                                                    : i % inputs.size();
      lev += levenshtein(gen[i], inputs[xi]);
    }
    lev /= double(gen.size());

    std::ostringstream row;
    row << name << ',' << report.mmd2_to_reference << ',' << report.kl_to_reference << ','
        << report.kl_from_reference << ',' << report.pll_mean << ',' << lev << ','
        << report.heuristics.lengths.mean;
    comparison.push_back(row.str());

    std::ofstream out(opt.output_prefix + "." + name + ".txt");
    if (!out) throw std::runtime_error("cannot write report");
    out << "# " << info << '\n';
    write_metrics_report(out, report);
    out << "mean levenshtein to inputs: " << lev << '\n';
    out << "interaction strength matrix:\n";
    write_matrix(out, report.interaction, report.width);
    out << "mip matrix:\n";
    write_matrix(out, report.mip_matrix, report.width);
  }
  write_csv(opt.output_prefix + ".comparison.csv", info, comparison);
  std::cout << "wrote " << opt.output_prefix << ".comparison.csv\n";
  return 0;
}

struct BaselineOptions {
  std::string method = "profile_infill";
  std::string train;  // aligned or plain FASTA used to fit the profile
  bool train_aligned = false;
  std::string inputs;
  std::string pool;  // random_pairing source; defaults to train
  std::string output = "baseline.fasta";
  std::string alphabet = "ARNDCQEGHILKMFPSTWYV";
  double expected_edits = 1.0;
  double temperature = 1.0;
  double alpha = 1.0;
  int num = 1;
  int ref_index = 0;
  uint64_t seed = 0;
};

int cmd_baselines(const BaselineOptions& opt) {
  const AlphabetPtr ab = Alphabet::make(opt.alphabet);
  const auto inputs_recs = read_fasta_file(opt.inputs);
  if (inputs_recs.empty()) throw std::runtime_error("no input sequences");
  const auto inputs = records_to_sequences(inputs_recs, ab, false);

  BaselineConfig bc;
  bc.expected_edits = opt.expected_edits;
  bc.temperature = opt.temperature;
  bc.seed = opt.seed;
  if (opt.method == "random_pairing") {
    bc.method = BaselineMethod::RandomPairing;
  } else if (opt.method == "profile_infill") {
    bc.method = BaselineMethod::ProfileInfill;
  } else if (opt.method == "profile_infill_forced") {
    bc.method = BaselineMethod::ProfileInfillForced;
  } else if (opt.method == "random_mutation") {
    bc.method = BaselineMethod::RandomMutation;
  } else {
    throw std::runtime_error("unknown baseline method: " + opt.method);
  }

  const ScoringScheme scoring = opt.alphabet == Alphabet::amino20()->tokens()
                                    ? ScoringScheme::blosum62()
                                    : ScoringScheme::simple(ab, 2, -1, 3, 1);

  std::vector<Sequence> pool;
  ColumnProfile profile;
  Sequence reference;
  const bool needs_profile = bc.method == BaselineMethod::ProfileInfill ||
                             bc.method == BaselineMethod::ProfileInfillForced;
  if (needs_profile || bc.method == BaselineMethod::RandomPairing) {
    const std::string source_path = (!opt.pool.empty() && bc.method == BaselineMethod::RandomPairing)
                                        ? opt.pool
                                        : opt.train;
    if (source_path.empty()) throw std::runtime_error("method requires --train (or --pool)");
    const auto recs = read_fasta_file(source_path);
    if (recs.empty()) throw std::runtime_error("empty FASTA file: " + source_path);
    pool = records_to_sequences(recs, ab, opt.train_aligned);
    if (needs_profile) {
      if (opt.ref_index < 0 || opt.ref_index >= int(pool.size()))
        throw std::runtime_error("ref index out of range");
      // Columns are reference coordinates so that the input mapping below
      // lands in the same space regardless of how the train set was stored.
      reference = pool[size_t(opt.ref_index)];
      const AlignedDataset data = AlignedDataset::from_reference(reference, pool, scoring);
      profile = ColumnProfile::fit(data, opt.alpha);
    }
  }

  Rng rng(opt.seed);
  std::vector<FastaRecord> out_records;
  for (size_t i = 0; i < inputs.size(); ++i) {
    for (int rep = 0; rep < opt.num; ++rep) {
      Rng seq_rng = rng.fork(i * size_t(opt.num) + size_t(rep));
      Sequence result;
      switch (bc.method) {
        case BaselineMethod::RandomPairing:
          result = random_pairing(pool, seq_rng);
          break;
        case BaselineMethod::RandomMutation:
          result = random_mutation(inputs[i], bc, seq_rng);
          break;
        case BaselineMethod::ProfileInfill:
        case BaselineMethod::ProfileInfillForced: {
          const auto cols = map_to_reference_columns(reference, inputs[i], scoring);
          result = bc.method == BaselineMethod::ProfileInfill
                       ? profile_infill(inputs[i], profile, cols, bc, seq_rng)
                       : profile_infill_forced(inputs[i], profile, cols, bc, seq_rng);
          break;
        }
      }
      FastaRecord rec;
      rec.id = inputs_recs[i].id + (opt.num > 1 ? "#" + std::to_string(rep) : "");
      rec.desc = opt.method;
      rec.seq = result.str();
      out_records.push_back(std::move(rec));
    }
  }

  json j{{"method", opt.method},
         {"expected_edits", opt.expected_edits},
         {"temperature", opt.temperature},
         {"seed", opt.seed},
         {"inputs", opt.inputs}};
  write_fasta_file(opt.output, out_records, run_info("baselines", j));
  std::cout << "wrote " << out_records.size() << " sequences to " << opt.output << '\n';
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"edit-based sequence flow models: training, sampling and evaluation"};
  app.require_subcommand(1);
  // Declarative run configs: `evoflow --config run.cfg <command> [flags]`,
  // with one section per command; command-line flags take precedence.
  app.set_config("--config", "", "run configuration file");
  int schema_version = 1;
  app.add_option("--schema-version", schema_version, "config schema version")
      ->check(CLI::IsMember({1}))
      ->capture_default_str();

  IngestOptions ingest_opt;
  auto* ingest = app.add_subcommand("ingest", "validate a homolog FASTA file and print summary stats");
  ingest->add_option("--input", ingest_opt.input, "FASTA file")->required();
  ingest->add_flag("--aligned", ingest_opt.aligned, "accept '-' gaps (aligned FASTA)");
  ingest->add_option("--alphabet", ingest_opt.alphabet, "alphabet tokens")->capture_default_str();

  TrainOptions train_opt;
  auto* tr = app.add_subcommand("train", "train a rate model on a homolog cluster");
  tr->add_option("--input", train_opt.ingest.input, "FASTA file")->required();
  tr->add_flag("--aligned", train_opt.ingest.aligned, "accept '-' gaps");
  tr->add_option("--alphabet", train_opt.ingest.alphabet, "alphabet tokens")->capture_default_str();
  tr->add_option("--output", train_opt.output, "checkpoint path")->capture_default_str();
  tr->add_option("--loss-trace", train_opt.loss_trace, "loss trace CSV path");
  tr->add_option("--fractions", train_opt.fractions, "train,inference,holdout fractions")
      ->capture_default_str();
  tr->add_option("--seed", train_opt.seed, "random seed")->capture_default_str();
  tr->add_option("--epochs", train_opt.epochs)->capture_default_str();
  tr->add_option("--batch", train_opt.batch)->capture_default_str();
  tr->add_option("--time-samples", train_opt.time_samples)->capture_default_str();
  tr->add_option("--lr", train_opt.lr, "step size")->capture_default_str();
  tr->add_option("--t-clamp", train_opt.t_clamp)->capture_default_str();
  tr->add_option("--encoder", train_opt.encoder, "window_mlp | mini_transformer")
      ->capture_default_str();
  tr->add_option("--embed-dim", train_opt.embed_dim)->capture_default_str();
  tr->add_option("--layers", train_opt.layers)->capture_default_str();
  tr->add_option("--heads", train_opt.heads)->capture_default_str();
  tr->add_option("--window", train_opt.window)->capture_default_str();
  tr->add_option("--rate-activation", train_opt.activation, "softplus | bounded_sigmoid")
      ->capture_default_str();
  tr->add_option("--max-rate", train_opt.max_rate)->capture_default_str();
  tr->add_option("--gap-open", train_opt.gap_open)->capture_default_str();
  tr->add_option("--gap-extend", train_opt.gap_extend)->capture_default_str();

  SampleOptions sample_opt;
  auto* sm = app.add_subcommand("sample", "sample edited sequences from a trained model");
  sm->add_option("--checkpoint", sample_opt.checkpoint)->required();
  sm->add_option("--inputs", sample_opt.inputs, "FASTA of starting sequences")->required();
  sm->add_option("--output", sample_opt.output)->capture_default_str();
  sm->add_option("--trajectories", sample_opt.trajectories, "event log path");
  sm->add_option("--num", sample_opt.num, "samples per input")->capture_default_str();
  sm->add_option("--clock-norm", sample_opt.clock_norm)->capture_default_str();
  sm->add_flag("--length-normalize", sample_opt.length_normalize);
  sm->add_flag("--euler", sample_opt.euler, "use the fixed-grid sampler");
  sm->add_option("--euler-step", sample_opt.euler_step)->capture_default_str();
  sm->add_option("--substep", sample_opt.substep, "quadrature substep")->capture_default_str();
  sm->add_option("--t-max", sample_opt.t_max)->capture_default_str();
  sm->add_option("--target-edits", sample_opt.target_edits,
                 "calibrate the clock to this mean edit count first");
  sm->add_option("--seed", sample_opt.seed)->capture_default_str();

  BenchOptions bench_opt;
  auto* bd = app.add_subcommand("bench-det", "deterministic rule-edit benchmark");
  bd->add_option("--train-cases", bench_opt.train_cases)->capture_default_str();
  bd->add_option("--eval-cases", bench_opt.eval_cases)->capture_default_str();
  bd->add_option("--len-min", bench_opt.len_min)->capture_default_str();
  bd->add_option("--len-max", bench_opt.len_max)->capture_default_str();
  bd->add_option("--seed", bench_opt.seed)->capture_default_str();
  bd->add_flag("--oracle", bench_opt.oracle, "score ground-truth oracle rates instead of a model");
  bd->add_option("--checkpoint-in", bench_opt.checkpoint_in, "evaluate an existing checkpoint");
  bd->add_option("--checkpoint-out", bench_opt.checkpoint_out, "save the trained model");
  bd->add_option("--clocks", bench_opt.clocks, "comma-separated clock values")
      ->capture_default_str();
  bd->add_option("--output-prefix", bench_opt.output_prefix)->capture_default_str();
  bd->add_option("--scoring", bench_opt.scoring, "trajectory | alignment")->capture_default_str();
  bd->add_option("--encoder", bench_opt.encoder)->capture_default_str();
  bd->add_option("--embed-dim", bench_opt.embed_dim)->capture_default_str();
  bd->add_option("--window", bench_opt.window)->capture_default_str();
  bd->add_option("--layers", bench_opt.layers)->capture_default_str();
  bd->add_option("--heads", bench_opt.heads)->capture_default_str();
  bd->add_option("--epochs", bench_opt.epochs)->capture_default_str();
  bd->add_option("--batch", bench_opt.batch)->capture_default_str();
  bd->add_option("--time-samples", bench_opt.time_samples)->capture_default_str();
  bd->add_option("--lr", bench_opt.lr)->capture_default_str();
  bd->add_option("--substep", bench_opt.substep)->capture_default_str();
  bd->add_option("--bootstrap", bench_opt.bootstrap)->capture_default_str();

  EvalOptions eval_opt;
  auto* ev = app.add_subcommand("eval", "distribution metrics for generated sets");
  ev->add_option("--generated", eval_opt.generated, "name=path, repeatable")->required();
  ev->add_option("--holdout", eval_opt.holdout)->required();
  ev->add_option("--inputs", eval_opt.inputs, "starting sequences (x0)")->required();
  ev->add_option("--alphabet", eval_opt.alphabet)->capture_default_str();
  ev->add_option("--output-prefix", eval_opt.output_prefix)->capture_default_str();
  ev->add_option("--k", eval_opt.spectrum_k, "spectrum kernel k-mer size")->capture_default_str();
  ev->add_option("--alpha", eval_opt.alpha, "pseudo-count weight")->capture_default_str();
  ev->add_option("--ref-index", eval_opt.ref_index, "alignment reference among inputs")
      ->capture_default_str();

  BaselineOptions base_opt;
  auto* bl = app.add_subcommand("baselines", "edit-count matched comparison methods");
  bl->add_option("--method", base_opt.method,
                 "random_pairing | profile_infill | profile_infill_forced | random_mutation")
      ->capture_default_str();
  bl->add_option("--train", base_opt.train, "train-split FASTA for profile fitting");
  bl->add_flag("--train-aligned", base_opt.train_aligned, "train FASTA is an alignment");
  bl->add_option("--pool", base_opt.pool, "pool FASTA for random_pairing");
  bl->add_option("--inputs", base_opt.inputs)->required();
  bl->add_option("--output", base_opt.output)->capture_default_str();
  bl->add_option("--alphabet", base_opt.alphabet)->capture_default_str();
  bl->add_option("--expected-edits", base_opt.expected_edits)->capture_default_str();
  bl->add_option("--temperature", base_opt.temperature)->capture_default_str();
  bl->add_option("--alpha", base_opt.alpha)->capture_default_str();
  bl->add_option("--num", base_opt.num, "samples per input")->capture_default_str();
  bl->add_option("--ref-index", base_opt.ref_index)->capture_default_str();
  bl->add_option("--seed", base_opt.seed)->capture_default_str();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*ingest) return cmd_ingest(ingest_opt);
    if (*tr) return cmd_train(train_opt);
    if (*sm) return cmd_sample(sample_opt);
    if (*bd) return cmd_bench_det(bench_opt);
    if (*ev) return cmd_eval(eval_opt);
    if (*bl) return cmd_baselines(base_opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace evoflow
