#include "evoflow/trainer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "evoflow/flowpath.hpp"
#include "evoflow/rng.hpp"
#include "nlohmann/json.hpp"

namespace evoflow {

using json = nlohmann::json;

void HomologCluster::validate() const {
  if (members.empty()) throw std::invalid_argument("HomologCluster: empty");
  for (const auto& m : members)
    require_same_alphabet(members.front(), m, "HomologCluster");
  if (seed_index < 0 || seed_index >= int(members.size()))
    throw std::invalid_argument("HomologCluster: bad seed index");
}

const char* split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Inference: return "inference";
    case Split::Holdout: return "holdout";
  }
  return "?";
}

SplitAssignment split_cluster(const HomologCluster& cluster,
                              const std::array<double, 3>& fractions, uint64_t seed) {
  cluster.validate();
  const int n = int(cluster.members.size());
  if (n < 3) throw std::invalid_argument("split_cluster: need at least 3 members");
  double fsum = 0.0;
  for (double f : fractions) {
    if (f < 0) throw std::invalid_argument("split_cluster: negative fraction");
    fsum += f;
  }
  if (std::abs(fsum - 1.0) > 1e-9)
    throw std::invalid_argument("split_cluster: fractions must sum to 1");

  std::array<int, 3> sizes;
  std::array<double, 3> fracpart;
  int assigned = 0;
  for (int k = 0; k < 3; ++k) {
    const double want = fractions[size_t(k)] * n;
    sizes[size_t(k)] = int(std::floor(want));
    fracpart[size_t(k)] = want - sizes[size_t(k)];
    assigned += sizes[size_t(k)];
  }
  for (int rem = n - assigned; rem > 0; --rem) {
    int best = 0;
    for (int k = 1; k < 3; ++k)
      if (fracpart[size_t(k)] > fracpart[size_t(best)]) best = k;
    ++sizes[size_t(best)];
    fracpart[size_t(best)] = -1.0;
  }

  std::vector<int> order(static_cast<size_t>(n), 0);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  SplitAssignment split(size_t(n), Split::Train);
  int idx = 0;
  for (int k = 0; k < 3; ++k)
    for (int c = 0; c < sizes[size_t(k)]; ++c) split[size_t(order[size_t(idx++)])] = Split(k);
  return split;
}

std::vector<int> PairDataset::members_in(Split s) const {
  std::vector<int> out;
  for (size_t i = 0; i < split.size(); ++i)
    if (split[i] == s) out.push_back(int(i));
  return out;
}

PairDataset build_pairs(const HomologCluster& cluster, const SplitAssignment& split,
                        const ScoringScheme& scoring) {
  cluster.validate();
  if (split.size() != cluster.members.size())
    throw std::invalid_argument("build_pairs: split size mismatch");
  std::vector<int> train;
  for (size_t i = 0; i < split.size(); ++i)
    if (split[i] == Split::Train) train.push_back(int(i));
  if (train.size() < 2) throw std::invalid_argument("build_pairs: need at least 2 train members");

  PairDataset ds;
  ds.split = split;
  ds.pairs.reserve(train.size() * (train.size() - 1) / 2);
  for (size_t a = 0; a < train.size(); ++a)
    for (size_t b = a + 1; b < train.size(); ++b) {
      PairItem item;
      item.i = train[a];
      item.j = train[b];
      item.pair = nw_align(cluster.members[size_t(item.i)], cluster.members[size_t(item.j)],
                           scoring)
                      .pair;
      ds.pairs.push_back(std::move(item));
    }
  return ds;
}

namespace {

struct Adam {
  double lr, b1, b2, eps;
  int64_t t = 0;
  std::vector<std::vector<double>> m, v;

  Adam(const ModelParams& params, const TrainConfig& cfg)
      : lr(cfg.step_size), b1(cfg.beta1), b2(cfg.beta2), eps(cfg.adam_eps) {
    for (const auto& tns : params.tensors) {
      m.emplace_back(tns.size(), 0.0);
      v.emplace_back(tns.size(), 0.0);
    }
  }

  void step(ModelParams& params, const GradBuffer& grads) {
    ++t;
    const double c1 = 1.0 - std::pow(b1, double(t));
    const double c2 = 1.0 - std::pow(b2, double(t));
    for (size_t s = 0; s < params.tensors.size(); ++s) {
      auto& w = params.tensors[s].v;
      const auto& g = grads.g[s];
      for (size_t i = 0; i < w.size(); ++i) {
        m[s][i] = b1 * m[s][i] + (1.0 - b1) * g[i];
        v[s][i] = b2 * v[s][i] + (1.0 - b2) * g[i] * g[i];
        const double mhat = m[s][i] / c1;
        const double vhat = v[s][i] / c2;
        w[i] = float(double(w[i]) - lr * mhat / (std::sqrt(vhat) + eps));
      }
    }
  }
};

}  // namespace

TrainResult train(const PairDataset& dataset, const TrainConfig& config,
                  const ModelConfig& model_config,
                  const std::function<void(int, double)>& progress) {
  return train_from(dataset, config, model_config,
                    ModelParams::init(model_config, config.seed), progress);
}

TrainResult train_from(const PairDataset& dataset, const TrainConfig& config,
                       const ModelConfig& model_config, ModelParams params,
                       const std::function<void(int, double)>& progress) {
  if (dataset.pairs.empty()) throw std::invalid_argument("train: empty dataset");
  if (config.time_samples < 1) throw std::invalid_argument("train: time_samples must be >= 1");
  if (config.step_size <= 0) throw std::invalid_argument("train: step size must be positive");
  model_config.validate();
  ModelParams::check_compatible(model_config, params);
  const AlphabetPtr ab = model_config.make_alphabet();

  Rng rng(config.seed ^ 0x7f4a7c15ULL);
  Adam adam(params, config);
  GradBuffer grads(params);
  TrainResult result;

  std::vector<int> order(dataset.pairs.size());
  std::iota(order.begin(), order.end(), 0);

  int step_index = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t start = 0; start < order.size(); start += size_t(config.batch_size)) {
      const size_t stop = std::min(order.size(), start + size_t(config.batch_size));
      const double weight = 1.0 / (double(stop - start) * config.time_samples);
      grads.zero();
      double loss = 0.0;

      for (size_t bi = start; bi < stop; ++bi) {
        const AlignedPair& p = dataset.pairs[size_t(order[bi])].pair;
        const bool flip = rng.uniform() < 0.5;
        const std::vector<int>& z0 = flip ? p.z1 : p.z0;
        const std::vector<int>& z1 = flip ? p.z0 : p.z1;
        AlignedPair oriented;
        oriented.alphabet = p.alphabet;
        oriented.z0 = z0;
        oriented.z1 = z1;

        for (int k = 0; k < config.time_samples; ++k) {
          const double t = std::min(rng.uniform(), 1.0 - config.t_clamp);
          const std::vector<int> z = sample_path_state(oriented, t, config.schedule, rng);
          const ConditionalTarget target = conditional_rate(z, z1, t, config.schedule);
          const Sequence x(ab, strip_gaps(z));

          RateEvaluator ev(model_config, params, x);
          const RateTable table = ev.table_for_training(t);
          const BregmanResult br = bregman_loss(table, x, target);
          loss += weight * br.loss;
          ev.backward(br.adjoint, weight, grads);
        }
      }

      if (!std::isfinite(loss))
        throw std::runtime_error("train: non-finite loss at step " + std::to_string(step_index));
      adam.step(params, grads);
      result.loss_trace.push_back(loss);
      if (progress) progress(step_index, loss);
      ++step_index;
    }
  }
  result.params = std::move(params);
  return result;
}

// --------------------------- checkpoint I/O --------------------------------

namespace {

uint64_t fnv1a64(const unsigned char* data, size_t n) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload assumes a little-endian host");

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  json manifest = json::array();
  for (const auto& t : ckpt.params.tensors)
    manifest.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols},
                        {"count", t.size()}});
  json header;
  header["format_version"] = ckpt.version;
  header["config"] = json::parse(ckpt.config.to_json());
  header["manifest"] = manifest;
  header["meta"] = {{"epoch", ckpt.meta.epoch},
                    {"seed", ckpt.meta.seed},
                    {"loss_trace", ckpt.meta.loss_trace}};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << header.dump() << '\n';

  std::vector<unsigned char> payload;
  size_t total = 0;
  for (const auto& t : ckpt.params.tensors) total += t.size() * sizeof(float);
  payload.reserve(total);
  for (const auto& t : ckpt.params.tensors) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(t.v.data());
    payload.insert(payload.end(), bytes, bytes + t.size() * sizeof(float));
  }
  out.write(reinterpret_cast<const char*>(payload.data()), std::streamsize(payload.size()));
  const uint64_t checksum = fnv1a64(payload.data(), payload.size());
  out.write(reinterpret_cast<const char*>(&checksum), sizeof(checksum));
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string header_line;
  if (!std::getline(in, header_line)) throw std::runtime_error("checkpoint: missing header");

  json header;
  try {
    header = json::parse(header_line);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("checkpoint: bad header: ") + e.what());
  }
  Checkpoint ckpt;
  ckpt.version = header.at("format_version").get<int>();
  if (ckpt.version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported format version " +
                             std::to_string(ckpt.version));
  ckpt.config = ModelConfig::from_json(header.at("config").dump());
  ckpt.meta.epoch = header.at("meta").at("epoch").get<int>();
  ckpt.meta.seed = header.at("meta").at("seed").get<uint64_t>();
  ckpt.meta.loss_trace = header.at("meta").at("loss_trace").get<std::vector<double>>();

  size_t total_floats = 0;
  for (const auto& m : header.at("manifest")) {
    NamedTensor t;
    t.name = m.at("name").get<std::string>();
    t.rows = m.at("rows").get<int>();
    t.cols = m.at("cols").get<int>();
    const auto count = m.at("count").get<size_t>();
    if (count != size_t(t.rows) * size_t(t.cols))
      throw std::runtime_error("checkpoint: manifest count mismatch for " + t.name);
    t.v.resize(count);
    total_floats += count;
    ckpt.params.tensors.push_back(std::move(t));
  }

  std::vector<unsigned char> payload(total_floats * sizeof(float));
  in.read(reinterpret_cast<char*>(payload.data()), std::streamsize(payload.size()));
  if (size_t(in.gcount()) != payload.size())
    throw std::runtime_error("checkpoint: truncated payload");
  uint64_t stored = 0;
  in.read(reinterpret_cast<char*>(&stored), sizeof(stored));
  if (size_t(in.gcount()) != sizeof(stored))
    throw std::runtime_error("checkpoint: truncated checksum");
  const uint64_t computed = fnv1a64(payload.data(), payload.size());
  if (stored != computed) throw std::runtime_error("checkpoint: checksum mismatch");

  size_t off = 0;
  for (auto& t : ckpt.params.tensors) {
    std::memcpy(t.v.data(), payload.data() + off, t.size() * sizeof(float));
    off += t.size() * sizeof(float);
  }
  ModelParams::check_compatible(ckpt.config, ckpt.params);
  return ckpt;
}

}  // namespace evoflow
