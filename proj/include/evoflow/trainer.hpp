#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "evoflow/align.hpp"
#include "evoflow/ratemodel.hpp"
#include "evoflow/schedule.hpp"

namespace evoflow {

struct HomologCluster {
  std::vector<Sequence> members;
  std::vector<std::string> ids;  // optional, parallel to members
  std::string source;
  int seed_index = 0;  // designated reference member

  void validate() const;
};

enum class Split : uint8_t { Train = 0, Inference = 1, Holdout = 2 };
const char* split_name(Split s);

using SplitAssignment = std::vector<Split>;

// Deterministic split of cluster members into train/inference/holdout.
// Sizes are floor(fraction * n) with the remainder assigned to the splits
// with the largest fractional parts (ties favor train first).
SplitAssignment split_cluster(const HomologCluster& cluster,
                              const std::array<double, 3>& fractions, uint64_t seed);

struct PairItem {
  int i = 0, j = 0;  // member indices, i < j
  AlignedPair pair;
};

struct PairDataset {
  std::vector<PairItem> pairs;
  SplitAssignment split;

  std::vector<int> members_in(Split s) const;
};

// All unordered pairs of train-split members, globally aligned.
PairDataset build_pairs(const HomologCluster& cluster, const SplitAssignment& split,
                        const ScoringScheme& scoring);

struct TrainConfig {
  double step_size = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int batch_size = 8;
  int time_samples = 4;  // K
  int epochs = 10;
  uint64_t seed = 0;
  double t_clamp = 1e-3;  // sampled t is min(u, 1 - t_clamp)
  Schedule schedule = Schedule::linear();
};

struct TrainResult {
  ModelParams params;
  std::vector<double> loss_trace;  // one entry per optimizer step
};

// Stochastic training of the rate model on aligned pairs. Each step draws a
// batch of pairs (random orientation), K (t, path state) samples per pair,
// and applies one adaptive-moment update on the averaged objective. Fully
// reproducible from the seed. Throws std::runtime_error naming the step on a
// non-finite loss.
TrainResult train(const PairDataset& dataset, const TrainConfig& config,
                  const ModelConfig& model_config,
                  const std::function<void(int, double)>& progress = nullptr);

// As train(), but starting from given parameters.
TrainResult train_from(const PairDataset& dataset, const TrainConfig& config,
                       const ModelConfig& model_config, ModelParams params,
                       const std::function<void(int, double)>& progress = nullptr);

struct TrainMeta {
  int epoch = 0;
  uint64_t seed = 0;
  std::vector<double> loss_trace;
};

struct Checkpoint {
  int version = 1;
  ModelConfig config;
  ModelParams params;
  TrainMeta meta;
};

inline constexpr int kCheckpointVersion = 1;

// Single-line JSON header (version, config, tensor manifest, metadata),
// then raw little-endian float32 payload in manifest order, then a 64-bit
// FNV-1a checksum of the payload bytes.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace evoflow
