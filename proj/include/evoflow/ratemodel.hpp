#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "evoflow/alphabet.hpp"
#include "evoflow/autodiff.hpp"
#include "evoflow/rate_table.hpp"

namespace evoflow {

enum class EncoderKind { WindowMlp, MiniTransformer };
enum class RateActivation { Softplus, BoundedSigmoid };

struct ModelConfig {
  std::string alphabet_tokens = "ARNDCQEGHILKMFPSTWYV";
  char gap_symbol = '-';
  EncoderKind encoder = EncoderKind::MiniTransformer;
  int window = 9;       // window_mlp context width, odd
  int layers = 2;       // transformer blocks
  int heads = 4;        // attention heads
  int embed_dim = 64;   // D
  int head_hidden = 0;  // 0 means embed_dim
  int time_freqs = 64;  // sinusoidal frequencies, geometric in [1, 1000]
  RateActivation rate_activation = RateActivation::Softplus;
  double max_rate = 50.0;  // bounded_sigmoid ceiling

  int alphabet_size() const { return int(alphabet_tokens.size()); }
  int hidden() const { return head_hidden > 0 ? head_hidden : embed_dim; }
  AlphabetPtr make_alphabet() const;
  void validate() const;

  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
};

struct NamedTensor {
  std::string name;
  int rows = 0, cols = 0;
  std::vector<float> v;
  size_t size() const { return v.size(); }
};

struct TensorShape {
  std::string name;
  int rows = 0, cols = 0;
};

// All trainable weights, stored as float32 so checkpoints round-trip
// bit-exactly. Tensor order is fixed by the config.
struct ModelParams {
  std::vector<NamedTensor> tensors;

  static ModelParams init(const ModelConfig& config, uint64_t seed);
  static std::vector<TensorShape> layout_shapes(const ModelConfig& config);
  static ModelParams zeros(const ModelConfig& config);
  // Throws std::invalid_argument when params do not match the config layout.
  static void check_compatible(const ModelConfig& config, const ModelParams& params);

  NamedTensor& find(const std::string& name);
  const NamedTensor& find(const std::string& name) const;
  size_t total_elements() const;
  std::vector<size_t> slot_sizes() const;
  bool same_shape_as(const ModelParams& other) const;
  bool operator==(const ModelParams& other) const;
};

// Gradient buffer matching a ModelParams layout, in double precision.
struct GradBuffer {
  std::vector<std::vector<double>> g;
  explicit GradBuffer(const ModelParams& p);
  void zero();
  void axpy(double a, const GradBuffer& other);
};

// Forward evaluator for one sequence. The encoder runs once at construction;
// table(t) re-runs only the time embedding, FiLM and heads, so sweeping t for
// a fixed sequence is cheap.
class RateEvaluator {
 public:
  RateEvaluator(const ModelConfig& config, const ModelParams& params, const Sequence& x);
  ~RateEvaluator();
  RateEvaluator(RateEvaluator&&) noexcept;

  const Sequence& sequence() const { return x_; }

  // Evaluate the table at time t and drop the t-dependent part of the graph.
  RateTable table(double t);

  // Evaluate and keep the graph so gradients can flow; call backward() next.
  RateTable table_for_training(double t);
  // Reverse pass from d(loss)/d(table); accumulates weight * grad into out.
  // Invalidates the pending training graph.
  void backward(const RateTableAdjoint& adjoint, double weight, GradBuffer& out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Sequence x_;
};

// One-shot forward pass.
RateTable model_forward(const Sequence& x, double t, const ModelParams& params,
                        const ModelConfig& config);
// One-shot reverse pass: gradient of sum(adjoint * table) w.r.t. every
// parameter.
GradBuffer model_backward(const Sequence& x, double t, const ModelParams& params,
                          const ModelConfig& config, const RateTableAdjoint& adjoint);

}  // namespace evoflow
