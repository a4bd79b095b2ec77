#include "evoflow/ratemodel.hpp"

#include <cmath>
#include <stdexcept>

#include "evoflow/rng.hpp"
#include "nlohmann/json.hpp"

namespace evoflow {

using ad::Tape;
using ad::Tensor;
using json = nlohmann::json;

AlphabetPtr ModelConfig::make_alphabet() const {
  return Alphabet::make(alphabet_tokens, gap_symbol);
}

void ModelConfig::validate() const {
  if (alphabet_tokens.size() < 2) throw std::invalid_argument("ModelConfig: alphabet too small");
  if (embed_dim <= 0) throw std::invalid_argument("ModelConfig: embed_dim must be positive");
  if (encoder == EncoderKind::WindowMlp && window % 2 == 0)
    throw std::invalid_argument("ModelConfig: window must be odd");
  if (encoder == EncoderKind::MiniTransformer) {
    if (layers <= 0 || heads <= 0) throw std::invalid_argument("ModelConfig: bad transformer size");
    if (embed_dim % heads != 0)
      throw std::invalid_argument("ModelConfig: embed_dim not divisible by heads");
  }
  if (rate_activation == RateActivation::BoundedSigmoid && max_rate <= 0)
    throw std::invalid_argument("ModelConfig: max_rate must be positive");
  if (time_freqs < 2) throw std::invalid_argument("ModelConfig: need at least 2 time frequencies");
}

std::string ModelConfig::to_json() const {
  json j;
  j["alphabet"] = alphabet_tokens;
  j["gap"] = std::string(1, gap_symbol);
  j["encoder"] = encoder == EncoderKind::WindowMlp ? "window_mlp" : "mini_transformer";
  j["window"] = window;
  j["layers"] = layers;
  j["heads"] = heads;
  j["embed_dim"] = embed_dim;
  j["head_hidden"] = head_hidden;
  j["time_freqs"] = time_freqs;
  j["rate_activation"] =
      rate_activation == RateActivation::Softplus ? "softplus" : "bounded_sigmoid";
  j["max_rate"] = max_rate;
  return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  ModelConfig c;
  c.alphabet_tokens = j.at("alphabet").get<std::string>();
  c.gap_symbol = j.at("gap").get<std::string>().at(0);
  const auto enc = j.at("encoder").get<std::string>();
  if (enc == "window_mlp") {
    c.encoder = EncoderKind::WindowMlp;
  } else if (enc == "mini_transformer") {
    c.encoder = EncoderKind::MiniTransformer;
  } else {
    throw std::runtime_error("ModelConfig: unknown encoder '" + enc + "'");
  }
  c.window = j.at("window").get<int>();
  c.layers = j.at("layers").get<int>();
  c.heads = j.at("heads").get<int>();
  c.embed_dim = j.at("embed_dim").get<int>();
  c.head_hidden = j.at("head_hidden").get<int>();
  c.time_freqs = j.at("time_freqs").get<int>();
  const auto act = j.at("rate_activation").get<std::string>();
  if (act == "softplus") {
    c.rate_activation = RateActivation::Softplus;
  } else if (act == "bounded_sigmoid") {
    c.rate_activation = RateActivation::BoundedSigmoid;
  } else {
    throw std::runtime_error("ModelConfig: unknown rate activation '" + act + "'");
  }
  c.max_rate = j.at("max_rate").get<double>();
  c.validate();
  return c;
}

std::vector<TensorShape> ModelParams::layout_shapes(const ModelConfig& config) {
  config.validate();
  const int D = config.embed_dim;
  const int A = config.alphabet_size();
  const int V = A + 2;  // tokens + start/end markers
  const int H = config.hidden();
  const int F = config.time_freqs;

  std::vector<TensorShape> t;
  const auto add = [&t](std::string name, int r, int c) {
    t.push_back({std::move(name), r, c});
  };

  add("tok_embed", V, D);
  if (config.encoder == EncoderKind::MiniTransformer) {
    for (int l = 0; l < config.layers; ++l) {
      const std::string p = "enc" + std::to_string(l) + ".";
      add(p + "ln1.g", 1, D);
      add(p + "ln1.b", 1, D);
      add(p + "wq", D, D);
      add(p + "bq", 1, D);
      add(p + "wk", D, D);
      add(p + "bk", 1, D);
      add(p + "wv", D, D);
      add(p + "bv", 1, D);
      add(p + "wo", D, D);
      add(p + "bo", 1, D);
      add(p + "ln2.g", 1, D);
      add(p + "ln2.b", 1, D);
      add(p + "ff1.w", D, 4 * D);
      add(p + "ff1.b", 1, 4 * D);
      add(p + "ff2.w", 4 * D, D);
      add(p + "ff2.b", 1, D);
    }
    add("enc.lnf.g", 1, D);
    add("enc.lnf.b", 1, D);
  } else {
    add("enc.win1.w", config.window * D, H);
    add("enc.win1.b", 1, H);
    add("enc.win2.w", H, D);
    add("enc.win2.b", 1, D);
  }
  add("time.w1", 2 * F, D);
  add("time.b1", 1, D);
  add("time.w2", D, D);
  add("time.b2", 1, D);
  add("film.w", D, 2 * D);
  add("film.b", 1, 2 * D);
  for (const char* head : {"lam_sub", "lam_ins", "lam_del"}) {
    const std::string p = std::string("head.") + head + ".";
    add(p + "w1", D, H);
    add(p + "b1", 1, H);
    add(p + "w2", H, 1);
    add(p + "b2", 1, 1);
  }
  for (const char* head : {"q_sub", "q_ins"}) {
    const std::string p = std::string("head.") + head + ".";
    add(p + "w1", D, H);
    add(p + "b1", 1, H);
    add(p + "w2", H, A);
    add(p + "b2", 1, A);
  }
  return t;
}

ModelParams ModelParams::zeros(const ModelConfig& config) {
  ModelParams p;
  for (auto& s : layout_shapes(config)) {
    NamedTensor nt;
    nt.name = std::move(s.name);
    nt.rows = s.rows;
    nt.cols = s.cols;
    nt.v.assign(size_t(s.rows) * size_t(s.cols), 0.0f);
    p.tensors.push_back(std::move(nt));
  }
  return p;
}

void ModelParams::check_compatible(const ModelConfig& config, const ModelParams& params) {
  const auto shapes = layout_shapes(config);
  if (shapes.size() != params.tensors.size())
    throw std::invalid_argument("ModelParams: tensor count does not match config");
  for (size_t i = 0; i < shapes.size(); ++i) {
    const auto& t = params.tensors[i];
    if (t.name != shapes[i].name || t.rows != shapes[i].rows || t.cols != shapes[i].cols ||
        t.v.size() != size_t(t.rows) * size_t(t.cols))
      throw std::invalid_argument("ModelParams: tensor '" + t.name + "' does not match config");
  }
}

ModelParams ModelParams::init(const ModelConfig& config, uint64_t seed) {
  ModelParams p = zeros(config);
  Rng rng(seed);
  for (auto& t : p.tensors) {
    const bool is_gain = t.name.ends_with("ln1.g") || t.name.ends_with("ln2.g") ||
                         t.name.ends_with("lnf.g");
    const bool is_bias = t.rows == 1 && !is_gain;
    if (is_gain) {
      std::fill(t.v.begin(), t.v.end(), 1.0f);
    } else if (is_bias) {
      // zeros
    } else {
      const double bound = std::sqrt(6.0 / double(t.rows + t.cols));
      for (auto& x : t.v) x = float(rng.uniform(-bound, bound));
    }
  }
  return p;
}

NamedTensor& ModelParams::find(const std::string& name) {
  for (auto& t : tensors)
    if (t.name == name) return t;
  throw std::out_of_range("ModelParams: no tensor named " + name);
}

const NamedTensor& ModelParams::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t;
  throw std::out_of_range("ModelParams: no tensor named " + name);
}

size_t ModelParams::total_elements() const {
  size_t n = 0;
  for (const auto& t : tensors) n += t.size();
  return n;
}

std::vector<size_t> ModelParams::slot_sizes() const {
  std::vector<size_t> s;
  s.reserve(tensors.size());
  for (const auto& t : tensors) s.push_back(t.size());
  return s;
}

bool ModelParams::same_shape_as(const ModelParams& other) const {
  if (tensors.size() != other.tensors.size()) return false;
  for (size_t i = 0; i < tensors.size(); ++i)
    if (tensors[i].name != other.tensors[i].name || tensors[i].rows != other.tensors[i].rows ||
        tensors[i].cols != other.tensors[i].cols)
      return false;
  return true;
}

bool ModelParams::operator==(const ModelParams& other) const {
  if (!same_shape_as(other)) return false;
  for (size_t i = 0; i < tensors.size(); ++i)
    if (tensors[i].v != other.tensors[i].v) return false;
  return true;
}

GradBuffer::GradBuffer(const ModelParams& p) {
  g.reserve(p.tensors.size());
  for (const auto& t : p.tensors) g.emplace_back(t.size(), 0.0);
}

void GradBuffer::zero() {
  for (auto& t : g) std::fill(t.begin(), t.end(), 0.0);
}

void GradBuffer::axpy(double a, const GradBuffer& other) {
  for (size_t i = 0; i < g.size(); ++i)
    for (size_t j = 0; j < g[i].size(); ++j) g[i][j] += a * other.g[i][j];
}

// ---------------------------------------------------------------------------

struct RateEvaluator::Impl {
  const ModelConfig& config;
  const ModelParams& params;
  Tape tape;
  std::vector<Tape::NodeId> pnode;  // per tensor slot
  Tape::NodeId h = -1;              // encoder output, (L+2) x D
  size_t mark = 0;
  int L = 0;

  // Nodes of the most recent t evaluation (training mode keeps them).
  struct Heads {
    Tape::NodeId lam_sub, lam_ins, lam_del, q_sub, q_ins;
  };
  Heads heads{};
  bool pending = false;

  Impl(const ModelConfig& cfg, const ModelParams& prm) : config(cfg), params(prm) {}

  Tape::NodeId p(const std::string& name) {
    for (size_t i = 0; i < params.tensors.size(); ++i)
      if (params.tensors[i].name == name) return pnode[i];
    throw std::out_of_range("RateEvaluator: no tensor named " + name);
  }

  Tape::NodeId mlp2(Tape::NodeId x, const std::string& prefix) {
    auto z = tape.add_rowvec(tape.matmul(x, p(prefix + ".w1")), p(prefix + ".b1"));
    z = tape.gelu(z);
    return tape.add_rowvec(tape.matmul(z, p(prefix + ".w2")), p(prefix + ".b2"));
  }

  Tape::NodeId rate_activation(Tape::NodeId z) {
    if (config.rate_activation == RateActivation::Softplus) return tape.softplus(z);
    return tape.scale(tape.sigmoid(z), config.max_rate);
  }

  void build_encoder(const Sequence& x) {
    const int D = config.embed_dim;
    const int A = config.alphabet_size();
    L = int(x.size());

    pnode.reserve(params.tensors.size());
    for (size_t i = 0; i < params.tensors.size(); ++i) {
      const auto& t = params.tensors[i];
      pnode.push_back(tape.param(t.v, t.rows, t.cols, int(i)));
    }

    std::vector<int> rows;
    rows.reserve(size_t(L) + 2);
    rows.push_back(A);  // start marker
    for (int s : x.symbols) rows.push_back(s);
    rows.push_back(A + 1);  // end marker
    auto emb = tape.gather_rows(p("tok_embed"), rows);

    if (config.encoder == EncoderKind::MiniTransformer) {
      Tensor pe(L + 2, D);
      for (int pos = 0; pos < L + 2; ++pos)
        for (int j = 0; j < D; ++j) {
          const double w = std::pow(10000.0, -double(2 * (j / 2)) / D);
          pe.at(pos, j) = (j % 2 == 0) ? std::sin(pos * w) : std::cos(pos * w);
        }
      auto hcur = tape.add(emb, tape.constant(std::move(pe)));

      const int nh = config.heads;
      const int dk = D / nh;
      for (int l = 0; l < config.layers; ++l) {
        const std::string pre = "enc" + std::to_string(l) + ".";
        auto a = tape.layer_norm_rows(hcur, p(pre + "ln1.g"), p(pre + "ln1.b"));
        auto q = tape.add_rowvec(tape.matmul(a, p(pre + "wq")), p(pre + "bq"));
        auto k = tape.add_rowvec(tape.matmul(a, p(pre + "wk")), p(pre + "bk"));
        auto v = tape.add_rowvec(tape.matmul(a, p(pre + "wv")), p(pre + "bv"));
        std::vector<Tape::NodeId> ctx;
        ctx.reserve(size_t(nh));
        for (int hd = 0; hd < nh; ++hd) {
          auto qh = tape.slice_cols(q, hd * dk, (hd + 1) * dk);
          auto kh = tape.slice_cols(k, hd * dk, (hd + 1) * dk);
          auto vh = tape.slice_cols(v, hd * dk, (hd + 1) * dk);
          auto scores = tape.scale(tape.matmul(qh, tape.transpose(kh)), 1.0 / std::sqrt(dk));
          ctx.push_back(tape.matmul(tape.softmax_rows(scores), vh));
        }
        auto att = tape.add_rowvec(tape.matmul(tape.concat_cols(ctx), p(pre + "wo")),
                                   p(pre + "bo"));
        hcur = tape.add(hcur, att);
        auto a2 = tape.layer_norm_rows(hcur, p(pre + "ln2.g"), p(pre + "ln2.b"));
        auto f = tape.add_rowvec(tape.matmul(a2, p(pre + "ff1.w")), p(pre + "ff1.b"));
        f = tape.gelu(f);
        f = tape.add_rowvec(tape.matmul(f, p(pre + "ff2.w")), p(pre + "ff2.b"));
        hcur = tape.add(hcur, f);
      }
      h = tape.layer_norm_rows(hcur, p("enc.lnf.g"), p("enc.lnf.b"));
    } else {
      const int r = config.window / 2;
      std::vector<Tape::NodeId> parts;
      parts.reserve(size_t(config.window));
      for (int o = -r; o <= r; ++o)
        parts.push_back(o == 0 ? emb : tape.shift_rows(emb, -o));
      auto win = tape.concat_cols(parts);
      auto z = tape.add_rowvec(tape.matmul(win, p("enc.win1.w")), p("enc.win1.b"));
      z = tape.gelu(z);
      h = tape.add_rowvec(tape.matmul(z, p("enc.win2.w")), p("enc.win2.b"));
    }
    mark = tape.mark();
  }

  Heads eval_t(double t) {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("model forward: t outside [0,1]");
    const int D = config.embed_dim;
    const int F = config.time_freqs;

    Tensor feat(1, 2 * F);
    for (int k = 0; k < F; ++k) {
      const double omega = std::pow(1000.0, double(k) / double(F - 1));
      feat.at(0, 2 * k) = std::sin(omega * t);
      feat.at(0, 2 * k + 1) = std::cos(omega * t);
    }
    auto tf = tape.constant(std::move(feat));
    auto tz = tape.add_rowvec(tape.matmul(tf, p("time.w1")), p("time.b1"));
    tz = tape.gelu(tz);
    auto tau = tape.add_rowvec(tape.matmul(tz, p("time.w2")), p("time.b2"));

    auto fb = tape.add_rowvec(tape.matmul(tau, p("film.w")), p("film.b"));
    auto gamma = tape.slice_cols(fb, 0, D);
    auto beta = tape.slice_cols(fb, D, 2 * D);
    auto ht = tape.add_rowvec(tape.mul_rowvec(h, tape.add_const(gamma, 1.0)), beta);

    auto interior = tape.slice_rows(ht, 1, L + 1);
    auto slots = tape.slice_rows(ht, 0, L + 1);

    Heads out;
    out.lam_sub = rate_activation(mlp2(interior, "head.lam_sub"));
    out.lam_ins = rate_activation(mlp2(slots, "head.lam_ins"));
    out.lam_del = rate_activation(mlp2(interior, "head.lam_del"));
    out.q_sub = tape.softmax_rows(mlp2(interior, "head.q_sub"));
    out.q_ins = tape.softmax_rows(mlp2(slots, "head.q_ins"));
    return out;
  }

  RateTable extract(const Heads& hd) const {
    RateTable table;
    table.length = L;
    table.alphabet_size = config.alphabet_size();
    table.lam_sub = tape.val(hd.lam_sub).v;
    table.lam_ins = tape.val(hd.lam_ins).v;
    table.lam_del = tape.val(hd.lam_del).v;
    table.q_sub = tape.val(hd.q_sub).v;
    table.q_ins = tape.val(hd.q_ins).v;
    return table;
  }
};

RateEvaluator::RateEvaluator(const ModelConfig& config, const ModelParams& params,
                             const Sequence& x)
    : impl_(std::make_unique<Impl>(config, params)), x_(x) {
  if (x.alphabet->tokens() != config.alphabet_tokens)
    throw std::invalid_argument("RateEvaluator: sequence alphabet does not match model");
  ModelParams::check_compatible(config, params);
  impl_->tape.configure_param_grads(params.slot_sizes());
  impl_->build_encoder(x);
}

RateEvaluator::~RateEvaluator() = default;
RateEvaluator::RateEvaluator(RateEvaluator&&) noexcept = default;

RateTable RateEvaluator::table(double t) {
  impl_->tape.rollback(impl_->mark);
  impl_->pending = false;
  const auto heads = impl_->eval_t(t);
  RateTable out = impl_->extract(heads);
  impl_->tape.rollback(impl_->mark);
  return out;
}

RateTable RateEvaluator::table_for_training(double t) {
  impl_->tape.rollback(impl_->mark);
  impl_->heads = impl_->eval_t(t);
  impl_->pending = true;
  return impl_->extract(impl_->heads);
}

void RateEvaluator::backward(const RateTableAdjoint& adjoint, double weight, GradBuffer& out) {
  if (!impl_->pending) throw std::logic_error("RateEvaluator: no pending training graph");
  const int A = impl_->config.alphabet_size();
  const auto seed = [&](Tape::NodeId id, const std::vector<double>& adj, int cols) {
    Tensor s(int(adj.size()) / cols, cols);
    s.v = adj;
    return std::make_pair(id, std::move(s));
  };
  std::vector<std::pair<Tape::NodeId, Tensor>> seeds;
  seeds.push_back(seed(impl_->heads.lam_sub, adjoint.lam_sub, 1));
  seeds.push_back(seed(impl_->heads.lam_ins, adjoint.lam_ins, 1));
  seeds.push_back(seed(impl_->heads.lam_del, adjoint.lam_del, 1));
  seeds.push_back(seed(impl_->heads.q_sub, adjoint.q_sub, A));
  seeds.push_back(seed(impl_->heads.q_ins, adjoint.q_ins, A));

  impl_->tape.reset_param_grads();
  impl_->tape.backward(seeds);
  for (size_t slot = 0; slot < out.g.size(); ++slot) {
    const auto grad = impl_->tape.param_grad(int(slot));
    for (size_t i = 0; i < grad.size(); ++i) out.g[slot][i] += weight * grad[i];
  }
  impl_->tape.rollback(impl_->mark);
  impl_->pending = false;
}

RateTable model_forward(const Sequence& x, double t, const ModelParams& params,
                        const ModelConfig& config) {
  RateEvaluator ev(config, params, x);
  return ev.table(t);
}

GradBuffer model_backward(const Sequence& x, double t, const ModelParams& params,
                          const ModelConfig& config, const RateTableAdjoint& adjoint) {
  RateEvaluator ev(config, params, x);
  ev.table_for_training(t);
  GradBuffer out(params);
  ev.backward(adjoint, 1.0, out);
  return out;
}

}  // namespace evoflow
