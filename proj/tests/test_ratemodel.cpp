#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "evoflow/flowpath.hpp"
#include "evoflow/ratemodel.hpp"
#include "evoflow/rng.hpp"
#include "oracles.hpp"

using namespace evoflow;

namespace {

ModelConfig tiny_config(EncoderKind enc = EncoderKind::MiniTransformer) {
  ModelConfig mc;
  mc.alphabet_tokens = "ABCD";
  mc.encoder = enc;
  mc.embed_dim = 8;
  mc.layers = 1;
  mc.heads = 2;
  mc.window = 5;
  mc.time_freqs = 8;
  return mc;
}

bool tables_equal(const RateTable& a, const RateTable& b) {
  return a.lam_sub == b.lam_sub && a.lam_del == b.lam_del && a.lam_ins == b.lam_ins &&
         a.q_sub == b.q_sub && a.q_ins == b.q_ins;
}

}  // namespace

TEST_CASE("forward determinism and table invariants") {
  for (const auto enc : {EncoderKind::MiniTransformer, EncoderKind::WindowMlp}) {
    const ModelConfig mc = tiny_config(enc);
    const ModelParams params = ModelParams::init(mc, 99);
    const AlphabetPtr ab = mc.make_alphabet();
    const Sequence x = Sequence::from_string(ab, "ABCAD");

    const RateTable t1 = model_forward(x, 0.37, params, mc);
    const RateTable t2 = model_forward(x, 0.37, params, mc);
    CHECK(tables_equal(t1, t2));

    CHECK(t1.length == 5);
    CHECK(int(t1.lam_sub.size()) == 5);
    CHECK(int(t1.lam_ins.size()) == 6);
    for (double v : t1.lam_sub) CHECK(v >= 0.0);
    for (double v : t1.lam_del) CHECK(v >= 0.0);
    for (double v : t1.lam_ins) CHECK(v >= 0.0);
    for (int i = 0; i < 5; ++i) {
      double sum = 0.0;
      for (int a = 0; a < 4; ++a) sum += t1.qsub(i, a);
      CHECK(std::abs(sum - 1.0) < 1e-6);
    }
    for (int s = 0; s <= 5; ++s) {
      double sum = 0.0;
      for (int a = 0; a < 4; ++a) sum += t1.qins(s, a);
      CHECK(std::abs(sum - 1.0) < 1e-6);
    }
    CHECK_THROWS_AS(model_forward(x, 1.5, params, mc), std::invalid_argument);
  }
}

TEST_CASE("bounded sigmoid activation keeps rates under the ceiling") {
  ModelConfig mc = tiny_config();
  mc.rate_activation = RateActivation::BoundedSigmoid;
  mc.max_rate = 50.0;
  const ModelParams params = ModelParams::init(mc, 2);
  const Sequence x = Sequence::from_string(mc.make_alphabet(), "ABCD");
  const RateTable t = model_forward(x, 0.6, params, mc);
  for (double v : t.lam_sub) {
    CHECK(v >= 0.0);
    CHECK(v <= 50.0);
  }
}

TEST_CASE("empty sequence yields the single insertion slot") {
  const ModelConfig mc = tiny_config();
  const ModelParams params = ModelParams::init(mc, 5);
  const Sequence empty(mc.make_alphabet(), {});
  const RateTable t = model_forward(empty, 0.2, params, mc);
  CHECK(t.length == 0);
  CHECK(t.lam_sub.empty());
  CHECK(t.lam_del.empty());
  CHECK(t.lam_ins.size() == 1);
  CHECK(t.q_ins.size() == 4);
}

TEST_CASE("zeroed FiLM weights make the table time-invariant") {
  const ModelConfig mc = tiny_config();
  ModelParams params = ModelParams::init(mc, 7);
  auto& fw = params.find("film.w");
  std::fill(fw.v.begin(), fw.v.end(), 0.0f);
  auto& fb = params.find("film.b");
  std::fill(fb.v.begin(), fb.v.end(), 0.0f);

  const Sequence x = Sequence::from_string(mc.make_alphabet(), "DCBA");
  const RateTable a = model_forward(x, 0.0, params, mc);
  const RateTable b = model_forward(x, 0.3, params, mc);
  const RateTable c = model_forward(x, 0.9, params, mc);
  CHECK(tables_equal(a, b));
  CHECK(tables_equal(a, c));
}

TEST_CASE("cached-encoder evaluation is bitwise equal to a fresh forward") {
  const ModelConfig mc = tiny_config();
  const ModelParams params = ModelParams::init(mc, 3);
  const Sequence x = Sequence::from_string(mc.make_alphabet(), "ABDC");

  RateEvaluator cached(mc, params, x);
  const RateTable via_cache_1 = cached.table(0.11);
  const RateTable via_cache_2 = cached.table(0.77);
  CHECK(tables_equal(via_cache_1, model_forward(x, 0.11, params, mc)));
  CHECK(tables_equal(via_cache_2, model_forward(x, 0.77, params, mc)));
  CHECK(tables_equal(cached.table(0.11), via_cache_1));
}

TEST_CASE("total_rate and edit_rate") {
  const AlphabetPtr amino = Alphabet::amino20();
  const Sequence x = Sequence::from_string(amino, "A");
  RateTable t;
  t.length = 1;
  t.alphabet_size = 20;
  t.lam_sub = {1.0};
  t.lam_del = {0.2};
  t.lam_ins = {0.5, 0.5};
  t.q_sub.assign(20, 0.05);
  t.q_ins.assign(40, 0.05);

  CHECK(total_rate(t, x) == doctest::Approx(2.15));

  SUBCASE("all lambda zero gives zero") {
    RateTable z = t;
    z.lam_sub = {0.0};
    z.lam_del = {0.0};
    z.lam_ins = {0.0, 0.0};
    CHECK(total_rate(z, x) == 0.0);
  }
  SUBCASE("doubling lambda doubles the total") {
    RateTable d = t;
    for (auto& v : d.lam_sub) v *= 2;
    for (auto& v : d.lam_del) v *= 2;
    for (auto& v : d.lam_ins) v *= 2;
    CHECK(total_rate(d, x) == doctest::Approx(2 * 2.15));
  }
  SUBCASE("edit rates") {
    CHECK(edit_rate(t, x, EditOp::del(0)) == doctest::Approx(0.2));
    CHECK(edit_rate(t, x, EditOp::ins(1, amino->index_of('K'))) == doctest::Approx(0.025));
    CHECK(edit_rate(t, x, EditOp::sub(0, amino->index_of('R'))) == doctest::Approx(0.05));
    CHECK_THROWS_AS(edit_rate(t, x, EditOp::sub(0, amino->index_of('A'))),
                    std::invalid_argument);
    CHECK_THROWS_AS(edit_rate(t, x, EditOp::del(1)), std::out_of_range);
  }
}

TEST_CASE("sum of edit rates equals total rate exhaustively") {
  const ModelConfig mc = tiny_config(EncoderKind::WindowMlp);
  const ModelParams params = ModelParams::init(mc, 21);
  const AlphabetPtr ab = mc.make_alphabet();
  const auto seqs = testing::all_sequences(ab, 5);
  for (size_t i = 0; i < seqs.size(); i += 17) {
    const Sequence& x = seqs[i];
    const RateTable t = model_forward(x, 0.4, params, mc);
    double sum = 0.0;
    for (int p = 0; p < int(x.size()); ++p) {
      for (int a = 0; a < ab->size(); ++a)
        if (a != x[size_t(p)]) sum += edit_rate(t, x, EditOp::sub(p, a));
      sum += edit_rate(t, x, EditOp::del(p));
    }
    for (int s = 0; s <= int(x.size()); ++s)
      for (int a = 0; a < ab->size(); ++a) sum += edit_rate(t, x, EditOp::ins(s, a));
    CHECK(std::abs(sum - total_rate(t, x)) < 1e-8);
  }
}

TEST_CASE("zero adjoint produces zero gradients") {
  const ModelConfig mc = tiny_config();
  const ModelParams params = ModelParams::init(mc, 13);
  const Sequence x = Sequence::from_string(mc.make_alphabet(), "ABC");
  const RateTable t = model_forward(x, 0.5, params, mc);
  const RateTableAdjoint zero = RateTableAdjoint::zeros_like(t);
  const GradBuffer g = model_backward(x, 0.5, params, mc, zero);
  for (const auto& slot : g.g)
    for (double v : slot) CHECK(v == 0.0);
}

TEST_CASE("gradients of the composed loss match finite differences") {
  for (const auto enc : {EncoderKind::MiniTransformer, EncoderKind::WindowMlp}) {
    ModelConfig mc = tiny_config(enc);
    ModelParams params = ModelParams::init(mc, 31);
    const AlphabetPtr ab = mc.make_alphabet();
    const Sequence x = Sequence::from_string(ab, "ABDA");
    const double t = 0.45;

    ConditionalTarget target;
    target.edits.push_back({EditOp::sub(1, 3), 2.0});
    target.edits.push_back({EditOp::ins(0, 2), 2.0});
    target.edits.push_back({EditOp::del(3), 2.0});
    target.total_target_rate = 6.0;

    const auto loss_fn = [&]() {
      const RateTable table = model_forward(x, t, params, mc);
      return bregman_loss(table, x, target).loss;
    };

    const RateTable table = model_forward(x, t, params, mc);
    const BregmanResult br = bregman_loss(table, x, target);
    const GradBuffer grad = model_backward(x, t, params, mc, br.adjoint);

    Rng rng(17);
    int checked = 0;
    for (int trial = 0; trial < 150; ++trial) {
      const size_t tensor = size_t(rng.uniform_int(int(params.tensors.size())));
      if (params.tensors[tensor].v.empty()) continue;
      const size_t index = size_t(rng.uniform_int(int(params.tensors[tensor].v.size())));
      const double fd = testing::fd_param_grad(params, tensor, index, loss_fn);
      const double an = grad.g[tensor][index];
      CHECK(testing::rel_err(fd, an) < 1e-4);
      ++checked;
    }
    CHECK(checked > 100);
  }
}

TEST_CASE("params mismatch is rejected") {
  const ModelConfig mc = tiny_config();
  ModelConfig other = mc;
  other.embed_dim = 16;
  const ModelParams params = ModelParams::init(other, 1);
  const Sequence x = Sequence::from_string(mc.make_alphabet(), "AB");
  CHECK_THROWS_AS(model_forward(x, 0.5, params, mc), std::invalid_argument);
}

TEST_CASE("config JSON round trip") {
  ModelConfig mc = tiny_config(EncoderKind::WindowMlp);
  mc.rate_activation = RateActivation::BoundedSigmoid;
  mc.max_rate = 12.5;
  const ModelConfig back = ModelConfig::from_json(mc.to_json());
  CHECK(back.alphabet_tokens == mc.alphabet_tokens);
  CHECK(back.encoder == mc.encoder);
  CHECK(back.window == mc.window);
  CHECK(back.embed_dim == mc.embed_dim);
  CHECK(back.rate_activation == mc.rate_activation);
  CHECK(back.max_rate == mc.max_rate);
  CHECK(ModelParams::init(mc, 4) == ModelParams::init(back, 4));
}
