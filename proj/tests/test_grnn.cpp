#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "netfuzz/checkpoint.hpp"
#include "netfuzz/dataset.hpp"
#include "netfuzz/error.hpp"
#include "netfuzz/grnn.hpp"
#include "netfuzz/train.hpp"
#include "support/oracles.hpp"

using namespace netfuzz;

namespace {

std::string data(const char* name) {
  return std::string(NETFUZZ_DATA_DIR "/") + name;
}

ModelConfig tiny_config(bool attention = false) {
  ModelConfig c;
  c.gcn_dims = {17, 6, 5};
  c.lstm_hidden = 4;
  c.dropout = 0.0;
  c.attention = attention;
  return c;
}

// 3-node chain: a -> m -> y.
struct TinyInstance {
  Netlist nl;
  NetGraph g;
  NormalizedAdjacency a;
  Sample sample;
  std::vector<uint8_t> mask;
};

TinyInstance tiny_instance() {
  TinyInstance t;
  t.nl = parse_bench("INPUT(a)\nOUTPUT(y)\nm = NOT(a)\ny = NOT(m)\n");
  t.g = build_graph(t.nl);
  t.a = normalized_adjacency(t.g);
  Seed s;
  s.width = 1;
  s.T = 2;
  s.bits = {0, 1};
  t.sample = build_sample(t.nl, t.g, s);
  t.mask = loss_mask(t.g);
  return t;
}

// Central finite differences against the analytic gradients.
double max_relative_gradient_error(GrnnModel& model,
                                   const NormalizedAdjacency& a,
                                   const Sample& sample,
                                   std::span<const uint8_t> mask) {
  const GradientCheckResult base = loss_and_gradients(model, a, sample, mask);
  const double h = 1e-6;
  double worst = 0.0;
  auto params = model.parameters();
  for (size_t p = 0; p < params.size(); ++p) {
    for (size_t k = 0; k < params[p]->data.size(); ++k) {
      const double saved = params[p]->data[k];
      params[p]->data[k] = saved + h;
      const double up = loss_and_gradients(model, a, sample, mask).loss;
      params[p]->data[k] = saved - h;
      const double down = loss_and_gradients(model, a, sample, mask).loss;
      params[p]->data[k] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = base.grads[p].data[k];
      const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
      worst = std::max(worst, std::abs(numeric - analytic) / denom);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("he init: sample std matches sqrt(2/fan_in)") {
  Rng rng(42);
  const Tensor2 t = he_normal_init(128, 800, rng);  // ~1e5 draws
  double sum = 0.0, sq = 0.0;
  for (double v : t.data) {
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(t.data.size());
  const double mean = sum / n;
  const double std = std::sqrt(sq / n - mean * mean);
  const double want = std::sqrt(2.0 / 128.0);
  CHECK(std == doctest::Approx(want).epsilon(0.10));

  Rng rng2(43);
  const Tensor2 u = he_normal_init(2, 50000, rng2);
  double squ = 0.0;
  for (double v : u.data) squ += v * v;
  CHECK(std::sqrt(squ / static_cast<double>(u.data.size())) ==
        doctest::Approx(1.0).epsilon(0.10));
}

TEST_CASE("he init is deterministic per rng seed") {
  Rng a(7), b(7), c(8);
  CHECK(he_normal_init(16, 16, a).data == he_normal_init(16, 16, b).data);
  Rng a2(7);
  CHECK(he_normal_init(16, 16, a2).data != he_normal_init(16, 16, c).data);
}

TEST_CASE("gcn_forward: isolated nodes with identity weight pass through") {
  // No edges: normalized adjacency is the identity.
  const NetGraph g = NetGraph::from_edges(3, {});
  const NormalizedAdjacency a = normalized_adjacency(g);
  Tensor2 h(3, 2);
  for (size_t i = 0; i < h.data.size(); ++i) h.data[i] = static_cast<double>(i);
  Tensor2 w(2, 2);
  w.at(0, 0) = 1.0;
  w.at(1, 1) = 1.0;
  const Tensor2 out = gcn_forward(a, h, w);
  CHECK(out.data == h.data);
}

TEST_CASE("gcn_forward: K3 with uniform rows stays uniform") {
  const NetGraph g = NetGraph::from_edges(
      3, std::vector<std::pair<uint32_t, uint32_t>>{{0, 1}, {1, 2}, {0, 2}});
  const NormalizedAdjacency a = normalized_adjacency(g);
  Tensor2 h(3, 4);
  for (uint32_t v = 0; v < 3; ++v)
    for (uint32_t c = 0; c < 4; ++c) h.at(v, c) = 0.5 + c;
  Rng rng(3);
  const Tensor2 w = he_normal_init(4, 5, rng);
  const Tensor2 out = gcn_forward(a, h, w);
  for (uint32_t c = 0; c < 5; ++c) {
    CHECK(out.at(0, c) == out.at(1, c));
    CHECK(out.at(1, c) == out.at(2, c));
  }
}

TEST_CASE("gcn_forward: P2 averaging matches the hand matrix") {
  const NetGraph g = NetGraph::from_edges(
      2, std::vector<std::pair<uint32_t, uint32_t>>{{0, 1}});
  const NormalizedAdjacency a = normalized_adjacency(g);
  Tensor2 h(2, 2);
  h.at(0, 0) = 1.0;
  h.at(1, 1) = 1.0;
  Tensor2 w(2, 2);
  w.at(0, 0) = 1.0;
  w.at(1, 1) = 1.0;
  const Tensor2 out = gcn_forward(a, h, w);
  for (double v : out.data) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("lstm_step: zero weights give zero states") {
  ModelConfig c = tiny_config();
  Rng rng(1);
  GrnnModel m = init_model(c, rng);
  m.lstm_wx.zero();
  m.lstm_wh.zero();
  m.lstm_b.zero();
  Tensor2 x(3, 5), h0(3, 4), c0(3, 4), h1, c1;
  for (size_t i = 0; i < x.data.size(); ++i) x.data[i] = 1.0 + double(i);
  lstm_step(m, x, h0, c0, h1, c1);
  for (double v : h1.data) CHECK(v == 0.0);
  for (double v : c1.data) CHECK(v == 0.0);
}

TEST_CASE("lstm_step: saturated forget gate carries the cell state") {
  ModelConfig c = tiny_config();
  Rng rng(2);
  GrnnModel m = init_model(c, rng);
  // Forget-gate bias 50: sigmoid saturates to 1, so c = c_prev + i*g.
  for (uint32_t k = 0; k < c.lstm_hidden; ++k)
    m.lstm_b.data[c.lstm_hidden + k] = 50.0;
  Tensor2 x(2, 5), h0(2, 4), c0(2, 4), h1, c1;
  Rng rx(3);
  for (double& v : x.data) v = rx.normal();
  for (double& v : c0.data) v = rx.normal();
  lstm_step(m, x, h0, c0, h1, c1);

  // Recompute i*g; the forget term must contribute exactly c_prev.
  Tensor2 gates, rec;
  matmul(x, m.lstm_wx, gates);
  matmul(h0, m.lstm_wh, rec);
  add_inplace(gates, rec);
  add_row_bias(gates, m.lstm_b);
  const uint32_t H = c.lstm_hidden;
  for (uint32_t r = 0; r < 2; ++r)
    for (uint32_t k = 0; k < H; ++k) {
      const double gi = 1.0 / (1.0 + std::exp(-gates.at(r, k)));
      const double gg = std::tanh(gates.at(r, 2 * H + k));
      CHECK(c1.at(r, k) ==
            doctest::Approx(c0.at(r, k) + gi * gg).epsilon(1e-9));
    }
}

TEST_CASE("grnn_forward is bitwise deterministic") {
  TinyInstance t = tiny_instance();
  Rng rng(11);
  const GrnnModel m = init_model(tiny_config(), rng);
  const auto feats = sample_features(t.sample);
  const auto a = grnn_forward(t.a, feats, m);
  const auto b = grnn_forward(t.a, feats, m);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].data == b[i].data);
}

TEST_CASE("two disjoint copies of a circuit predict identically") {
  // Message passing is local, so corresponding nodes of two disjoint
  // copies with the same stimulus get bitwise-identical logits.
  const Netlist nl = parse_bench(
      "INPUT(a)\nOUTPUT(y)\nm = NOT(a)\ny = NOT(m)\n"
      "INPUT(a2)\nOUTPUT(y2)\nm2 = NOT(a2)\ny2 = NOT(m2)\n");
  const NetGraph g = build_graph(nl);
  const NormalizedAdjacency a = normalized_adjacency(g);
  Seed s;
  s.width = 2;
  s.T = 1;
  s.bits = {1, 1};
  const Sample sample = build_sample(nl, g, s);
  Rng rng(5);
  const GrnnModel m = init_model(tiny_config(), rng);
  const auto logits = grnn_forward(a, sample_features(sample), m);
  const uint32_t ya = nl.find("y")->id, yb = nl.find("y2")->id;
  const uint32_t ma = nl.find("m")->id, mb = nl.find("m2")->id;
  for (uint32_t c = 0; c < 4; ++c) {
    CHECK(logits[0].at(ya, c) == logits[0].at(yb, c));
    CHECK(logits[0].at(ma, c) == logits[0].at(mb, c));
  }
}

TEST_CASE("loss_masked_ce analytic values") {
  // Perfect one-hot logits scaled by 50.
  std::vector<Tensor2> logits(1, Tensor2(2, 4));
  std::vector<uint8_t> labels{1, 2};
  std::vector<uint8_t> mask{1, 1};
  logits[0].at(0, 1) = 50.0;
  logits[0].at(1, 2) = 50.0;
  CHECK(loss_masked_ce(logits, labels, mask) < 1e-10);

  // Uniform logits: ln 4.
  std::vector<Tensor2> uniform(1, Tensor2(3, 4));
  std::vector<uint8_t> lab{0, 1, 2};
  std::vector<uint8_t> m3{1, 1, 1};
  CHECK(loss_masked_ce(uniform, lab, m3) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));

  // Single masked node equals its pointwise cross entropy.
  std::vector<Tensor2> one(1, Tensor2(2, 4));
  one[0].at(1, 0) = 2.0;
  one[0].at(1, 3) = -1.0;
  std::vector<uint8_t> lab2{0, 3};
  std::vector<uint8_t> m2{0, 1};
  double lse = 0.0;
  for (uint32_t c = 0; c < 4; ++c) lse += std::exp(one[0].at(1, c));
  const double want = std::log(lse) - one[0].at(1, 3);
  CHECK(loss_masked_ce(one, lab2, m2) == doctest::Approx(want).epsilon(1e-12));

  std::vector<uint8_t> none{0, 0};
  CHECK_THROWS_AS((void)loss_masked_ce(one, lab2, none), Error);
}

TEST_CASE("softmax rows sum to one within 1e-12") {
  Tensor2 logits(5, 4);
  Rng rng(9);
  for (double& v : logits.data) v = rng.normal() * 10.0;
  Tensor2 probs;
  softmax_rows(logits, probs);
  for (uint32_t r = 0; r < 5; ++r) {
    double s = 0.0;
    for (uint32_t c = 0; c < 4; ++c) s += probs.at(r, c);
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
}

TEST_CASE("rmsprop: zero gradient leaves parameters untouched") {
  ModelConfig c = tiny_config();
  Rng rng(4);
  GrnnModel m = init_model(c, rng);
  const std::vector<double> before = m.gcn_w[0].data;
  RmspropState state = make_rmsprop_state(m);
  std::vector<Tensor2> grads;
  for (const Tensor2* p : std::as_const(m).parameters())
    grads.emplace_back(p->rows, p->cols);
  rmsprop_step(m.parameters(), grads, state, c);
  CHECK(m.gcn_w[0].data == before);
}

TEST_CASE("rmsprop: first unit-gradient step moves by lr/sqrt(0.1+eps)") {
  ModelConfig c = tiny_config();
  Rng rng(4);
  GrnnModel m = init_model(c, rng);
  const double before = m.gcn_w[0].data[0];
  RmspropState state = make_rmsprop_state(m);
  std::vector<Tensor2> grads;
  for (const Tensor2* p : std::as_const(m).parameters())
    grads.emplace_back(p->rows, p->cols);
  grads[0].data[0] = 1.0;
  rmsprop_step(m.parameters(), grads, state, c);
  const double delta = m.gcn_w[0].data[0] - before;
  const double want = -c.learning_rate / std::sqrt(0.1 + c.rms_epsilon);
  CHECK(delta == doctest::Approx(want).epsilon(1e-12));
  CHECK(delta == doctest::Approx(-0.0031623).epsilon(1e-4));

  // A second identical step is smaller in magnitude.
  const double second_before = m.gcn_w[0].data[0];
  rmsprop_step(m.parameters(), grads, state, c);
  CHECK(std::abs(m.gcn_w[0].data[0] - second_before) < std::abs(delta));
}

TEST_CASE("gradient check: backprop matches central differences") {
  TinyInstance t = tiny_instance();
  Rng rng(1234);
  GrnnModel m = init_model(tiny_config(), rng);
  CHECK(max_relative_gradient_error(m, t.a, t.sample, t.mask) < 1e-4);
}

TEST_CASE("gradient check with attention aggregation") {
  TinyInstance t = tiny_instance();
  Rng rng(77);
  GrnnModel m = init_model(tiny_config(/*attention=*/true), rng);
  CHECK(max_relative_gradient_error(m, t.a, t.sample, t.mask) < 1e-4);
}

TEST_CASE("training-mode forward without dropout equals inference forward") {
  TinyInstance t = tiny_instance();
  Rng rng(21);
  for (bool attention : {false, true}) {
    GrnnModel m = init_model(tiny_config(attention), rng);
    const auto feats = sample_features(t.sample);
    const auto inference = grnn_forward(t.a, feats, m);
    const double inf_loss = loss_masked_ce(inference, t.sample.labels, t.mask);
    const GradientCheckResult r = loss_and_gradients(m, t.a, t.sample, t.mask);
    CHECK(r.loss == inf_loss);
  }
}

TEST_CASE("permutation equivariance is bitwise") {
  const std::vector<std::pair<uint32_t, uint32_t>> edges{
      {0, 1}, {1, 2}, {2, 3}, {3, 4}, {1, 3}};
  const NetGraph g = NetGraph::from_edges(5, edges);
  const NormalizedAdjacency a = normalized_adjacency(g);

  const std::array<uint32_t, 5> perm{3, 0, 4, 1, 2};  // node v -> perm[v]
  std::vector<std::pair<uint32_t, uint32_t>> pedges;
  for (auto [u, v] : edges) pedges.emplace_back(perm[u], perm[v]);
  const NetGraph pg = NetGraph::from_edges(5, pedges);
  const NormalizedAdjacency pa = normalized_adjacency(pg);

  Rng rng(31);
  const GrnnModel m = init_model(tiny_config(), rng);

  std::vector<Tensor2> feats(2, Tensor2(5, 17)), pfeats(2, Tensor2(5, 17));
  Rng fr(8);
  for (uint32_t t = 0; t < 2; ++t)
    for (uint32_t v = 0; v < 5; ++v) {
      const uint32_t iface = static_cast<uint32_t>(fr.below(3));
      const uint32_t gate = 3 + static_cast<uint32_t>(fr.below(10));
      const uint32_t logic = 13 + static_cast<uint32_t>(fr.below(4));
      feats[t].at(v, iface) = 1.0;
      feats[t].at(v, gate) = 1.0;
      feats[t].at(v, logic) = 1.0;
      for (uint32_t c : {iface, gate, logic}) pfeats[t].at(perm[v], c) = 1.0;
    }

  const auto logits = grnn_forward(a, feats, m);
  const auto plogits = grnn_forward(pa, pfeats, m);
  for (uint32_t t = 0; t < 2; ++t)
    for (uint32_t v = 0; v < 5; ++v)
      for (uint32_t c = 0; c < 4; ++c)
        CHECK(logits[t].at(v, c) == plogits[t].at(perm[v], c));
}

TEST_CASE("scaling the output head preserves argmax predictions") {
  TinyInstance t = tiny_instance();
  Rng rng(61);
  GrnnModel m = init_model(tiny_config(), rng);
  const auto feats = sample_features(t.sample);
  const auto before = grnn_forward(t.a, feats, m);
  for (double& v : m.out_w.data) v *= 3.7;
  for (double& v : m.out_b.data) v *= 3.7;
  const auto after = grnn_forward(t.a, feats, m);
  for (size_t ti = 0; ti < before.size(); ++ti)
    for (uint32_t v = 0; v < 3; ++v) {
      uint32_t arg_a = 0, arg_b = 0;
      for (uint32_t c = 1; c < 4; ++c) {
        if (before[ti].at(v, c) > before[ti].at(v, arg_a)) arg_a = c;
        if (after[ti].at(v, c) > after[ti].at(v, arg_b)) arg_b = c;
      }
      CHECK(arg_a == arg_b);
    }
}

TEST_CASE("checkpoint round-trips bit-exactly") {
  Rng rng(99);
  ModelConfig c = tiny_config(true);
  const GrnnModel m = init_model(c, rng);
  const std::string path = "/tmp/netfuzz_test_ckpt.bin";
  save_model(m, path);
  const GrnnModel back = load_model(path);
  const auto pa = std::as_const(m).parameters();
  const auto pb = std::as_const(back).parameters();
  REQUIRE(pa.size() == pb.size());
  for (size_t i = 0; i < pa.size(); ++i) CHECK(pa[i]->data == pb[i]->data);
  CHECK(back.config.gcn_dims == c.gcn_dims);
  CHECK(back.config.attention == c.attention);
}

TEST_CASE("training the inverter reaches 100% validation accuracy") {
  const Netlist nl = parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\n");
  const NetGraph g = build_graph(nl);
  const NormalizedAdjacency a = normalized_adjacency(g);
  std::vector<Sample> samples;
  for (const Seed& s : exhaustive_seeds(1)) samples.push_back(build_sample(nl, g, s));

  ModelConfig c;
  c.gcn_dims = {17, 16, 8};
  c.lstm_hidden = 8;
  c.max_epochs = 50;
  const TrainResult r = train(g, a, samples, samples, c, 3);
  bool hit = false;
  for (const EpochLog& e : r.log) hit |= e.val_accuracy == 100.0;
  CHECK(hit);
}

TEST_CASE("loss decreases over the first five epochs on c17") {
  const Netlist nl = parse_bench_file(data("c17.bench"));
  const NetGraph g = build_graph(nl);
  const NormalizedAdjacency a = normalized_adjacency(g);
  std::vector<Sample> samples;
  for (const Seed& s : exhaustive_seeds(5)) samples.push_back(build_sample(nl, g, s));

  ModelConfig c;
  c.gcn_dims = {17, 32, 16};
  c.lstm_hidden = 16;
  c.max_epochs = 5;
  c.patience = 5;
  const TrainResult r = train(g, a, samples, samples, c, 1);
  REQUIRE(r.log.size() == 5);
  CHECK(r.log.back().train_loss < r.log.front().train_loss);
}

TEST_CASE("evaluate: all-correct predictions score 100 everywhere") {
  const Netlist nl = parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\n");
  const NetGraph g = build_graph(nl);
  const NormalizedAdjacency a = normalized_adjacency(g);
  std::vector<Sample> samples;
  for (const Seed& s : exhaustive_seeds(1)) samples.push_back(build_sample(nl, g, s));
  ModelConfig c;
  c.gcn_dims = {17, 16, 8};
  c.lstm_hidden = 8;
  c.max_epochs = 80;
  const TrainResult r = train(g, a, samples, samples, c, 3);
  const Metrics m = evaluate(r.model, g, a, samples);
  REQUIRE(m.accuracy == 100.0);
  CHECK(m.macro_precision == 100.0);
  CHECK(m.macro_recall == 100.0);
  CHECK(m.macro_f1 == 100.0);
}

TEST_CASE("macro metrics: constant predictor on balanced binary labels") {
  // Confusion arithmetic per the macro definitions used by evaluate():
  // accuracy 50%, macro F1 33.3%, precision 25%, recall 50%.
  const double tp0 = 50, fp0 = 50, support0 = 50;
  const double prec0 = tp0 / (tp0 + fp0);
  const double rec0 = tp0 / support0;
  const double f10 = 2 * prec0 * rec0 / (prec0 + rec0);
  CHECK(100.0 * (f10 + 0.0) / 2.0 ==
        doctest::Approx(100.0 / 3.0).epsilon(1e-9));
  CHECK(100.0 * tp0 / 100.0 == doctest::Approx(50.0).epsilon(1e-9));
  CHECK(100.0 * (prec0 + 0.0) / 2.0 == doctest::Approx(25.0).epsilon(1e-9));
  CHECK(100.0 * (rec0 + 0.0) / 2.0 == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("evaluate is invariant under sample reordering") {
  const Netlist nl = parse_bench_file(data("c17.bench"));
  const NetGraph g = build_graph(nl);
  const NormalizedAdjacency a = normalized_adjacency(g);
  std::vector<Sample> samples;
  for (const Seed& s : exhaustive_seeds(5)) samples.push_back(build_sample(nl, g, s));
  Rng rng(15);
  const GrnnModel m = init_model(tiny_config(), rng);
  const Metrics before = evaluate(m, g, a, samples);
  std::reverse(samples.begin(), samples.end());
  const Metrics after = evaluate(m, g, a, samples);
  CHECK(before.accuracy == after.accuracy);
  CHECK(before.macro_f1 == after.macro_f1);
}

TEST_CASE("infer echoes input bits verbatim") {
  const Netlist nl = parse_bench_file(data("c17.bench"));
  const NetGraph g = build_graph(nl);
  const NormalizedAdjacency a = normalized_adjacency(g);
  Rng rng(17);
  const GrnnModel m = init_model(tiny_config(), rng);
  Seed s;
  s.width = 5;
  s.T = 3;
  Rng sr(18);
  for (uint32_t i = 0; i < 15; ++i) s.bits.push_back(sr.bit());
  const Prediction p = infer(m, g, a, nl, s);
  for (uint32_t t = 0; t < 3; ++t)
    for (uint32_t i = 0; i < 5; ++i) {
      const LogicValue want = s.bit(t, i) ? LogicValue::L1 : LogicValue::L0;
      CHECK(p.waveform.settled[t].values[nl.input_ids[i]] == want);
      CHECK(p.confidence[t][nl.input_ids[i]] == 1.0);
    }
}
