#include "netfuzz/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "netfuzz/error.hpp"

namespace netfuzz {

namespace {

constexpr double kLeakySlope = 0.2;

inline double dot(const double* a, const double* b, uint32_t n) {
  double s = 0.0;
  for (uint32_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

struct LayerTrace {
  Tensor2 input;   // activation entering the layer
  Tensor2 hw;      // input * W
  Tensor2 pre;     // aggregated, before relu
  std::vector<uint8_t> keep;   // dropout keep mask; empty when inactive
  std::vector<double> alpha;   // attention coefficients per CSR entry
  std::vector<double> escore;  // attention scores before leaky relu
  std::vector<double> u, w;    // attention row/col score parts
};

struct StepTrace {
  std::vector<LayerTrace> layers;
  Tensor2 x;                   // LSTM input
  Tensor2 gi, gf, gg, go;      // gate activations
  Tensor2 c, tanh_c, h;
  Tensor2 h_prev, c_prev;
  Tensor2 logits;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Owns gradient buffers aligned with GrnnModel::parameters() order and
// runs the training-mode forward/backward for one sample at a time.
class Trainer {
public:
  Trainer(const GrnnModel& model, const NormalizedAdjacency& a)
      : m_(model), a_(a) {
    for (const Tensor2* p : m_.parameters())
      grads_.emplace_back(p->rows, p->cols);
  }

  std::vector<Tensor2>& grads() { return grads_; }

  void zero_grads() {
    for (Tensor2& g : grads_) g.zero();
  }

  void scale_grads(double s) {
    for (Tensor2& g : grads_)
      for (double& v : g.data) v *= s;
  }

  // Training-mode forward. Dropout fires only when rng is non-null and the
  // configured rate is positive.
  double forward(std::span<const Tensor2> features,
                 std::span<const uint8_t> labels,
                 std::span<const uint8_t> mask, Rng* rng) {
    const uint32_t n = a_.n;
    const uint32_t hidden = m_.config.lstm_hidden;
    const double p = rng ? m_.config.dropout : 0.0;
    steps_.clear();
    steps_.resize(features.size());
    mask_.assign(mask.begin(), mask.end());
    labels_.assign(labels.begin(), labels.end());

    Tensor2 h_state(n, hidden), c_state(n, hidden);
    for (size_t t = 0; t < features.size(); ++t) {
      StepTrace& st = steps_[t];
      st.layers.resize(m_.gcn_w.size());
      Tensor2 cur = features[t];
      for (size_t l = 0; l < m_.gcn_w.size(); ++l) {
        LayerTrace& lt = st.layers[l];
        lt.input = cur;
        matmul(cur, m_.gcn_w[l], lt.hw);
        if (m_.config.attention)
          attention_forward(l, lt);
        else
          a_.apply(lt.hw, lt.pre);
        Tensor2 post = lt.pre;
        for (double& v : post.data) v = v > 0.0 ? v : 0.0;
        if (p > 0.0) {
          lt.keep.resize(post.data.size());
          const double scale = 1.0 / (1.0 - p);
          for (size_t i = 0; i < post.data.size(); ++i) {
            lt.keep[i] = rng->uniform() >= p;
            post.data[i] = lt.keep[i] ? post.data[i] * scale : 0.0;
          }
        }
        cur = std::move(post);
      }
      st.x = std::move(cur);

      // LSTM step with stored gate activations.
      st.h_prev = h_state;
      st.c_prev = c_state;
      Tensor2 gates;
      matmul(st.x, m_.lstm_wx, gates);
      Tensor2 rec;
      matmul(h_state, m_.lstm_wh, rec);
      add_inplace(gates, rec);
      add_row_bias(gates, m_.lstm_b);
      st.gi = Tensor2(n, hidden);
      st.gf = Tensor2(n, hidden);
      st.gg = Tensor2(n, hidden);
      st.go = Tensor2(n, hidden);
      st.c = Tensor2(n, hidden);
      st.tanh_c = Tensor2(n, hidden);
      st.h = Tensor2(n, hidden);
      for (uint32_t r = 0; r < n; ++r) {
        const double* g = gates.row(r);
        const double* cp = st.c_prev.row(r);
        for (uint32_t k = 0; k < hidden; ++k) {
          const double gi = sigmoid(g[k]);
          const double gf = sigmoid(g[hidden + k]);
          const double gg = std::tanh(g[2 * hidden + k]);
          const double go = sigmoid(g[3 * hidden + k]);
          st.gi.row(r)[k] = gi;
          st.gf.row(r)[k] = gf;
          st.gg.row(r)[k] = gg;
          st.go.row(r)[k] = go;
          const double c = gf * cp[k] + gi * gg;
          st.c.row(r)[k] = c;
          const double tc = std::tanh(c);
          st.tanh_c.row(r)[k] = tc;
          st.h.row(r)[k] = go * tc;
        }
      }
      h_state = st.h;
      c_state = st.c;

      matmul(st.h, m_.out_w, st.logits);
      add_row_bias(st.logits, m_.out_b);
    }

    // Masked mean cross-entropy.
    masked_count_ = 0;
    double total = 0.0;
    for (size_t t = 0; t < steps_.size(); ++t) {
      const Tensor2& lg = steps_[t].logits;
      for (uint32_t v = 0; v < n; ++v) {
        if (!mask_[v]) continue;
        const double* row = lg.row(v);
        double mx = row[0];
        for (uint32_t c = 1; c < lg.cols; ++c) mx = std::max(mx, row[c]);
        double lse = 0.0;
        for (uint32_t c = 0; c < lg.cols; ++c) lse += std::exp(row[c] - mx);
        total += mx + std::log(lse) - row[labels_[t * n + v]];
        ++masked_count_;
      }
    }
    if (masked_count_ == 0)
      throw Error(Error::Kind::EmptyMask, "no masked node/timestep pairs");
    return total / static_cast<double>(masked_count_);
  }

  // Accumulates gradients of the forward()'s mean loss into grads().
  void backward() {
    const uint32_t n = a_.n;
    const uint32_t hidden = m_.config.lstm_hidden;
    const size_t L = m_.gcn_w.size();
    const double inv_count = 1.0 / static_cast<double>(masked_count_);

    Tensor2 dh_carry(n, hidden), dc_carry(n, hidden);
    for (size_t ti = steps_.size(); ti-- > 0;) {
      StepTrace& st = steps_[ti];

      // d logits: softmax - onehot on masked rows, scaled by 1/count.
      Tensor2 dlogits(n, st.logits.cols);
      for (uint32_t v = 0; v < n; ++v) {
        if (!mask_[v]) continue;
        const double* row = st.logits.row(v);
        double* out = dlogits.row(v);
        double mx = row[0];
        for (uint32_t c = 1; c < st.logits.cols; ++c) mx = std::max(mx, row[c]);
        double sum = 0.0;
        for (uint32_t c = 0; c < st.logits.cols; ++c) {
          out[c] = std::exp(row[c] - mx);
          sum += out[c];
        }
        for (uint32_t c = 0; c < st.logits.cols; ++c) out[c] = out[c] / sum * inv_count;
        out[labels_[ti * n + v]] -= inv_count;
      }

      // Output projection.
      Tensor2 tmp;
      matmul_at_b(st.h, dlogits, tmp);
      add_inplace(*gout_w(), tmp);
      add_col_sums(dlogits, *gout_b());
      Tensor2 dh;
      matmul_a_bt(dlogits, m_.out_w, dh);
      add_inplace(dh, dh_carry);

      // LSTM gates.
      Tensor2 dgates(n, 4 * hidden);
      Tensor2 dc(n, hidden);
      for (uint32_t r = 0; r < n; ++r) {
        const double* dhr = dh.row(r);
        const double* dccar = dc_carry.row(r);
        double* dcr = dc.row(r);
        double* dg = dgates.row(r);
        const double* gi = st.gi.row(r);
        const double* gf = st.gf.row(r);
        const double* gg = st.gg.row(r);
        const double* go = st.go.row(r);
        const double* tc = st.tanh_c.row(r);
        const double* cp = st.c_prev.row(r);
        for (uint32_t k = 0; k < hidden; ++k) {
          const double dck = dccar[k] + dhr[k] * go[k] * (1.0 - tc[k] * tc[k]);
          dcr[k] = dck;
          const double dgo = dhr[k] * tc[k];
          const double dgi = dck * gg[k];
          const double dgf = dck * cp[k];
          const double dgg = dck * gi[k];
          dg[k] = dgi * gi[k] * (1.0 - gi[k]);
          dg[hidden + k] = dgf * gf[k] * (1.0 - gf[k]);
          dg[2 * hidden + k] = dgg * (1.0 - gg[k] * gg[k]);
          dg[3 * hidden + k] = dgo * go[k] * (1.0 - go[k]);
        }
      }
      // dc_carry for t-1.
      dc_carry = Tensor2(n, hidden);
      for (uint32_t r = 0; r < n; ++r)
        for (uint32_t k = 0; k < hidden; ++k)
          dc_carry.row(r)[k] = dc.row(r)[k] * st.gf.row(r)[k];

      matmul_at_b(st.x, dgates, tmp);
      add_inplace(*glstm_wx(), tmp);
      matmul_at_b(st.h_prev, dgates, tmp);
      add_inplace(*glstm_wh(), tmp);
      add_col_sums(dgates, *glstm_b());
      Tensor2 dx;
      matmul_a_bt(dgates, m_.lstm_wx, dx);
      matmul_a_bt(dgates, m_.lstm_wh, dh_carry);

      // GCN stack, top down.
      Tensor2 dcur = std::move(dx);
      for (size_t l = L; l-- > 0;) {
        LayerTrace& lt = st.layers[l];
        if (!lt.keep.empty()) {
          const double scale = 1.0 / (1.0 - m_.config.dropout);
          for (size_t i = 0; i < dcur.data.size(); ++i)
            dcur.data[i] = lt.keep[i] ? dcur.data[i] * scale : 0.0;
        }
        for (size_t i = 0; i < dcur.data.size(); ++i)
          if (lt.pre.data[i] <= 0.0) dcur.data[i] = 0.0;

        Tensor2 dhw;
        if (m_.config.attention) {
          attention_backward(l, lt, dcur, dhw);
        } else {
          a_.apply(dcur, dhw);  // symmetric
        }
        matmul_at_b(lt.input, dhw, tmp);
        add_inplace(*ggcn_w(l), tmp);
        if (l > 0) matmul_a_bt(dhw, m_.gcn_w[l], dcur);
      }
    }
  }

private:
  void attention_forward(size_t l, LayerTrace& lt) {
    const uint32_t n = a_.n;
    const uint32_t d = lt.hw.cols;
    const Tensor2& asrc = m_.attn_src[l];
    const Tensor2& adst = m_.attn_dst[l];
    lt.u.resize(n);
    lt.w.resize(n);
    for (uint32_t i = 0; i < n; ++i) {
      lt.u[i] = dot(lt.hw.row(i), asrc.data.data(), d);
      lt.w[i] = dot(lt.hw.row(i), adst.data.data(), d);
    }
    lt.escore.assign(a_.col.size(), 0.0);
    lt.alpha.assign(a_.col.size(), 0.0);
    lt.pre = Tensor2(n, d);
    for (uint32_t i = 0; i < n; ++i) {
      const uint32_t begin = a_.row_ptr[i], end = a_.row_ptr[i + 1];
      double mx = -1e300;
      for (uint32_t e = begin; e < end; ++e) {
        const double pre = lt.u[i] + lt.w[a_.col[e]];
        lt.escore[e] = pre;
        const double act = pre > 0.0 ? pre : kLeakySlope * pre;
        lt.alpha[e] = act;
        mx = std::max(mx, act);
      }
      double sum = 0.0;
      for (uint32_t e = begin; e < end; ++e) {
        lt.alpha[e] = std::exp(lt.alpha[e] - mx);
        sum += lt.alpha[e];
      }
      double* oi = lt.pre.row(i);
      for (uint32_t e = begin; e < end; ++e) {
        lt.alpha[e] /= sum;
        const double* src = lt.hw.row(a_.col[e]);
        for (uint32_t k = 0; k < d; ++k) oi[k] += lt.alpha[e] * src[k];
      }
    }
  }

  void attention_backward(size_t l, const LayerTrace& lt, const Tensor2& ds,
                          Tensor2& dhw) {
    const uint32_t n = a_.n;
    const uint32_t d = lt.hw.cols;
    const Tensor2& asrc = m_.attn_src[l];
    const Tensor2& adst = m_.attn_dst[l];
    dhw = Tensor2(n, d);
    std::vector<double> du(n, 0.0), dw(n, 0.0);
    std::vector<double> dalpha(a_.col.size(), 0.0);
    for (uint32_t i = 0; i < n; ++i) {
      const uint32_t begin = a_.row_ptr[i], end = a_.row_ptr[i + 1];
      const double* dsi = ds.row(i);
      double inner = 0.0;  // sum_k alpha_k dalpha_k for softmax backward
      for (uint32_t e = begin; e < end; ++e) {
        dalpha[e] = dot(dsi, lt.hw.row(a_.col[e]), d);
        double* dmj = dhw.row(a_.col[e]);
        for (uint32_t k = 0; k < d; ++k) dmj[k] += lt.alpha[e] * dsi[k];
        inner += lt.alpha[e] * dalpha[e];
      }
      for (uint32_t e = begin; e < end; ++e) {
        double de = lt.alpha[e] * (dalpha[e] - inner);
        if (lt.escore[e] <= 0.0) de *= kLeakySlope;
        du[i] += de;
        dw[a_.col[e]] += de;
      }
    }
    Tensor2& gsrc = *gattn_src(l);
    Tensor2& gdst = *gattn_dst(l);
    for (uint32_t i = 0; i < n; ++i) {
      const double* mi = lt.hw.row(i);
      double* dmi = dhw.row(i);
      for (uint32_t k = 0; k < d; ++k) {
        dmi[k] += du[i] * asrc.data[k] + dw[i] * adst.data[k];
        gsrc.data[k] += du[i] * mi[k];
        gdst.data[k] += dw[i] * mi[k];
      }
    }
  }

  static void add_col_sums(const Tensor2& src, Tensor2& dst) {
    for (uint32_t r = 0; r < src.rows; ++r) {
      const double* row = src.row(r);
      for (uint32_t c = 0; c < src.cols; ++c) dst.data[c] += row[c];
    }
  }

  // Gradient buffer accessors, following parameters() order.
  Tensor2* ggcn_w(size_t l) { return &grads_[l]; }
  Tensor2* gattn_src(size_t l) { return &grads_[m_.gcn_w.size() + 2 * l]; }
  Tensor2* gattn_dst(size_t l) { return &grads_[m_.gcn_w.size() + 2 * l + 1]; }
  size_t lstm_base() const {
    return m_.gcn_w.size() + 2 * m_.attn_src.size();
  }
  Tensor2* glstm_wx() { return &grads_[lstm_base()]; }
  Tensor2* glstm_wh() { return &grads_[lstm_base() + 1]; }
  Tensor2* glstm_b() { return &grads_[lstm_base() + 2]; }
  Tensor2* gout_w() { return &grads_[lstm_base() + 3]; }
  Tensor2* gout_b() { return &grads_[lstm_base() + 4]; }

  const GrnnModel& m_;
  const NormalizedAdjacency& a_;
  std::vector<Tensor2> grads_;
  std::vector<StepTrace> steps_;
  std::vector<uint8_t> mask_;
  std::vector<uint8_t> labels_;
  size_t masked_count_ = 0;
};

Metrics metrics_from_confusion(
    const std::array<std::array<uint64_t, 4>, 4>& confusion) {
  Metrics m;
  m.confusion = confusion;
  uint64_t total = 0, correct = 0;
  for (int c = 0; c < 4; ++c)
    for (int p = 0; p < 4; ++p) {
      total += confusion[c][p];
      if (c == p) correct += confusion[c][p];
    }
  if (total == 0) return m;
  m.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(total);

  double psum = 0.0, rsum = 0.0, fsum = 0.0;
  int classes = 0;
  for (int c = 0; c < 4; ++c) {
    uint64_t support = 0, predicted = 0;
    for (int k = 0; k < 4; ++k) {
      support += confusion[c][k];
      predicted += confusion[k][c];
    }
    if (support == 0) continue;  // empty classes stay out of the macro average
    ++classes;
    const double tp = static_cast<double>(confusion[c][c]);
    const double prec = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
    const double rec = tp / static_cast<double>(support);
    psum += prec;
    rsum += rec;
    fsum += (prec + rec) == 0.0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
  }
  if (classes > 0) {
    m.macro_precision = 100.0 * psum / classes;
    m.macro_recall = 100.0 * rsum / classes;
    m.macro_f1 = 100.0 * fsum / classes;
  }
  return m;
}

}  // namespace

TrainResult train(const NetGraph& g, const NormalizedAdjacency& a,
                  std::span<const Sample> train_set,
                  std::span<const Sample> val_set, const ModelConfig& config,
                  uint64_t rng_seed) {
  if (train_set.empty() || val_set.empty())
    throw Error(Error::Kind::EmptySplit,
                "training requires non-empty train and validation sets");

  Rng rng(rng_seed);
  GrnnModel model = init_model(config, rng);
  RmspropState rms = make_rmsprop_state(model);
  Trainer trainer(model, a);
  const std::vector<uint8_t> mask = loss_mask(g);

  std::vector<std::vector<Tensor2>> train_feats, val_feats;
  for (const Sample& s : train_set) train_feats.push_back(sample_features(s));
  for (const Sample& s : val_set) val_feats.push_back(sample_features(s));

  TrainResult result;
  GrnnModel best = model;
  double best_val = std::numeric_limits<double>::infinity();
  uint32_t best_epoch = 0;
  uint32_t since_best = 0;

  std::vector<uint32_t> order(train_set.size());
  for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;

  const uint32_t chunk_size = std::max<uint32_t>(1, config.batch_size);
  for (uint32_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    // Fisher-Yates with our own rng, for replayable epochs.
    for (uint32_t i = static_cast<uint32_t>(order.size()); i > 1; --i)
      std::swap(order[i - 1], order[rng.below(i)]);

    double train_loss = 0.0;
    for (size_t base = 0; base < order.size(); base += chunk_size) {
      const size_t end = std::min(order.size(), base + chunk_size);
      trainer.zero_grads();
      for (size_t k = base; k < end; ++k) {
        const Sample& s = train_set[order[k]];
        const double loss =
            trainer.forward(train_feats[order[k]], s.labels, mask, &rng);
        if (!std::isfinite(loss))
          throw Error(Error::Kind::DivergenceDetected,
                      "non-finite training loss at epoch " +
                          std::to_string(epoch));
        train_loss += loss;
        trainer.backward();
      }
      trainer.scale_grads(1.0 / static_cast<double>(end - base));
      rmsprop_step(model.parameters(), trainer.grads(), rms, config);
    }
    train_loss /= static_cast<double>(train_set.size());

    // Validation with dropout off.
    double val_loss = 0.0;
    uint64_t correct = 0, total = 0;
    for (size_t i = 0; i < val_set.size(); ++i) {
      const std::vector<Tensor2> logits = grnn_forward(a, val_feats[i], model);
      val_loss += loss_masked_ce(logits, val_set[i].labels, mask);
      for (size_t t = 0; t < logits.size(); ++t)
        for (uint32_t v = 0; v < g.n; ++v) {
          if (!mask[v]) continue;
          const double* row = logits[t].row(v);
          uint32_t arg = 0;
          for (uint32_t c = 1; c < logits[t].cols; ++c)
            if (row[c] > row[arg]) arg = c;
          correct += arg == val_set[i].labels[t * g.n + v];
          ++total;
        }
    }
    val_loss /= static_cast<double>(val_set.size());
    if (!std::isfinite(val_loss))
      throw Error(Error::Kind::DivergenceDetected,
                  "non-finite validation loss at epoch " + std::to_string(epoch));
    const double val_acc =
        total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total);

    result.log.push_back(EpochLog{epoch, train_loss, val_loss, val_acc});

    // Snapshot any strict improvement; only improvements above min_delta
    // keep the patience window open.
    if (val_loss < best_val) {
      const bool significant = best_val - val_loss > config.min_delta;
      best_val = val_loss;
      best = model;
      best_epoch = epoch;
      if (significant)
        since_best = 0;
      else if (++since_best >= config.patience)
        break;
    } else if (++since_best >= config.patience) {
      break;
    }
  }

  result.model = std::move(best);
  result.best_epoch = best_epoch;
  result.best_val_loss = best_val;
  return result;
}

Metrics evaluate(const GrnnModel& m, const NetGraph& g,
                 const NormalizedAdjacency& a,
                 std::span<const Sample> samples) {
  const std::vector<uint8_t> mask = loss_mask(g);
  std::array<std::array<uint64_t, 4>, 4> confusion{};
  for (const Sample& s : samples) {
    const std::vector<Tensor2> feats = sample_features(s);
    const std::vector<Tensor2> logits = grnn_forward(a, feats, m);
    for (size_t t = 0; t < logits.size(); ++t)
      for (uint32_t v = 0; v < g.n; ++v) {
        if (!mask[v]) continue;
        const double* row = logits[t].row(v);
        uint32_t arg = 0;
        for (uint32_t c = 1; c < logits[t].cols; ++c)
          if (row[c] > row[arg]) arg = c;
        confusion[s.labels[t * g.n + v]][arg] += 1;
      }
  }
  return metrics_from_confusion(confusion);
}

Prediction infer(const GrnnModel& m, const NetGraph& g,
                 const NormalizedAdjacency& a, const Netlist& nl,
                 const Seed& seed) {
  if (g.n != nl.size() || a.n != g.n)
    throw Error(Error::Kind::ModelGraphMismatch,
                "graph, adjacency and netlist disagree");
  if (seed.width != nl.input_ids.size())
    throw Error(Error::Kind::SeedWidthMismatch,
                "seed width does not match netlist inputs");

  std::vector<Tensor2> feats;
  feats.reserve(seed.T);
  std::vector<LogicValue> values(g.n, LogicValue::LX);
  for (uint32_t t = 0; t < seed.T; ++t) {
    for (uint32_t i = 0; i < seed.width; ++i)
      values[nl.input_ids[i]] =
          seed.bit(t, i) ? LogicValue::L1 : LogicValue::L0;
    feats.push_back(encode_features(g, values, /*inputs_only=*/true));
  }
  const std::vector<Tensor2> logits = grnn_forward(a, feats, m);

  Prediction pred;
  pred.waveform.timesteps = seed.T;
  pred.waveform.toggles.rise.assign(g.n, 0);
  pred.waveform.toggles.fall.assign(g.n, 0);
  pred.confidence.resize(seed.T);
  Tensor2 probs;
  for (uint32_t t = 0; t < seed.T; ++t) {
    SimState st;
    st.values.resize(g.n);
    softmax_rows(logits[t], probs);
    pred.confidence[t].resize(g.n);
    for (uint32_t v = 0; v < g.n; ++v) {
      const double* row = probs.row(v);
      uint32_t arg = 0;
      for (uint32_t c = 1; c < probs.cols; ++c)
        if (row[c] > row[arg]) arg = c;
      st.values[v] = static_cast<LogicValue>(arg);
      pred.confidence[t][v] = row[arg];
    }
    // Inputs are known, never predicted.
    for (uint32_t i = 0; i < seed.width; ++i) {
      st.values[nl.input_ids[i]] =
          seed.bit(t, i) ? LogicValue::L1 : LogicValue::L0;
      pred.confidence[t][nl.input_ids[i]] = 1.0;
    }
    if (t > 0) {
      const auto& prev = pred.waveform.settled.back().values;
      for (uint32_t v = 0; v < g.n; ++v) {
        if (prev[v] == LogicValue::L0 && st.values[v] == LogicValue::L1)
          ++pred.waveform.toggles.rise[v];
        else if (prev[v] == LogicValue::L1 && st.values[v] == LogicValue::L0)
          ++pred.waveform.toggles.fall[v];
      }
    }
    pred.waveform.settled.push_back(std::move(st));
  }
  return pred;
}

std::string metrics_csv(std::span<const EpochLog> log) {
  std::ostringstream out;
  out << "epoch,train_loss,val_loss,val_acc\n";
  out.precision(17);
  for (const EpochLog& e : log)
    out << e.epoch << ',' << e.train_loss << ',' << e.val_loss << ','
        << e.val_accuracy << '\n';
  return out.str();
}

GradientCheckResult loss_and_gradients(const GrnnModel& m,
                                       const NormalizedAdjacency& a,
                                       const Sample& sample,
                                       std::span<const uint8_t> mask) {
  Trainer trainer(m, a);
  const std::vector<Tensor2> feats = sample_features(sample);
  GradientCheckResult r;
  r.loss = trainer.forward(feats, sample.labels, mask, nullptr);
  trainer.backward();
  r.grads = trainer.grads();
  return r;
}

}  // namespace netfuzz
