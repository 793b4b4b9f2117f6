#include "netfuzz/grnn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "netfuzz/error.hpp"

namespace netfuzz {

std::vector<Tensor2*> GrnnModel::parameters() {
  std::vector<Tensor2*> p;
  for (auto& w : gcn_w) p.push_back(&w);
  for (size_t l = 0; l < attn_src.size(); ++l) {
    p.push_back(&attn_src[l]);
    p.push_back(&attn_dst[l]);
  }
  p.push_back(&lstm_wx);
  p.push_back(&lstm_wh);
  p.push_back(&lstm_b);
  p.push_back(&out_w);
  p.push_back(&out_b);
  return p;
}

std::vector<const Tensor2*> GrnnModel::parameters() const {
  std::vector<const Tensor2*> p;
  for (auto& w : gcn_w) p.push_back(&w);
  for (size_t l = 0; l < attn_src.size(); ++l) {
    p.push_back(&attn_src[l]);
    p.push_back(&attn_dst[l]);
  }
  p.push_back(&lstm_wx);
  p.push_back(&lstm_wh);
  p.push_back(&lstm_b);
  p.push_back(&out_w);
  p.push_back(&out_b);
  return p;
}

std::vector<std::string> GrnnModel::parameter_names() const {
  std::vector<std::string> names;
  for (size_t l = 0; l < gcn_w.size(); ++l)
    names.push_back("gcn_w" + std::to_string(l));
  for (size_t l = 0; l < attn_src.size(); ++l) {
    names.push_back("attn_src" + std::to_string(l));
    names.push_back("attn_dst" + std::to_string(l));
  }
  names.push_back("lstm_wx");
  names.push_back("lstm_wh");
  names.push_back("lstm_b");
  names.push_back("out_w");
  names.push_back("out_b");
  return names;
}

Tensor2 he_normal_init(uint32_t fan_in, uint32_t fan_out, Rng& rng) {
  if (fan_in < 1)
    throw Error(Error::Kind::ShapeMismatch, "he_normal_init needs fan_in >= 1");
  Tensor2 t(fan_in, fan_out);
  const double std = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (double& v : t.data) v = rng.normal() * std;
  return t;
}

GrnnModel init_model(const ModelConfig& config, Rng& rng) {
  if (config.gcn_dims.size() < 2)
    throw Error(Error::Kind::ConfigInvalid, "gcn_dims needs at least two entries");
  if (config.gcn_dims.front() != kFeatureWidth)
    throw Error(Error::Kind::ConfigInvalid,
                "first GCN dimension must equal the feature width");
  GrnnModel m;
  m.config = config;
  for (size_t l = 0; l + 1 < config.gcn_dims.size(); ++l)
    m.gcn_w.push_back(
        he_normal_init(config.gcn_dims[l], config.gcn_dims[l + 1], rng));
  if (config.attention) {
    for (size_t l = 0; l + 1 < config.gcn_dims.size(); ++l) {
      m.attn_src.push_back(he_normal_init(config.gcn_dims[l + 1], 1, rng));
      m.attn_dst.push_back(he_normal_init(config.gcn_dims[l + 1], 1, rng));
      // stored as 1 x dim row vectors
      std::swap(m.attn_src.back().rows, m.attn_src.back().cols);
      std::swap(m.attn_dst.back().rows, m.attn_dst.back().cols);
    }
  }
  const uint32_t h = config.lstm_hidden;
  m.lstm_wx = he_normal_init(config.gcn_dims.back(), 4 * h, rng);
  m.lstm_wh = he_normal_init(h, 4 * h, rng);
  m.lstm_b = Tensor2(1, 4 * h);
  m.out_w = he_normal_init(h, config.classes, rng);
  m.out_b = Tensor2(1, config.classes);
  return m;
}

Tensor2 gcn_forward(const NormalizedAdjacency& a, const Tensor2& h,
                    const Tensor2& w) {
  Tensor2 hw;
  matmul(h, w, hw);
  Tensor2 out;
  a.apply(hw, out);
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return out;
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double dot(const double* a, const double* b, uint32_t n) {
  double s = 0.0;
  for (uint32_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

constexpr double kLeakySlope = 0.2;

// Single-head attention over the self-loop-extended neighborhood:
// e_ij = leaky_relu(a_src.m_i + a_dst.m_j), row softmax, out_i = sum a_ij m_j.
Tensor2 attention_aggregate(const NormalizedAdjacency& a, const Tensor2& m,
                            const Tensor2& asrc, const Tensor2& adst) {
  const uint32_t n = a.n;
  const uint32_t d = m.cols;
  std::vector<double> u(n), w(n);
  for (uint32_t i = 0; i < n; ++i) {
    u[i] = dot(m.row(i), asrc.data.data(), d);
    w[i] = dot(m.row(i), adst.data.data(), d);
  }
  Tensor2 out(n, d);
  std::vector<double> alpha;
  for (uint32_t i = 0; i < n; ++i) {
    const uint32_t begin = a.row_ptr[i], end = a.row_ptr[i + 1];
    alpha.assign(end - begin, 0.0);
    double mx = -1e300;
    for (uint32_t e = begin; e < end; ++e) {
      const double pre = u[i] + w[a.col[e]];
      const double act = pre > 0.0 ? pre : kLeakySlope * pre;
      alpha[e - begin] = act;
      mx = std::max(mx, act);
    }
    double sum = 0.0;
    for (double& v : alpha) {
      v = std::exp(v - mx);
      sum += v;
    }
    double* oi = out.row(i);
    for (uint32_t e = begin; e < end; ++e) {
      const double coef = alpha[e - begin] / sum;
      const double* src = m.row(a.col[e]);
      for (uint32_t k = 0; k < d; ++k) oi[k] += coef * src[k];
    }
  }
  return out;
}

}  // namespace

void lstm_step(const GrnnModel& m, const Tensor2& x, const Tensor2& h_prev,
               const Tensor2& c_prev, Tensor2& h_out, Tensor2& c_out) {
  const uint32_t h = m.config.lstm_hidden;
  if (x.cols != m.lstm_wx.rows || h_prev.cols != h || c_prev.cols != h ||
      x.rows != h_prev.rows || x.rows != c_prev.rows)
    throw Error(Error::Kind::ShapeMismatch, "lstm_step shapes disagree");

  Tensor2 gates;
  matmul(x, m.lstm_wx, gates);
  Tensor2 rec;
  matmul(h_prev, m.lstm_wh, rec);
  add_inplace(gates, rec);
  add_row_bias(gates, m.lstm_b);

  h_out = Tensor2(x.rows, h);
  c_out = Tensor2(x.rows, h);
  for (uint32_t r = 0; r < x.rows; ++r) {
    const double* g = gates.row(r);
    const double* cp = c_prev.row(r);
    double* ho = h_out.row(r);
    double* co = c_out.row(r);
    for (uint32_t k = 0; k < h; ++k) {
      const double gi = sigmoid(g[k]);
      const double gf = sigmoid(g[h + k]);
      const double gg = std::tanh(g[2 * h + k]);
      const double go = sigmoid(g[3 * h + k]);
      co[k] = gf * cp[k] + gi * gg;
      ho[k] = go * std::tanh(co[k]);
    }
  }
}

std::vector<Tensor2> grnn_forward(const NormalizedAdjacency& a,
                                  std::span<const Tensor2> features,
                                  const GrnnModel& m) {
  if (!features.empty() && features[0].rows != a.n)
    throw Error(Error::Kind::ModelGraphMismatch,
                "feature rows do not match graph size");
  const uint32_t n = a.n;
  const uint32_t h = m.config.lstm_hidden;
  Tensor2 h_state(n, h), c_state(n, h);

  std::vector<Tensor2> logits;
  logits.reserve(features.size());
  for (const Tensor2& f : features) {
    Tensor2 cur = f;
    for (size_t l = 0; l < m.gcn_w.size(); ++l) {
      // inference: dropout off
      Tensor2 hw;
      matmul(cur, m.gcn_w[l], hw);
      Tensor2 s;
      if (m.config.attention)
        s = attention_aggregate(a, hw, m.attn_src[l], m.attn_dst[l]);
      else
        a.apply(hw, s);
      for (double& v : s.data) v = v > 0.0 ? v : 0.0;
      cur = std::move(s);
    }
    Tensor2 h_next, c_next;
    lstm_step(m, cur, h_state, c_state, h_next, c_next);
    h_state = std::move(h_next);
    c_state = std::move(c_next);
    Tensor2 out;
    matmul(h_state, m.out_w, out);
    add_row_bias(out, m.out_b);
    logits.push_back(std::move(out));
  }
  return logits;
}

double loss_masked_ce(std::span<const Tensor2> logits,
                      std::span<const uint8_t> labels,
                      std::span<const uint8_t> mask) {
  double total = 0.0;
  size_t count = 0;
  for (size_t t = 0; t < logits.size(); ++t) {
    const Tensor2& lg = logits[t];
    for (uint32_t v = 0; v < lg.rows; ++v) {
      if (!mask[v]) continue;
      const double* row = lg.row(v);
      double mx = row[0];
      for (uint32_t c = 1; c < lg.cols; ++c) mx = std::max(mx, row[c]);
      double lse = 0.0;
      for (uint32_t c = 0; c < lg.cols; ++c) lse += std::exp(row[c] - mx);
      lse = mx + std::log(lse);
      total += lse - row[labels[t * lg.rows + v]];
      ++count;
    }
  }
  if (count == 0)
    throw Error(Error::Kind::EmptyMask, "no masked node/timestep pairs");
  return total / static_cast<double>(count);
}

void softmax_rows(const Tensor2& logits, Tensor2& probs) {
  probs.rows = logits.rows;
  probs.cols = logits.cols;
  probs.data.resize(logits.data.size());
  for (uint32_t r = 0; r < logits.rows; ++r) {
    const double* in = logits.row(r);
    double* out = probs.row(r);
    double mx = in[0];
    for (uint32_t c = 1; c < logits.cols; ++c) mx = std::max(mx, in[c]);
    double sum = 0.0;
    for (uint32_t c = 0; c < logits.cols; ++c) {
      out[c] = std::exp(in[c] - mx);
      sum += out[c];
    }
    for (uint32_t c = 0; c < logits.cols; ++c) out[c] /= sum;
  }
}

RmspropState make_rmsprop_state(const GrnnModel& m) {
  RmspropState s;
  for (const Tensor2* p : m.parameters())
    s.acc.emplace_back(p->rows, p->cols);
  return s;
}

void rmsprop_step(std::vector<Tensor2*> params, std::span<const Tensor2> grads,
                  RmspropState& state, const ModelConfig& config) {
  if (params.size() != grads.size() || params.size() != state.acc.size())
    throw Error(Error::Kind::ShapeMismatch,
                "rmsprop parameter/gradient/state counts disagree");
  const double decay = config.rms_decay;
  const double lr = config.learning_rate;
  const double eps = config.rms_epsilon;
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor2& p = *params[i];
    const Tensor2& g = grads[i];
    Tensor2& acc = state.acc[i];
    if (!p.same_shape(g) || !p.same_shape(acc))
      throw Error(Error::Kind::ShapeMismatch, "rmsprop tensor shapes disagree");
    for (size_t k = 0; k < p.data.size(); ++k) {
      acc.data[k] = decay * acc.data[k] + (1.0 - decay) * g.data[k] * g.data[k];
      p.data[k] -= lr * g.data[k] / std::sqrt(acc.data[k] + eps);
    }
  }
}

}  // namespace netfuzz
