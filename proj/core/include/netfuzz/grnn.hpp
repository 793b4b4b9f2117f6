#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netfuzz/netgraph.hpp"
#include "netfuzz/rng.hpp"
#include "netfuzz/tensor.hpp"

namespace netfuzz {

// Defaults follow the published recipe where it speaks (learning rate,
// dropout, epochs, He init, RMSprop); the layer-size chain and the
// remaining optimizer constants are documented artifact choices and every
// field can be overridden.
struct ModelConfig {
  std::vector<uint32_t> gcn_dims = {17, 128, 256, 512, 256, 256};
  uint32_t lstm_hidden = 256;
  uint32_t classes = 4;
  double dropout = 0.1;
  double learning_rate = 0.001;
  double rms_decay = 0.9;
  double rms_epsilon = 1e-8;
  uint32_t batch_size = 128;  // samples per gradient-accumulation chunk
  uint32_t max_epochs = 200;
  uint32_t patience = 20;      // early stop on validation loss
  double min_delta = 1e-4;     // improvement below this does not reset patience
  bool attention = false;     // single-head attention aggregation per layer
};

struct GrnnModel {
  ModelConfig config;
  std::vector<Tensor2> gcn_w;                 // per layer: in x out
  std::vector<Tensor2> attn_src, attn_dst;    // attention mode: 1 x out each
  Tensor2 lstm_wx;  // gcn_out x 4H, gate order [i f g o]
  Tensor2 lstm_wh;  // H x 4H
  Tensor2 lstm_b;   // 1 x 4H
  Tensor2 out_w;    // H x classes
  Tensor2 out_b;    // 1 x classes

  uint32_t gcn_output_dim() const { return config.gcn_dims.back(); }
  std::vector<Tensor2*> parameters();
  std::vector<const Tensor2*> parameters() const;
  std::vector<std::string> parameter_names() const;
};

/// Entries drawn from N(0, 2/fan_in).
Tensor2 he_normal_init(uint32_t fan_in, uint32_t fan_out, Rng& rng);

GrnnModel init_model(const ModelConfig& config, Rng& rng);

/// One graph-convolution layer: relu(Â H W). In attention mode Â is
/// replaced by a per-row softmax over learned edge scores.
Tensor2 gcn_forward(const NormalizedAdjacency& a, const Tensor2& h,
                    const Tensor2& w);

/// One LSTM step shared across all nodes. x is n x input, h/c are
/// n x hidden; standard sigmoid/tanh gate equations.
void lstm_step(const GrnnModel& m, const Tensor2& x, const Tensor2& h_prev,
               const Tensor2& c_prev, Tensor2& h_out, Tensor2& c_out);

/// Full forward pass over a feature sequence (one n x 17 matrix per
/// timestep). Dropout is inactive; use Trainer for the training-mode pass.
/// Returns one n x classes logit matrix per timestep.
std::vector<Tensor2> grnn_forward(const NormalizedAdjacency& a,
                                  std::span<const Tensor2> features,
                                  const GrnnModel& m);

/// Mean softmax cross-entropy over masked node/timestep pairs.
/// `labels` is timestep-major (t * n + node); mask is per node.
double loss_masked_ce(std::span<const Tensor2> logits,
                      std::span<const uint8_t> labels,
                      std::span<const uint8_t> mask);

void softmax_rows(const Tensor2& logits, Tensor2& probs);

struct RmspropState {
  std::vector<Tensor2> acc;  // squared-gradient accumulators per parameter
};

RmspropState make_rmsprop_state(const GrnnModel& m);

/// acc <- decay*acc + (1-decay)*g^2 ; p <- p - lr*g/sqrt(acc+eps)
void rmsprop_step(std::vector<Tensor2*> params,
                  std::span<const Tensor2> grads, RmspropState& state,
                  const ModelConfig& config);

}  // namespace netfuzz
