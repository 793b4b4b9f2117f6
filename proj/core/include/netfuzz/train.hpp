#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netfuzz/dataset.hpp"
#include "netfuzz/grnn.hpp"
#include "netfuzz/netgraph.hpp"
#include "netfuzz/sim.hpp"

namespace netfuzz {

struct Metrics {
  double accuracy = 0.0;         // percent
  double macro_precision = 0.0;  // percent, classes with support only
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::array<std::array<uint64_t, 4>, 4> confusion{};  // [label][predicted]
};

struct EpochLog {
  uint32_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  GrnnModel model;  // best-validation snapshot
  std::vector<EpochLog> log;
  uint32_t best_epoch = 0;
  double best_val_loss = 0.0;
};

/// Up to config.max_epochs of RMSprop with gradient accumulation in
/// config.batch_size sample chunks, early-stopped on validation loss.
/// Deterministic for a fixed rng_seed.
TrainResult train(const NetGraph& g, const NormalizedAdjacency& a,
                  std::span<const Sample> train_set,
                  std::span<const Sample> val_set, const ModelConfig& config,
                  uint64_t rng_seed);

/// Accuracy / macro precision / recall / F1 over masked node-timestep
/// pairs, macro-averaged over classes with support.
Metrics evaluate(const GrnnModel& m, const NetGraph& g,
                 const NormalizedAdjacency& a, std::span<const Sample> samples);

struct Prediction {
  Waveform waveform;                         // argmax classes as logic values
  std::vector<std::vector<double>> confidence;  // per timestep, per node
};

/// Run the model on a stimulus. Input nodes echo the seed bits verbatim;
/// every other node carries the predicted class.
Prediction infer(const GrnnModel& m, const NetGraph& g,
                 const NormalizedAdjacency& a, const Netlist& nl,
                 const Seed& seed);

std::string metrics_csv(std::span<const EpochLog> log);

// Gradient-check support: loss and full gradient set for one sample
// (training-mode forward with dropout disabled).
struct GradientCheckResult {
  double loss = 0.0;
  std::vector<Tensor2> grads;  // aligned with GrnnModel::parameters()
};
GradientCheckResult loss_and_gradients(const GrnnModel& m,
                                       const NormalizedAdjacency& a,
                                       const Sample& sample,
                                       std::span<const uint8_t> mask);

}  // namespace netfuzz
