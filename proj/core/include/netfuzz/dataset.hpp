#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "netfuzz/netgraph.hpp"
#include "netfuzz/netlist.hpp"
#include "netfuzz/seed.hpp"
#include "netfuzz/tensor.hpp"

namespace netfuzz {

// One supervised example: the stimulus, the packed masked feature
// sequence (inputs revealed, everything else X) and the simulator's
// settled class labels for every node at every timestep.
struct Sample {
  Seed seed;
  uint32_t T = 0;
  uint32_t n = 0;
  std::vector<uint8_t> feature_bits;  // T*n*17 bits packed LSB-first
  std::vector<uint8_t> labels;        // T*n class ids, timestep-major
};

/// Expand the packed bits into one n x 17 matrix per timestep.
std::vector<Tensor2> sample_features(const Sample& s);

/// Nodes whose logic value the model must predict (all non-inputs).
std::vector<uint8_t> loss_mask(const NetGraph& g);

struct DatasetManifest {
  std::string netlist_hash;
  uint64_t rng_seed = 0;
  uint32_t n_seeds = 0;
  uint32_t T = 0;
  uint32_t width = 0;  // primary-input count of the generating netlist
  std::array<double, 3> split_ratios = {0.8, 0.1, 0.1};
  std::array<uint32_t, 3> split_sizes = {0, 0, 0};
  double toggle_coverage_percent = 0.0;
};

struct Dataset {
  std::vector<Sample> samples;
  DatasetManifest manifest;
};

/// Simulate one seed and record features + labels.
Sample build_sample(const Netlist& nl, const NetGraph& g, const Seed& seed);

/// Coverage-guided generation: seeds come from the fuzzer's generator,
/// interleaved with mutations of seeds that increased toggle coverage.
/// Bit-identical for identical (netlist, n_seeds, T, rng_seed).
Dataset generate_dataset(const Netlist& nl, uint32_t n_seeds, uint32_t T,
                         uint64_t rng_seed,
                         const std::array<double, 3>& split_ratios = {0.8, 0.1,
                                                                      0.1});

/// All 2^width single-cycle (or T-cycle constant-width) stimuli, counting
/// order. width * T must stay below 24 bits.
std::vector<Seed> exhaustive_seeds(uint32_t width, uint32_t T = 1);

struct SplitIndices {
  std::vector<uint32_t> train, val, test;
};

/// Deterministic shuffle + partition. Sizes are llround(ratio * count)
/// for val/test with the remainder going to train.
SplitIndices split(uint32_t count, const std::array<double, 3>& ratios,
                   uint64_t rng_seed);

std::array<uint32_t, 3> split_sizes(uint32_t count,
                                    const std::array<double, 3>& ratios);

std::string dataset_to_string(const Dataset& d);
Dataset dataset_from_string(const std::string& text);
void save_dataset(const Dataset& d, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace netfuzz
