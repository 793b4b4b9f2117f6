#include <doctest.h>

#include <set>

#include "netfuzz/dataset.hpp"
#include "netfuzz/error.hpp"
#include "netfuzz/fuzzer.hpp"
#include "netfuzz/sim.hpp"
#include "support/oracles.hpp"

using namespace netfuzz;

namespace {

std::string data(const char* name) {
  return std::string(NETFUZZ_DATA_DIR "/") + name;
}

}  // namespace

TEST_CASE("inverter sample: label of the output node is class 0") {
  const Netlist nl = parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\n");
  const NetGraph g = build_graph(nl);
  Seed s;
  s.width = 1;
  s.T = 1;
  s.bits = {1};
  const Sample sample = build_sample(nl, g, s);
  CHECK(sample.labels[nl.find("y")->id] == 0);  // NOT(1) = 0
  CHECK(sample.labels[nl.find("a")->id] == 1);
}

TEST_CASE("c17 exhaustive seeds give 32 distinct label matrices") {
  const Netlist nl = parse_bench_file(data("c17.bench"));
  const NetGraph g = build_graph(nl);
  std::set<std::vector<uint8_t>> label_sets;
  for (const Seed& s : exhaustive_seeds(5)) {
    label_sets.insert(build_sample(nl, g, s).labels);
  }
  CHECK(label_sets.size() == 32);
}

TEST_CASE("label fidelity: re-simulating the seed reproduces the labels") {
  const Netlist nl = parse_bench_file(data("s27.bench"));
  const NetGraph g = build_graph(nl);
  const Dataset d = generate_dataset(nl, 10, 4, 99);
  for (const Sample& s : d.samples) {
    const Waveform wf = simulate_sequence(nl, s.seed);
    for (uint32_t t = 0; t < s.T; ++t)
      for (uint32_t v = 0; v < s.n; ++v)
        CHECK(s.labels[t * s.n + v] ==
              static_cast<uint8_t>(wf.settled[t].values[v]));
  }
}

TEST_CASE("input-leak freedom: features reveal inputs only") {
  const Netlist nl = parse_bench_file(data("s27.bench"));
  const NetGraph g = build_graph(nl);
  const Dataset d = generate_dataset(nl, 5, 3, 123);
  constexpr uint32_t logic_base = kInterfaceFeatures + kGateFeatures;
  for (const Sample& s : d.samples) {
    const std::vector<Tensor2> feats = sample_features(s);
    for (uint32_t t = 0; t < s.T; ++t)
      for (uint32_t v = 0; v < s.n; ++v) {
        if (g.interface[v] == Interface::PrimaryInput) continue;
        // Non-input logic segment must be the X one-hot.
        CHECK(feats[t].at(v, logic_base + 2) == 1.0);
        CHECK(feats[t].at(v, logic_base + 0) == 0.0);
        CHECK(feats[t].at(v, logic_base + 1) == 0.0);
        CHECK(feats[t].at(v, logic_base + 3) == 0.0);
      }
  }
}

TEST_CASE("dataset generation is byte-identical for identical parameters") {
  const Netlist nl = parse_bench_file(data("s27.bench"));
  const Dataset a = generate_dataset(nl, 20, 4, 7);
  const Dataset b = generate_dataset(nl, 20, 4, 7);
  CHECK(dataset_to_string(a) == dataset_to_string(b));
  const Dataset c = generate_dataset(nl, 20, 4, 8);
  CHECK(dataset_to_string(a) != dataset_to_string(c));
}

TEST_CASE("dataset file round-trips bit-exactly") {
  const Netlist nl = parse_bench_file(data("c17.bench"));
  const Dataset d = generate_dataset(nl, 12, 2, 5);
  const std::string text = dataset_to_string(d);
  const Dataset back = dataset_from_string(text);
  CHECK(dataset_to_string(back) == text);
  REQUIRE(back.samples.size() == d.samples.size());
  for (size_t i = 0; i < d.samples.size(); ++i) {
    CHECK(back.samples[i].seed.bits == d.samples[i].seed.bits);
    CHECK(back.samples[i].labels == d.samples[i].labels);
    CHECK(back.samples[i].feature_bits == d.samples[i].feature_bits);
  }
}

TEST_CASE("split sizes follow rounded ratios with remainder to train") {
  CHECK(split_sizes(10, {0.8, 0.1, 0.1}) == std::array<uint32_t, 3>{8, 1, 1});
  CHECK(split_sizes(3, {0.34, 0.33, 0.33}) == std::array<uint32_t, 3>{1, 1, 1});
  CHECK(split_sizes(32, {0.875, 0.125, 0.0}) ==
        std::array<uint32_t, 3>{28, 4, 0});
}

TEST_CASE("split determinism and disjointness") {
  const SplitIndices a = split(20, {0.8, 0.1, 0.1}, 33);
  const SplitIndices b = split(20, {0.8, 0.1, 0.1}, 33);
  CHECK(a.train == b.train);
  CHECK(a.val == b.val);
  CHECK(a.test == b.test);
  std::set<uint32_t> all;
  for (uint32_t i : a.train) all.insert(i);
  for (uint32_t i : a.val) all.insert(i);
  for (uint32_t i : a.test) all.insert(i);
  CHECK(all.size() == 20);
  const SplitIndices c = split(20, {0.8, 0.1, 0.1}, 34);
  CHECK(a.train != c.train);
}

TEST_CASE("empty-split detection") {
  CHECK_THROWS_AS((void)split_sizes(10, {0.96, 0.02, 0.02}), Error);
  try {
    (void)split_sizes(10, {0.96, 0.02, 0.02});
  } catch (const Error& e) {
    CHECK(e.kind() == Error::Kind::EmptySplit);
  }
  // Too small to serve three positive ratios: allowed, no throw.
  const auto sizes = split_sizes(2, {0.34, 0.33, 0.33});
  CHECK(sizes[0] + sizes[1] + sizes[2] == 2);
  // Ratios must sum to one.
  CHECK_THROWS_AS((void)split_sizes(10, {0.5, 0.2, 0.2}), Error);
}

TEST_CASE("coverage-guided generation beats or matches pure random on s27") {
  const Netlist nl = parse_bench_file(data("s27.bench"));
  int guided_wins = 0, ties = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const Dataset d = generate_dataset(nl, 100, 8, seed);
    // Paired pure-random arm: same PRNG seed, no mutation feedback.
    Rng rng(seed);
    CoverageMap map(nl.size());
    for (int i = 0; i < 100; ++i) {
      const Seed s = gen_seed(4, 8, rng);
      (void)coverage_update(map, simulate_sequence(nl, s));
    }
    if (d.manifest.toggle_coverage_percent > map.percent()) ++guided_wins;
    if (d.manifest.toggle_coverage_percent == map.percent()) ++ties;
  }
  // Measured: s27 is small enough that both strategies saturate all
  // reachable transitions within 100 seeds of 8 cycles, so the guided run
  // ties random on every PRNG seed rather than strictly beating it.
  CHECK(guided_wins + ties >= 15);
}

TEST_CASE("manifest records the generation parameters") {
  const Netlist nl = parse_bench_file(data("c17.bench"));
  const Dataset d = generate_dataset(nl, 10, 2, 77, {0.8, 0.1, 0.1});
  CHECK(d.manifest.n_seeds == 10);
  CHECK(d.manifest.T == 2);
  CHECK(d.manifest.width == 5);
  CHECK(d.manifest.rng_seed == 77);
  CHECK(d.manifest.split_sizes == std::array<uint32_t, 3>{8, 1, 1});
  CHECK(d.manifest.toggle_coverage_percent > 0.0);
  CHECK(d.manifest.netlist_hash.size() == 16);
}
