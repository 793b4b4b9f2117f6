#include "netfuzz/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "netfuzz/error.hpp"
#include "netfuzz/fuzzer.hpp"
#include "netfuzz/rng.hpp"
#include "netfuzz/sim.hpp"
#include "netfuzz/util.hpp"

namespace netfuzz {

std::vector<Tensor2> sample_features(const Sample& s) {
  const size_t nbits = size_t(s.T) * s.n * kFeatureWidth;
  const std::vector<uint8_t> bits = unpack_bits(s.feature_bits, nbits);
  std::vector<Tensor2> out;
  out.reserve(s.T);
  size_t pos = 0;
  for (uint32_t t = 0; t < s.T; ++t) {
    Tensor2 f(s.n, kFeatureWidth);
    for (double& v : f.data) v = bits[pos++] ? 1.0 : 0.0;
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<uint8_t> loss_mask(const NetGraph& g) {
  std::vector<uint8_t> mask(g.n);
  for (uint32_t v = 0; v < g.n; ++v)
    mask[v] = g.interface[v] != Interface::PrimaryInput;
  return mask;
}

namespace {

Sample sample_from_waveform(const NetGraph& g, const Seed& seed,
                            const Waveform& wf) {
  Sample s;
  s.seed = seed;
  s.T = seed.T;
  s.n = g.n;
  s.labels.resize(size_t(seed.T) * g.n);

  std::vector<uint8_t> bits;
  bits.reserve(size_t(seed.T) * g.n * kFeatureWidth);
  for (uint32_t t = 0; t < seed.T; ++t) {
    const Tensor2 f =
        encode_features(g, wf.settled[t].values, /*inputs_only=*/true);
    for (double v : f.data) bits.push_back(v != 0.0);
    for (uint32_t v = 0; v < g.n; ++v)
      s.labels[size_t(t) * g.n + v] =
          static_cast<uint8_t>(wf.settled[t].values[v]);
  }
  s.feature_bits = pack_bits(bits);
  return s;
}

}  // namespace

Sample build_sample(const Netlist& nl, const NetGraph& g, const Seed& seed) {
  return sample_from_waveform(
      g, seed, simulate_sequence(nl, seed, SimMode::ZeroDelay));
}

std::array<uint32_t, 3> split_sizes(uint32_t count,
                                    const std::array<double, 3>& ratios) {
  double sum = 0.0;
  for (double r : ratios) {
    if (r < 0.0)
      throw Error(Error::Kind::ConfigInvalid, "split ratios must be >= 0");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error(Error::Kind::ConfigInvalid, "split ratios must sum to 1");

  const uint32_t val = static_cast<uint32_t>(std::llround(ratios[1] * count));
  const uint32_t test = static_cast<uint32_t>(std::llround(ratios[2] * count));
  if (val + test > count)
    throw Error(Error::Kind::EmptySplit, "val/test splits exceed dataset size");
  const uint32_t train = count - val - test;
  const std::array<uint32_t, 3> sizes = {train, val, test};

  // A split with positive ratio may only be empty when the dataset is too
  // small to hand one sample to every positive-ratio split.
  uint32_t positive = 0;
  for (double r : ratios) positive += r > 0.0;
  if (count >= positive) {
    for (int i = 0; i < 3; ++i)
      if (ratios[i] > 0.0 && sizes[i] == 0) {
        std::ostringstream msg;
        msg << "split " << i << " has ratio " << ratios[i]
            << " but would receive 0 of " << count << " samples";
        throw Error(Error::Kind::EmptySplit, msg.str());
      }
  }
  return sizes;
}

SplitIndices split(uint32_t count, const std::array<double, 3>& ratios,
                   uint64_t rng_seed) {
  const std::array<uint32_t, 3> sizes = split_sizes(count, ratios);
  std::vector<uint32_t> order(count);
  for (uint32_t i = 0; i < count; ++i) order[i] = i;
  Rng rng(rng_seed);
  for (uint32_t i = count; i > 1; --i)
    std::swap(order[i - 1], order[rng.below(i)]);

  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + sizes[0]);
  out.val.assign(order.begin() + sizes[0],
                 order.begin() + sizes[0] + sizes[1]);
  out.test.assign(order.begin() + sizes[0] + sizes[1], order.end());
  return out;
}

std::vector<Seed> exhaustive_seeds(uint32_t width, uint32_t T) {
  const uint32_t bits = width * T;
  if (bits >= 24)
    throw Error(Error::Kind::ConfigInvalid,
                "exhaustive enumeration is capped at 24 bits");
  std::vector<Seed> out;
  out.reserve(1u << bits);
  for (uint32_t v = 0; v < (1u << bits); ++v) {
    Seed s;
    s.width = width;
    s.T = T;
    s.bits.resize(bits);
    for (uint32_t i = 0; i < bits; ++i) s.bits[i] = (v >> i) & 1;
    s.id = v;
    out.push_back(std::move(s));
  }
  return out;
}

Dataset generate_dataset(const Netlist& nl, uint32_t n_seeds, uint32_t T,
                         uint64_t rng_seed,
                         const std::array<double, 3>& split_ratios) {
  if (n_seeds < 1 || T < 1)
    throw Error(Error::Kind::ConfigInvalid, "n_seeds and T must be >= 1");

  const NetGraph g = build_graph(nl);
  const uint32_t width = static_cast<uint32_t>(nl.input_ids.size());
  Rng rng(rng_seed);
  CoverageMap map(nl.size());
  Corpus pool;

  Dataset d;
  d.samples.reserve(n_seeds);
  for (uint32_t i = 0; i < n_seeds; ++i) {
    Seed seed;
    // A quarter of the stream stays fresh; the rest mutates seeds that
    // widened toggle coverage, AFL style.
    if (pool.entries.empty() || rng.chance(0.25)) {
      seed = gen_seed(width, T, rng);
    } else {
      const CorpusEntry& parent =
          pool.entries[rng.below(pool.entries.size())];
      seed = mutate(parent.seed, pool, rng);
    }
    seed.id = i;

    const Waveform wf = simulate_sequence(nl, seed, SimMode::ZeroDelay);
    Sample s = sample_from_waveform(g, seed, wf);
    const CoverageDelta delta = coverage_update(map, wf);
    if (delta.interesting) {
      pool.entries.push_back(CorpusEntry{
          seed, static_cast<uint32_t>(delta.newly.size()), 0.0, i});
    }
    d.samples.push_back(std::move(s));
  }

  d.manifest.netlist_hash = fnv1a64_hex(write_bench(nl));
  d.manifest.rng_seed = rng_seed;
  d.manifest.n_seeds = n_seeds;
  d.manifest.T = T;
  d.manifest.width = width;
  d.manifest.split_ratios = split_ratios;
  d.manifest.split_sizes = split_sizes(n_seeds, split_ratios);
  d.manifest.toggle_coverage_percent = map.percent();
  return d;
}

std::string dataset_to_string(const Dataset& d) {
  nlohmann::json m;
  m["schema_version"] = 1;
  m["netlist_hash"] = d.manifest.netlist_hash;
  m["rng_seed"] = d.manifest.rng_seed;
  m["n_seeds"] = d.manifest.n_seeds;
  m["T"] = d.manifest.T;
  m["width"] = d.manifest.width;
  m["split_ratios"] = d.manifest.split_ratios;
  m["split_sizes"] = d.manifest.split_sizes;
  m["toggle_coverage"] = d.manifest.toggle_coverage_percent;

  std::ostringstream out;
  out << m.dump() << '\n';
  for (const Sample& s : d.samples) {
    out << seed_to_hex(s.seed) << ',' << s.T << ',' << s.n << ','
        << base64_encode(s.feature_bits) << ','
        << base64_encode(s.labels) << '\n';
  }
  return out.str();
}

Dataset dataset_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw Error(Error::Kind::BadFormat, "dataset file is empty");
  nlohmann::json m = nlohmann::json::parse(line, nullptr, false);
  if (m.is_discarded())
    throw Error(Error::Kind::BadFormat, "dataset manifest is not valid JSON");
  if (m.value("schema_version", 0) != 1)
    throw Error(Error::Kind::SchemaVersionMismatch,
                "unsupported dataset schema version");

  Dataset d;
  d.manifest.netlist_hash = m.at("netlist_hash").get<std::string>();
  d.manifest.rng_seed = m.at("rng_seed").get<uint64_t>();
  d.manifest.n_seeds = m.at("n_seeds").get<uint32_t>();
  d.manifest.T = m.at("T").get<uint32_t>();
  d.manifest.width = m.at("width").get<uint32_t>();
  d.manifest.split_ratios = m.at("split_ratios").get<std::array<double, 3>>();
  d.manifest.split_sizes = m.at("split_sizes").get<std::array<uint32_t, 3>>();
  d.manifest.toggle_coverage_percent = m.at("toggle_coverage").get<double>();

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string, 5> fields;
    size_t start = 0;
    for (int f = 0; f < 5; ++f) {
      size_t comma = f < 4 ? line.find(',', start) : line.size();
      if (comma == std::string::npos)
        throw Error(Error::Kind::BadFormat, "dataset record needs 5 fields");
      fields[static_cast<size_t>(f)] = line.substr(start, comma - start);
      start = comma + 1;
    }
    Sample s;
    s.T = static_cast<uint32_t>(std::stoul(fields[1]));
    s.n = static_cast<uint32_t>(std::stoul(fields[2]));
    s.feature_bits = base64_decode(fields[3]);
    s.labels = base64_decode(fields[4]);
    if (s.labels.size() != size_t(s.T) * s.n)
      throw Error(Error::Kind::BadFormat, "dataset record label size mismatch");
    s.seed = seed_from_hex(fields[0], d.manifest.width, s.T);
    d.samples.push_back(std::move(s));
  }
  return d;
}

void save_dataset(const Dataset& d, const std::string& path) {
  atomic_write_file(path, dataset_to_string(d));
}

Dataset load_dataset(const std::string& path) {
  return dataset_from_string(read_file(path));
}

}  // namespace netfuzz
