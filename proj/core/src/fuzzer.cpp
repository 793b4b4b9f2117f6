#include "netfuzz/fuzzer.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include <nlohmann/json.hpp>

#include "netfuzz/error.hpp"
#include "netfuzz/grnn.hpp"
#include "netfuzz/train.hpp"
#include "netfuzz/util.hpp"

namespace netfuzz {

const char* mut_op_name(MutOp op) {
  switch (op) {
    case MutOp::Flip1: return "flip1";
    case MutOp::Flip2: return "flip2";
    case MutOp::Flip4: return "flip4";
    case MutOp::CycleRandomize: return "cycle-randomize";
    case MutOp::Arith: return "arith";
    case MutOp::CopyWithin: return "copy-within";
    case MutOp::Splice: return "splice";
    case MutOp::Havoc: return "havoc";
  }
  return "?";
}

Seed gen_seed(uint32_t width, uint32_t T, Rng& rng) {
  Seed s;
  s.width = width;
  s.T = T;
  s.bits.resize(size_t(width) * T);
  for (auto& b : s.bits) b = rng.bit();
  s.op = "generated";
  return s;
}

namespace {

void flip_bits(Seed& s, uint32_t count, Rng& rng) {
  const uint32_t total = static_cast<uint32_t>(s.bits.size());
  const uint32_t start = static_cast<uint32_t>(rng.below(total));
  for (uint32_t i = start; i < std::min(start + count, total); ++i)
    s.bits[i] ^= 1;
}

void cycle_randomize(Seed& s, Rng& rng) {
  const uint32_t t = static_cast<uint32_t>(rng.below(s.T));
  for (uint32_t i = 0; i < s.width; ++i)
    s.set_bit(t, i, rng.bit());
}

void arith_window(Seed& s, Rng& rng) {
  const uint32_t t = static_cast<uint32_t>(rng.below(s.T));
  const uint32_t w = std::min<uint32_t>(8, s.width);
  const uint32_t off =
      s.width > w ? static_cast<uint32_t>(rng.below(s.width - w + 1)) : 0;
  uint32_t v = 0;
  for (uint32_t i = 0; i < w; ++i) v |= uint32_t(s.bit(t, off + i)) << i;
  const uint32_t k = 1 + static_cast<uint32_t>(rng.below(16));
  const uint32_t mask = (w == 32 ? ~0u : (1u << w) - 1);
  v = rng.bit() ? (v + k) & mask : (v - k) & mask;
  for (uint32_t i = 0; i < w; ++i)
    s.set_bit(t, off + i, (v >> i) & 1);
}

void copy_within(Seed& s, Rng& rng) {
  const uint32_t src = static_cast<uint32_t>(rng.below(s.T));
  const uint32_t dst = static_cast<uint32_t>(rng.below(s.T));
  for (uint32_t i = 0; i < s.width; ++i)
    s.set_bit(dst, i, s.bit(src, i));
}

// Crossover at a cycle boundary; falls back to a single flip when no
// shape-compatible partner exists.
bool splice_with(Seed& s, const Corpus& corpus, Rng& rng) {
  if (corpus.entries.empty() || s.T < 2) return false;
  const CorpusEntry& other =
      corpus.entries[rng.below(corpus.entries.size())];
  if (other.seed.width != s.width || other.seed.T != s.T) return false;
  const uint32_t cut = 1 + static_cast<uint32_t>(rng.below(s.T - 1));
  for (uint32_t t = cut; t < s.T; ++t)
    for (uint32_t i = 0; i < s.width; ++i)
      s.set_bit(t, i, other.seed.bit(t, i));
  return true;
}

void apply_basic(Seed& s, MutOp op, const Corpus& corpus, Rng& rng) {
  switch (op) {
    case MutOp::Flip1: flip_bits(s, 1, rng); break;
    case MutOp::Flip2: flip_bits(s, 2, rng); break;
    case MutOp::Flip4: flip_bits(s, 4, rng); break;
    case MutOp::CycleRandomize: cycle_randomize(s, rng); break;
    case MutOp::Arith: arith_window(s, rng); break;
    case MutOp::CopyWithin: copy_within(s, rng); break;
    case MutOp::Splice:
      if (!splice_with(s, corpus, rng)) flip_bits(s, 1, rng);
      break;
    case MutOp::Havoc: break;  // handled by caller
  }
}

}  // namespace

Seed mutate(const Seed& seed, const Corpus& corpus, Rng& rng,
            const MutationWeights& weights) {
  Seed out = seed;
  out.parent = static_cast<int64_t>(seed.id);

  double pick = rng.uniform();
  int op = 0;
  for (; op < kMutOpCount - 1; ++op) {
    pick -= weights.p[static_cast<size_t>(op)];
    if (pick < 0) break;
  }
  const MutOp chosen = static_cast<MutOp>(op);
  out.op = mut_op_name(chosen);

  if (chosen == MutOp::Havoc) {
    const uint32_t stacked = 2 + static_cast<uint32_t>(rng.below(7));  // 2..8
    for (uint32_t i = 0; i < stacked; ++i)
      apply_basic(out, static_cast<MutOp>(rng.below(kMutOpCount - 1)), corpus,
                  rng);
  } else {
    apply_basic(out, chosen, corpus, rng);
  }
  return out;
}

double CoverageMap::percent() const {
  if (n == 0) return 0.0;
  size_t covered = 0;
  for (uint32_t v = 0; v < n; ++v) covered += rise[v] + fall[v];
  return 100.0 * static_cast<double>(covered) / static_cast<double>(2 * n);
}

CoverageDelta coverage_update(CoverageMap& map, const Waveform& wf) {
  if (wf.toggles.rise.size() != map.n)
    throw Error(Error::Kind::GraphMismatch,
                "waveform net count does not match coverage map");
  CoverageDelta delta;
  for (uint32_t v = 0; v < map.n; ++v) {
    if (!map.rise[v] && wf.toggles.rise[v] > 0) {
      map.rise[v] = 1;
      delta.newly.emplace_back(v, true);
    }
    if (!map.fall[v] && wf.toggles.fall[v] > 0) {
      map.fall[v] = 1;
      delta.newly.emplace_back(v, false);
    }
  }
  ++map.executed;
  delta.interesting = !delta.newly.empty();
  return delta;
}

double coverage_score(const CoverageMap& map,
                      std::span<const double> centrality) {
  if (centrality.size() != map.n)
    throw Error(Error::Kind::GraphMismatch,
                "centrality length does not match coverage map");
  double score = 0.0;
  for (uint32_t v = 0; v < map.n; ++v) {
    if (map.rise[v]) score += centrality[v] / 2.0;
    if (map.fall[v]) score += centrality[v] / 2.0;
  }
  return score;
}

namespace {

std::vector<double> metric_values(const NetGraph& g, CentralityChoice c,
                                  int jobs) {
  switch (c) {
    case CentralityChoice::Degree: return degree_centrality(g);
    case CentralityChoice::Betweenness: return betweenness_centrality(g, jobs);
    case CentralityChoice::Closeness: return closeness_centrality(g);
    case CentralityChoice::Eigenvector: return eigenvector_centrality(g).values;
  }
  return {};
}

const char* centrality_choice_name(CentralityChoice c) {
  switch (c) {
    case CentralityChoice::Degree: return "degree";
    case CentralityChoice::Betweenness: return "betweenness";
    case CentralityChoice::Closeness: return "closeness";
    case CentralityChoice::Eigenvector: return "eigenvector";
  }
  return "?";
}

std::string fuzz_config_digest(const Netlist& dut, const GoldenModel& golden,
                               bool has_model, const FuzzConfig& c) {
  nlohmann::json j;
  j["budget"] = c.budget;
  j["T"] = c.T;
  j["epsilon"] = c.epsilon;
  j["guided"] = c.guided;
  j["compare_mode"] = c.compare_mode == CompareMode::Strict ? "strict" : "lenient";
  j["observe"] = c.observe == ObserveSet::AllNets ? "all" : "outputs";
  j["sim_mode"] = c.sim_mode == SimMode::UnitDelay ? "unit" : "zero";
  j["score_metric"] = centrality_choice_name(c.score_metric);
  j["weights"] = c.weights.p;
  j["dut_hash"] = dut.content_hash();
  j["golden_hash"] = golden.reference.content_hash();
  j["model"] = has_model;
  return fnv1a64_hex(j.dump());
}

// Weighted by coverage-score gain at admission and by recency: newer
// entries count up to twice as much as the oldest.
size_t pick_parent(const Corpus& corpus, Rng& rng) {
  const size_t n = corpus.entries.size();
  std::vector<double> cum(n);
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double recency = 1.0 + static_cast<double>(i) / static_cast<double>(n);
    total += (corpus.entries[i].score_gain + 1e-3) * recency;
    cum[i] = total;
  }
  const double pick = rng.uniform() * total;
  return static_cast<size_t>(
      std::lower_bound(cum.begin(), cum.end(), pick) - cum.begin());
}

}  // namespace

std::vector<uint32_t> GoldenModel::observed_nets() const {
  std::vector<uint32_t> ids;
  if (observe == ObserveSet::AllNets) {
    ids.resize(reference.size());
    for (uint32_t i = 0; i < reference.size(); ++i) ids[i] = i;
  } else {
    ids = reference.output_ids;
  }
  return ids;
}

Waveform GoldenModel::run(const Seed& seed) const {
  return simulate_sequence(reference, seed, SimMode::ZeroDelay);
}

FuzzReport fuzz_loop(const Netlist& dut, const GoldenModel& golden,
                     const GrnnModel* model, const FuzzConfig& config,
                     uint64_t prng_seed) {
  if (config.budget == 0)
    throw Error(Error::Kind::BudgetZero, "fuzz budget must be positive");
  if (golden.reference.size() != dut.size() ||
      golden.reference.input_ids != dut.input_ids)
    throw Error(Error::Kind::ShapeMismatch,
                "golden reference and DUT netlists disagree in topology");

  const auto t0 = std::chrono::steady_clock::now();
  const uint32_t width = static_cast<uint32_t>(dut.input_ids.size());
  const NetGraph graph = build_graph(dut);
  const NormalizedAdjacency adjacency =
      model ? normalized_adjacency(graph) : NormalizedAdjacency{};
  if (model && model->config.gcn_dims.front() != kFeatureWidth)
    throw Error(Error::Kind::ModelGraphMismatch,
                "model input width is not the feature width");

  const std::vector<double> weights =
      metric_values(graph, config.score_metric, config.jobs);
  const std::vector<uint32_t> observed = golden.observed_nets();

  FuzzReport report;
  report.prng_seed = prng_seed;
  report.config_digest =
      fuzz_config_digest(dut, golden, model != nullptr, config);
  report.coverage_series.reserve(config.budget);

  Rng rng(prng_seed);
  CoverageMap map(dut.size());
  Corpus corpus;
  double score = 0.0;

  for (uint64_t i = 0; i < config.budget; ++i) {
    Seed seed;
    const bool fresh = !config.guided || corpus.entries.empty() ||
                       rng.chance(config.epsilon);
    if (fresh) {
      seed = gen_seed(width, config.T, rng);
    } else {
      const size_t parent = pick_parent(corpus, rng);
      seed = mutate(corpus.entries[parent].seed, corpus, rng, config.weights);
    }
    seed.id = i;

    Waveform dut_wf = simulate_sequence(dut, seed, config.sim_mode);
    const Waveform golden_wf = golden.run(seed);

    std::vector<Discrepancy> found =
        compare(dut, golden_wf, dut_wf, observed, config.compare_mode);
    if (config.sim_mode == SimMode::UnitDelay) {
      for (uint32_t t = 0; t < dut_wf.timesteps; ++t) {
        std::vector<Discrepancy> glitches = detect_transients(
            dut, dut_wf.micro[t], dut_wf.settled[t], observed, t);
        found.insert(found.end(), glitches.begin(), glitches.end());
      }
    }
    if (model) {
      const Prediction pred = infer(*model, graph, adjacency, dut, seed);
      std::vector<Discrepancy> mism = compare(
          dut, dut_wf, pred.waveform, observed, CompareMode::Strict);
      for (Discrepancy& d : mism) d.channel = Channel::ModelVsSimulator;
      found.insert(found.end(), mism.begin(), mism.end());
    }
    for (Discrepancy& d : found) d.seed_id = i;
    if (!found.empty()) report.trigger_seeds.emplace_back(i, seed_to_hex(seed));
    report.discrepancies.insert(report.discrepancies.end(), found.begin(),
                                found.end());

    const CoverageDelta delta = coverage_update(map, dut_wf);
    report.coverage_series.push_back(map.percent());
    if (config.guided && delta.interesting) {
      const double new_score = coverage_score(map, weights);
      corpus.entries.push_back(CorpusEntry{
          seed, static_cast<uint32_t>(delta.newly.size()), new_score - score, i});
      corpus.log.push_back(Corpus::AuditEvent{
          seed.id, static_cast<uint32_t>(delta.newly.size()),
          Corpus::AuditEvent::Action::Admitted});
      score = new_score;
    }
  }

  report.executed = config.budget;
  report.corpus = corpus.entries;
  report.audit_log = corpus.log;
  report.final_coverage_percent = map.percent();
  report.coverage_score_total = coverage_score(map, weights);
  report.wall_clock_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();
  return report;
}

std::string fuzz_report_json(const FuzzReport& r) {
  nlohmann::json j;
  j["executed"] = r.executed;
  j["prng_seed"] = r.prng_seed;
  j["config_digest"] = r.config_digest;
  j["coverage_series"] = r.coverage_series;
  j["final_coverage_percent"] = r.final_coverage_percent;
  j["coverage_score"] = r.coverage_score_total;
  j["wall_clock_ms"] = r.wall_clock_ms;

  auto& corpus = j["corpus"] = nlohmann::json::array();
  for (const CorpusEntry& e : r.corpus) {
    corpus.push_back({{"id", e.seed.id},
                      {"hex", seed_to_hex(e.seed)},
                      {"T", e.seed.T},
                      {"width", e.seed.width},
                      {"parent", e.seed.parent},
                      {"op", e.seed.op},
                      {"delta", e.delta_count},
                      {"score_gain", e.score_gain},
                      {"admitted_at", e.admitted_at}});
  }
  auto& audit = j["audit_log"] = nlohmann::json::array();
  for (const auto& ev : r.audit_log)
    audit.push_back({{"seed_id", ev.seed_id},
                     {"delta", ev.delta_count},
                     {"action", "admitted"}});
  auto& trig = j["trigger_seeds"] = nlohmann::json::array();
  for (const auto& [id, hex] : r.trigger_seeds)
    trig.push_back({{"seed_id", id}, {"hex", hex}});
  auto& disc = j["discrepancies"] = nlohmann::json::array();
  for (const Discrepancy& d : r.discrepancies) {
    disc.push_back({{"seed_id", d.seed_id},
                    {"cycle", d.cycle},
                    {"net", d.net_name},
                    {"expected", std::string(1, logic_char(d.expected))},
                    {"observed", std::string(1, logic_char(d.observed))},
                    {"channel", channel_name(d.channel)},
                    {"micro_step", d.micro_step}});
  }
  return j.dump(2) + "\n";
}

FuzzReport fuzz_report_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw Error(Error::Kind::BadFormat, "fuzz report is not valid JSON");
  FuzzReport r;
  r.executed = j.at("executed").get<uint64_t>();
  r.prng_seed = j.at("prng_seed").get<uint64_t>();
  r.config_digest = j.at("config_digest").get<std::string>();
  r.coverage_series = j.at("coverage_series").get<std::vector<double>>();
  r.final_coverage_percent = j.at("final_coverage_percent").get<double>();
  r.coverage_score_total = j.at("coverage_score").get<double>();
  r.wall_clock_ms = j.at("wall_clock_ms").get<double>();
  for (const auto& e : j.at("corpus")) {
    CorpusEntry entry;
    entry.seed = seed_from_hex(e.at("hex").get<std::string>(),
                               e.at("width").get<uint32_t>(),
                               e.at("T").get<uint32_t>());
    entry.seed.id = e.at("id").get<uint64_t>();
    entry.seed.parent = e.at("parent").get<int64_t>();
    entry.seed.op = e.at("op").get<std::string>();
    entry.delta_count = e.at("delta").get<uint32_t>();
    entry.score_gain = e.at("score_gain").get<double>();
    entry.admitted_at = e.at("admitted_at").get<uint64_t>();
    r.corpus.push_back(std::move(entry));
  }
  if (j.contains("trigger_seeds"))
    for (const auto& t : j.at("trigger_seeds"))
      r.trigger_seeds.emplace_back(t.at("seed_id").get<uint64_t>(),
                                   t.at("hex").get<std::string>());
  for (const auto& d : j.at("discrepancies")) {
    Discrepancy disc;
    disc.seed_id = d.at("seed_id").get<uint64_t>();
    disc.cycle = d.at("cycle").get<uint32_t>();
    disc.net_name = d.at("net").get<std::string>();
    disc.expected = logic_from_char(d.at("expected").get<std::string>()[0]);
    disc.observed = logic_from_char(d.at("observed").get<std::string>()[0]);
    disc.micro_step = d.at("micro_step").get<int32_t>();
    const std::string ch = d.at("channel").get<std::string>();
    disc.channel = ch == "model-vs-simulator" ? Channel::ModelVsSimulator
                 : ch == "transient"          ? Channel::Transient
                                              : Channel::GateVsGolden;
    r.discrepancies.push_back(std::move(disc));
  }
  return r;
}

}  // namespace netfuzz
