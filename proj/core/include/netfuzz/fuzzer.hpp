#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netfuzz/netgraph.hpp"
#include "netfuzz/oracle.hpp"
#include "netfuzz/rng.hpp"
#include "netfuzz/seed.hpp"
#include "netfuzz/sim.hpp"

namespace netfuzz {

struct GrnnModel;  // grnn.hpp

Seed gen_seed(uint32_t width, uint32_t T, Rng& rng);

enum class MutOp : uint8_t {
  Flip1,
  Flip2,
  Flip4,
  CycleRandomize,
  Arith,       // +/- k (k <= 16) on an 8-bit window of one cycle
  CopyWithin,  // duplicate one cycle's vector over another
  Splice,      // crossover with a corpus seed at a cycle boundary
  Havoc,       // 2..8 stacked basic operators
};

inline constexpr int kMutOpCount = 8;
const char* mut_op_name(MutOp op);

struct MutationWeights {
  // Probabilities sum to 1; order matches MutOp.
  std::array<double, kMutOpCount> p = {0.20, 0.10, 0.10, 0.15,
                                       0.15, 0.10, 0.10, 0.10};
};

struct CoverageMap {
  uint32_t n = 0;
  std::vector<uint8_t> rise, fall;
  uint64_t executed = 0;

  explicit CoverageMap(uint32_t nodes = 0)
      : n(nodes), rise(nodes, 0), fall(nodes, 0) {}
  double percent() const;
};

struct CoverageDelta {
  // (node, is_rise) transitions newly covered by the last waveform.
  std::vector<std::pair<uint32_t, bool>> newly;
  bool interesting = false;
};

struct CorpusEntry {
  Seed seed;
  uint32_t delta_count = 0;   // transitions new at admission
  double score_gain = 0.0;    // centrality-weighted coverage gain
  uint64_t admitted_at = 0;   // executed-seed index at admission
};

struct Corpus {
  struct AuditEvent {
    uint64_t seed_id = 0;
    uint32_t delta_count = 0;
    enum class Action : uint8_t { Admitted } action = Action::Admitted;
  };
  std::vector<CorpusEntry> entries;
  std::vector<AuditEvent> log;
};

Seed mutate(const Seed& seed, const Corpus& corpus, Rng& rng,
            const MutationWeights& weights = {});

/// Union the waveform's toggles into the map; interesting iff anything
/// new was covered. Re-running an identical seed is never interesting.
CoverageDelta coverage_update(CoverageMap& map, const Waveform& wf);

/// Centrality-weighted coverage: sum of centrality[node]/2 over covered
/// (node, transition) slots. Monotone in the map.
double coverage_score(const CoverageMap& map,
                      std::span<const double> centrality);

enum class CentralityChoice : uint8_t { Degree, Betweenness, Closeness, Eigenvector };

struct FuzzConfig {
  uint64_t budget = 100;          // seeds to execute; must be > 0
  uint32_t T = 1;                 // cycles per seed
  double epsilon = 0.1;           // chance of a fresh seed instead of a mutant
  bool guided = true;             // false: pure random, corpus ignored
  CompareMode compare_mode = CompareMode::Lenient;
  ObserveSet observe = ObserveSet::PrimaryOutputs;
  SimMode sim_mode = SimMode::ZeroDelay;  // UnitDelay also reports glitches
  CentralityChoice score_metric = CentralityChoice::Eigenvector;
  MutationWeights weights;
  int jobs = 1;
};

struct FuzzReport {
  uint64_t executed = 0;
  std::vector<double> coverage_series;  // percent after each seed
  std::vector<CorpusEntry> corpus;
  std::vector<Corpus::AuditEvent> audit_log;
  std::vector<Discrepancy> discrepancies;
  // Hex of every seed that produced at least one discrepancy, keyed by
  // seed id, so reports stay replayable without retaining every stimulus.
  std::vector<std::pair<uint64_t, std::string>> trigger_seeds;
  double final_coverage_percent = 0.0;
  double coverage_score_total = 0.0;
  uint64_t prng_seed = 0;
  std::string config_digest;
  double wall_clock_ms = 0.0;  // excluded from replay comparisons
};

/// The AFL-style loop: pick a corpus parent (weighted by score gain and
/// recency) or generate fresh with probability epsilon, mutate, execute on
/// the DUT simulator (plus GRNN inference when a model is given), fold the
/// waveform into the coverage map, admit coverage-increasing seeds, and
/// run the golden comparison on every executed seed.
FuzzReport fuzz_loop(const Netlist& dut, const GoldenModel& golden,
                     const GrnnModel* model, const FuzzConfig& config,
                     uint64_t prng_seed);

std::string fuzz_report_json(const FuzzReport& r);
FuzzReport fuzz_report_from_json(const std::string& text);

}  // namespace netfuzz
