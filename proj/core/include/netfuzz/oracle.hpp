#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netfuzz/netlist.hpp"
#include "netfuzz/sim.hpp"

namespace netfuzz {

struct FuzzConfig;  // fuzzer.hpp

enum class CompareMode : uint8_t {
  Lenient,  // golden X matches anything
  Strict,   // values must be identical, X included
};

enum class ObserveSet : uint8_t { PrimaryOutputs, AllNets };

enum class Channel : uint8_t {
  GateVsGolden,       // DUT simulation vs golden reference
  ModelVsSimulator,   // GRNN prediction vs DUT simulation
  Transient,          // unit-delay glitch
};

const char* channel_name(Channel c);

struct Discrepancy {
  uint64_t seed_id = 0;
  uint32_t cycle = 0;
  uint32_t net = 0;
  std::string net_name;
  LogicValue expected = LogicValue::LX;
  LogicValue observed = LogicValue::LX;
  Channel channel = Channel::GateVsGolden;
  int32_t micro_step = -1;  // Transient only
};

// The trusted side of every comparison: the unfaulted netlist evaluated
// with zero-delay semantics.
struct GoldenModel {
  Netlist reference;
  ObserveSet observe = ObserveSet::PrimaryOutputs;

  std::vector<uint32_t> observed_nets() const;
  Waveform run(const Seed& seed) const;
};

/// Cell-by-cell comparison over the observed nets. Lenient mode treats a
/// golden X as "unknown, matches anything"; strict mode demands identity.
std::vector<Discrepancy> compare(const Netlist& nl, const Waveform& golden,
                                 const Waveform& dut,
                                 std::span<const uint32_t> observed,
                                 CompareMode mode);

/// Flags nets that actively switched to a value different from their
/// settled one during a unit-delay relaxation (glitches). A net still
/// holding its pre-step value is merely awaiting its event and is exempt.
std::vector<Discrepancy> detect_transients(const Netlist& nl,
                                           const std::vector<SimState>& trace,
                                           const SimState& settled,
                                           std::span<const uint32_t> observed,
                                           uint32_t cycle = 0);

struct BugGroup {
  std::string net;
  Channel channel = Channel::GateVsGolden;
  uint64_t count = 0;
  std::string trigger_seed_hex;  // earliest seed that excites the group
  uint32_t first_cycle = 0;
  LogicValue first_expected = LogicValue::LX;
  LogicValue first_observed = LogicValue::LX;
};

enum class Observability : uint8_t {
  Detected,
  UnobservableVerified,  // exhaustively proven silent at the observed nets
  Undetermined,          // nothing found, exhaustive check not feasible
};

struct BugReport {
  std::vector<BugGroup> groups;
  uint64_t total_discrepancies = 0;
  uint64_t seeds_executed = 0;
  Observability observability = Observability::Detected;
  std::string note;
};

/// End-to-end harness: inject `fault`, fuzz the faulted DUT against the
/// clean netlist, and group what the oracle finds. When the loop finds
/// nothing and the circuit is combinational with <= 16 inputs, the fault
/// is checked exhaustively: a provably silent fault yields an empty report
/// flagged UnobservableVerified, while a missed observable fault is
/// excited directly with the witness vector.
BugReport validate_pipeline(const Netlist& clean, const FaultSpec& fault,
                            uint64_t budget, uint64_t prng_seed,
                            const FuzzConfig* base_config = nullptr);

std::string bug_report_json(const BugReport& r);
std::string bug_report_text(const BugReport& r);

}  // namespace netfuzz
