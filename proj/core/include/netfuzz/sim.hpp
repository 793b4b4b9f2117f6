#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netfuzz/logic.hpp"
#include "netfuzz/netlist.hpp"
#include "netfuzz/seed.hpp"

namespace netfuzz {

struct SimState {
  std::vector<LogicValue> values;     // one per net
  std::vector<LogicValue> dff_state;  // aligned with Netlist::dff_ids
};

SimState make_initial_state(const Netlist& nl);  // everything X

/// Golden functional semantics: evaluate every combinational net once in
/// topo order. DFF outputs hold state.dff_state; dff_state is passed
/// through unchanged.
SimState settle_zero_delay(const Netlist& nl,
                           std::span<const LogicValue> inputs,
                           const SimState& state);

/// Unit-delay relaxation: micro-step k re-evaluates every combinational
/// net from micro-step k-1, so values are final up to level k and
/// transient above. trace[0] is the incoming state with the new inputs
/// applied; trace.size() == max_level + 1 and trace.back() equals the
/// zero-delay settle.
std::vector<SimState> step_unit_delay(const Netlist& nl,
                                      std::span<const LogicValue> inputs,
                                      const SimState& state);

enum class SimMode : uint8_t { ZeroDelay, UnitDelay };

struct ToggleCounters {
  std::vector<uint64_t> rise;  // 0 -> 1 transitions per net
  std::vector<uint64_t> fall;  // 1 -> 0 transitions per net
};

struct Waveform {
  uint32_t timesteps = 0;
  std::vector<SimState> settled;                // one per timestep
  std::vector<std::vector<SimState>> micro;     // unit-delay mode only
  ToggleCounters toggles;
};

/// Per timestep: apply inputs, settle, record, then clock all DFFs from
/// their settled D values. DFFs start at X. Toggle counters track 0->1 and
/// 1->0 transitions between consecutive settled states.
Waveform simulate_sequence(const Netlist& nl, const Seed& seed,
                           SimMode mode = SimMode::ZeroDelay);

struct ToggleReport {
  std::vector<uint8_t> rise_covered;  // per net
  std::vector<uint8_t> fall_covered;
  double percent = 0.0;  // covered transition slots / (2 * nets) * 100
};

ToggleReport toggle_coverage(const Waveform& wf);

std::string waveform_csv(const Netlist& nl, const Waveform& wf);
std::string waveform_json(const Netlist& nl, const Waveform& wf);
std::string toggle_json(const Netlist& nl, const ToggleReport& report);

}  // namespace netfuzz
