#include "netfuzz/sim.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "netfuzz/error.hpp"

namespace netfuzz {

namespace {

// Fetch a gate's input values, honoring injected fan-in inversions.
inline void gather(const Net& net, const std::vector<LogicValue>& values,
                   std::vector<LogicValue>& buf) {
  buf.clear();
  for (size_t i = 0; i < net.fanins.size(); ++i) {
    LogicValue v = values[net.fanins[i]];
    if (net.invert_mask >> i & 1) v = logic_not(v);
    buf.push_back(v);
  }
}

void apply_sources(const Netlist& nl, std::span<const LogicValue> inputs,
                   const SimState& state, std::vector<LogicValue>& values) {
  for (size_t i = 0; i < nl.input_ids.size(); ++i)
    values[nl.input_ids[i]] = inputs[i];
  for (size_t i = 0; i < nl.dff_ids.size(); ++i)
    values[nl.dff_ids[i]] = state.dff_state[i];
  for (const Net& net : nl.nets)
    if (net.kind == GateKind::Const0)
      values[net.id] = LogicValue::L0;
    else if (net.kind == GateKind::Const1)
      values[net.id] = LogicValue::L1;
}

void check_input_width(const Netlist& nl, std::span<const LogicValue> inputs) {
  if (inputs.size() != nl.input_ids.size()) {
    std::ostringstream msg;
    msg << "got " << inputs.size() << " input values for "
        << nl.input_ids.size() << " primary inputs";
    throw Error(Error::Kind::SeedWidthMismatch, msg.str());
  }
}

inline bool is_comb_gate(const Net& net) {
  return net.kind != GateKind::Input && net.kind != GateKind::Dff &&
         net.kind != GateKind::Const0 && net.kind != GateKind::Const1;
}

}  // namespace

SimState make_initial_state(const Netlist& nl) {
  SimState s;
  s.values.assign(nl.size(), LogicValue::LX);
  s.dff_state.assign(nl.dff_ids.size(), LogicValue::LX);
  return s;
}

SimState settle_zero_delay(const Netlist& nl,
                           std::span<const LogicValue> inputs,
                           const SimState& state) {
  check_input_width(nl, inputs);
  SimState out;
  out.values = state.values;
  out.dff_state = state.dff_state;
  apply_sources(nl, inputs, state, out.values);

  std::vector<LogicValue> buf;
  for (uint32_t id : nl.topo_order) {
    const Net& net = nl.nets[id];
    if (!is_comb_gate(net)) continue;
    gather(net, out.values, buf);
    out.values[id] = eval_gate(net.kind, buf);
  }
  return out;
}

std::vector<SimState> step_unit_delay(const Netlist& nl,
                                      std::span<const LogicValue> inputs,
                                      const SimState& state) {
  check_input_width(nl, inputs);
  std::vector<SimState> trace;
  trace.reserve(nl.max_level + 1);

  SimState first;
  first.values = state.values;
  first.dff_state = state.dff_state;
  apply_sources(nl, inputs, state, first.values);
  trace.push_back(std::move(first));

  std::vector<LogicValue> buf;
  for (uint32_t k = 1; k <= nl.max_level; ++k) {
    SimState next = trace.back();
    const std::vector<LogicValue>& prev = trace.back().values;
    for (const Net& net : nl.nets) {
      if (!is_comb_gate(net)) continue;
      gather(net, prev, buf);
      next.values[net.id] = eval_gate(net.kind, buf);
    }
    trace.push_back(std::move(next));
  }
  return trace;
}

Waveform simulate_sequence(const Netlist& nl, const Seed& seed, SimMode mode) {
  if (seed.width != nl.input_ids.size()) {
    std::ostringstream msg;
    msg << "seed width " << seed.width << " does not match "
        << nl.input_ids.size() << " primary inputs";
    throw Error(Error::Kind::SeedWidthMismatch, msg.str());
  }
  if (seed.T < 1)
    throw Error(Error::Kind::SeedWidthMismatch, "seed has zero timesteps");

  Waveform wf;
  wf.timesteps = seed.T;
  wf.toggles.rise.assign(nl.size(), 0);
  wf.toggles.fall.assign(nl.size(), 0);

  SimState state = make_initial_state(nl);
  std::vector<LogicValue> inputs(seed.width);
  std::vector<LogicValue> buf;

  for (uint32_t t = 0; t < seed.T; ++t) {
    for (uint32_t i = 0; i < seed.width; ++i)
      inputs[i] = seed.bit(t, i) ? LogicValue::L1 : LogicValue::L0;

    SimState settled;
    if (mode == SimMode::UnitDelay) {
      std::vector<SimState> trace = step_unit_delay(nl, inputs, state);
      settled.values = trace.back().values;
      settled.dff_state = state.dff_state;
      wf.micro.push_back(std::move(trace));
    } else {
      settled = settle_zero_delay(nl, inputs, state);
    }

    if (t > 0) {
      const std::vector<LogicValue>& prev = wf.settled.back().values;
      for (uint32_t n = 0; n < nl.size(); ++n) {
        if (prev[n] == LogicValue::L0 && settled.values[n] == LogicValue::L1)
          ++wf.toggles.rise[n];
        else if (prev[n] == LogicValue::L1 && settled.values[n] == LogicValue::L0)
          ++wf.toggles.fall[n];
      }
    }

    // Clock edge: every DFF captures its settled D value.
    state.values = settled.values;
    for (size_t k = 0; k < nl.dff_ids.size(); ++k) {
      const Net& dff = nl.nets[nl.dff_ids[k]];
      LogicValue d = settled.values[dff.fanins[0]];
      if (dff.invert_mask & 1) d = logic_not(d);
      state.dff_state[k] = d;
    }
    wf.settled.push_back(std::move(settled));
  }
  return wf;
}

ToggleReport toggle_coverage(const Waveform& wf) {
  ToggleReport r;
  const size_t n = wf.toggles.rise.size();
  r.rise_covered.assign(n, 0);
  r.fall_covered.assign(n, 0);
  size_t covered = 0;
  for (size_t i = 0; i < n; ++i) {
    r.rise_covered[i] = wf.toggles.rise[i] > 0;
    r.fall_covered[i] = wf.toggles.fall[i] > 0;
    covered += r.rise_covered[i] + r.fall_covered[i];
  }
  r.percent = n == 0 ? 0.0 : 100.0 * static_cast<double>(covered) /
                                 static_cast<double>(2 * n);
  return r;
}

std::string waveform_csv(const Netlist& nl, const Waveform& wf) {
  std::ostringstream out;
  out << "cycle,net_name,value\n";
  for (uint32_t t = 0; t < wf.timesteps; ++t)
    for (const Net& net : nl.nets)
      out << t << ',' << net.name << ','
          << logic_char(wf.settled[t].values[net.id]) << '\n';
  return out.str();
}

std::string waveform_json(const Netlist& nl, const Waveform& wf) {
  nlohmann::json j;
  auto& nets = j["nets"] = nlohmann::json::array();
  for (const Net& net : nl.nets) nets.push_back(net.name);
  auto& rows = j["rows"] = nlohmann::json::array();
  for (uint32_t t = 0; t < wf.timesteps; ++t) {
    nlohmann::json row = nlohmann::json::array();
    for (const Net& net : nl.nets)
      row.push_back(std::string(1, logic_char(wf.settled[t].values[net.id])));
    rows.push_back(std::move(row));
  }
  return j.dump() + "\n";
}

std::string toggle_json(const Netlist& nl, const ToggleReport& report) {
  nlohmann::json nets = nlohmann::json::object();
  for (const Net& net : nl.nets) {
    nets[net.name] = {{"rise", static_cast<bool>(report.rise_covered[net.id])},
                      {"fall", static_cast<bool>(report.fall_covered[net.id])}};
  }
  nlohmann::json j;
  j["nets"] = std::move(nets);
  j["percent"] = report.percent;
  return j.dump(2) + "\n";
}

}  // namespace netfuzz
