#include "netfuzz/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "netfuzz/error.hpp"
#include "netfuzz/util.hpp"

namespace netfuzz {

const char* gate_kind_name(GateKind k) {
  switch (k) {
    case GateKind::Input: return "INPUT";
    case GateKind::And: return "AND";
    case GateKind::Nand: return "NAND";
    case GateKind::Or: return "OR";
    case GateKind::Nor: return "NOR";
    case GateKind::Xor: return "XOR";
    case GateKind::Xnor: return "XNOR";
    case GateKind::Not: return "NOT";
    case GateKind::Buff: return "BUFF";
    case GateKind::Dff: return "DFF";
    case GateKind::Const0: return "CONST0";
    case GateKind::Const1: return "CONST1";
  }
  return "?";
}

std::optional<GateKind> gate_kind_from_name(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  if (up == "AND") return GateKind::And;
  if (up == "NAND") return GateKind::Nand;
  if (up == "OR") return GateKind::Or;
  if (up == "NOR") return GateKind::Nor;
  if (up == "XOR") return GateKind::Xor;
  if (up == "XNOR") return GateKind::Xnor;
  if (up == "NOT" || up == "INV") return GateKind::Not;
  if (up == "BUFF" || up == "BUF") return GateKind::Buff;
  if (up == "DFF") return GateKind::Dff;
  if (up == "CONST0") return GateKind::Const0;
  if (up == "CONST1") return GateKind::Const1;
  if (up == "INPUT") return GateKind::Input;
  return std::nullopt;
}

GateArity gate_arity(GateKind k) {
  switch (k) {
    case GateKind::Input:
    case GateKind::Const0:
    case GateKind::Const1:
      return {0, true};
    case GateKind::Not:
    case GateKind::Buff:
    case GateKind::Dff:
      return {1, true};
    default:
      return {2, false};  // variadic, at least 2
  }
}

const char* fault_kind_name(FaultKind k) {
  switch (k) {
    case FaultKind::StuckAt0: return "stuck-at-0";
    case FaultKind::StuckAt1: return "stuck-at-1";
    case FaultKind::GateSubstitution: return "gate-substitution";
    case FaultKind::InputInversion: return "input-inversion";
  }
  return "?";
}

std::optional<FaultKind> fault_kind_from_name(std::string_view name) {
  if (name == "stuck-at-0" || name == "stuck0") return FaultKind::StuckAt0;
  if (name == "stuck-at-1" || name == "stuck1") return FaultKind::StuckAt1;
  if (name == "gate-substitution" || name == "subst")
    return FaultKind::GateSubstitution;
  if (name == "input-inversion" || name == "invert")
    return FaultKind::InputInversion;
  return std::nullopt;
}

const Net* Netlist::find(std::string_view name) const {
  for (const Net& n : nets)
    if (n.name == name) return &n;
  return nullptr;
}

uint64_t Netlist::content_hash() const {
  return fnv1a64(write_bench(*this));
}

namespace {

void check_arity(const std::string& net_name, GateKind kind, size_t got) {
  const GateArity a = gate_arity(kind);
  if (a.exact ? got != a.min : got < a.min) {
    std::ostringstream msg;
    msg << "net " << net_name << ": " << gate_kind_name(kind) << " takes "
        << (a.exact ? "exactly " : "at least ") << a.min << " fan-ins, got "
        << got;
    throw Error(Error::Kind::ArityViolation, msg.str());
  }
}

// Rebuilds interface lists, topo order and levels; validates acyclicity.
// Shared by the parser and inject_fault.
void finalize(Netlist& nl) {
  nl.input_ids.clear();
  nl.output_ids.clear();
  nl.dff_ids.clear();
  for (const Net& n : nl.nets) {
    if (n.interface == Interface::PrimaryInput) nl.input_ids.push_back(n.id);
    if (n.interface == Interface::PrimaryOutput) nl.output_ids.push_back(n.id);
    if (n.kind == GateKind::Dff) nl.dff_ids.push_back(n.id);
  }

  const uint32_t n = nl.size();
  // Kahn over the combinational dependency DAG. DFF-driven nets are
  // sequential sources and stay out of topo_order.
  std::vector<uint32_t> indeg(n, 0);
  std::vector<std::vector<uint32_t>> fanout(n);
  auto is_comb_gate = [&](const Net& net) {
    return net.kind != GateKind::Input && net.kind != GateKind::Dff &&
           net.kind != GateKind::Const0 && net.kind != GateKind::Const1;
  };
  for (const Net& net : nl.nets) {
    if (!is_comb_gate(net)) continue;
    for (uint32_t f : net.fanins) {
      if (nl.nets[f].kind == GateKind::Dff) continue;  // level-0 source
      fanout[f].push_back(net.id);
      ++indeg[net.id];
    }
  }

  nl.topo_order.clear();
  nl.levels.assign(n, 0);
  std::vector<uint32_t> queue;
  for (const Net& net : nl.nets)
    if (net.kind != GateKind::Dff && indeg[net.id] == 0)
      queue.push_back(net.id);

  size_t head = 0;
  while (head < queue.size()) {
    const uint32_t u = queue[head++];
    nl.topo_order.push_back(u);
    for (uint32_t v : fanout[u]) {
      if (--indeg[v] == 0) queue.push_back(v);
    }
  }

  uint32_t expected = 0;
  for (const Net& net : nl.nets)
    if (net.kind != GateKind::Dff) ++expected;
  if (nl.topo_order.size() != expected) {
    // Walk fan-ins inside the unresolved set until a net repeats.
    std::vector<uint8_t> stuck(n, 0);
    for (const Net& net : nl.nets)
      if (net.kind != GateKind::Dff && indeg[net.id] > 0) stuck[net.id] = 1;
    uint32_t cur = 0;
    while (!stuck[cur]) ++cur;
    std::vector<uint32_t> path;
    std::vector<int32_t> seen_at(n, -1);
    while (seen_at[cur] < 0) {
      seen_at[cur] = static_cast<int32_t>(path.size());
      path.push_back(cur);
      for (uint32_t f : nl.nets[cur].fanins)
        if (stuck[f]) {
          cur = f;
          break;
        }
    }
    std::ostringstream msg;
    msg << "combinational cycle:";
    for (size_t i = static_cast<size_t>(seen_at[cur]); i < path.size(); ++i)
      msg << ' ' << nl.nets[path[i]].name;
    msg << ' ' << nl.nets[cur].name;
    throw Error(Error::Kind::CombinationalCycle, msg.str());
  }

  nl.max_level = 0;
  for (uint32_t id : nl.topo_order) {
    const Net& net = nl.nets[id];
    if (!is_comb_gate(net)) continue;
    uint32_t lvl = 0;
    for (uint32_t f : net.fanins)
      if (nl.nets[f].kind != GateKind::Dff)
        lvl = std::max(lvl, nl.levels[f]);
    nl.levels[id] = lvl + 1;
    nl.max_level = std::max(nl.max_level, nl.levels[id]);
  }
}

struct LineScanner {
  std::string_view text;
  size_t pos = 0;
  int line_no = 0;

  bool next(std::string_view& line) {
    while (pos < text.size()) {
      size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view raw = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (const size_t hash = raw.find('#'); hash != std::string_view::npos)
        raw = raw.substr(0, hash);
      // trim
      size_t b = 0, e = raw.size();
      while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
      while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
      if (b == e) continue;
      line = raw.substr(b, e - b);
      return true;
    }
    return false;
  }
};

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

Netlist parse_bench(std::string_view text) {
  Netlist nl;
  std::unordered_map<std::string, uint32_t> by_name;
  std::vector<uint8_t> has_driver;

  auto intern = [&](std::string_view name) -> uint32_t {
    auto it = by_name.find(std::string(name));
    if (it != by_name.end()) return it->second;
    const uint32_t id = nl.size();
    Net net;
    net.id = id;
    net.name = std::string(name);
    nl.nets.push_back(std::move(net));
    has_driver.push_back(0);
    by_name.emplace(std::string(name), id);
    return id;
  };

  auto set_driver = [&](uint32_t id, int line_no) {
    if (has_driver[id]) {
      std::ostringstream msg;
      msg << "line " << line_no << ": net " << nl.nets[id].name
          << " already has a driver";
      throw Error(Error::Kind::DuplicateDriver, msg.str());
    }
    has_driver[id] = 1;
  };

  std::vector<uint8_t> is_output;
  LineScanner scan{text};
  std::string_view line;
  while (scan.next(line)) {
    auto fail = [&](Error::Kind kind, const std::string& what) {
      std::ostringstream msg;
      msg << "line " << scan.line_no << ": " << what;
      throw Error(kind, msg.str());
    };

    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      // INPUT(name) or OUTPUT(name)
      const size_t open = line.find('(');
      const size_t close = line.rfind(')');
      if (open == std::string_view::npos || close == std::string_view::npos ||
          close < open)
        fail(Error::Kind::BadFormat, "expected INPUT(...), OUTPUT(...) or assignment");
      const std::string_view kw = trim(line.substr(0, open));
      const std::string_view name = trim(line.substr(open + 1, close - open - 1));
      if (name.empty()) fail(Error::Kind::BadFormat, "empty net name");
      if (kw == "INPUT") {
        const uint32_t id = intern(name);
        set_driver(id, scan.line_no);
        nl.nets[id].kind = GateKind::Input;
        nl.nets[id].interface = Interface::PrimaryInput;
      } else if (kw == "OUTPUT") {
        const uint32_t id = intern(name);
        if (is_output.size() < nl.nets.size()) is_output.resize(nl.nets.size(), 0);
        is_output[id] = 1;
      } else {
        fail(Error::Kind::BadFormat,
             "unknown directive \"" + std::string(kw) + "\"");
      }
      if (is_output.size() < nl.nets.size()) is_output.resize(nl.nets.size(), 0);
      continue;
    }

    // name = GATE(a, b, ...)
    const std::string_view lhs = trim(line.substr(0, eq));
    if (lhs.empty()) fail(Error::Kind::BadFormat, "empty left-hand side");
    const std::string_view rhs = trim(line.substr(eq + 1));
    const size_t open = rhs.find('(');
    const size_t close = rhs.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos ||
        close < open)
      fail(Error::Kind::BadFormat, "expected GATE(fanins)");
    const std::string_view gate_name = trim(rhs.substr(0, open));
    const auto kind = gate_kind_from_name(gate_name);
    if (!kind || *kind == GateKind::Input)
      fail(Error::Kind::UnknownGate,
           "unknown gate \"" + std::string(gate_name) + "\"");

    // Interning fan-ins below may reallocate nl.nets, so never hold a Net&
    // across those calls.
    const uint32_t id = intern(lhs);
    set_driver(id, scan.line_no);

    std::string_view args = rhs.substr(open + 1, close - open - 1);
    std::vector<uint32_t> fanins;
    uint64_t invert_mask = 0;
    if (!trim(args).empty()) {
      size_t start = 0;
      while (true) {
        size_t comma = args.find(',', start);
        if (comma == std::string_view::npos) comma = args.size();
        std::string_view tok = trim(args.substr(start, comma - start));
        if (tok.empty()) fail(Error::Kind::BadFormat, "empty fan-in name");
        if (tok.front() == '!') {
          tok = trim(tok.substr(1));
          if (tok.empty()) fail(Error::Kind::BadFormat, "empty fan-in after '!'");
          if (fanins.size() >= 64)
            fail(Error::Kind::BadFormat,
                 "inversion marks support at most 64 fan-ins");
          invert_mask |= 1ull << fanins.size();
        }
        fanins.push_back(intern(tok));
        if (comma == args.size()) break;
        start = comma + 1;
      }
    }
    check_arity(std::string(lhs), *kind, fanins.size());
    Net& net = nl.nets[id];
    net.kind = *kind;
    net.fanins = std::move(fanins);
    net.invert_mask = invert_mask;
    if (is_output.size() < nl.nets.size()) is_output.resize(nl.nets.size(), 0);
  }

  is_output.resize(nl.nets.size(), 0);
  for (Net& net : nl.nets) {
    if (!has_driver[net.id])
      throw Error(Error::Kind::UndefinedNet,
                  "net " + net.name + " is referenced but never driven");
    if (is_output[net.id]) {
      if (net.interface == Interface::PrimaryInput)
        throw Error(Error::Kind::BadFormat,
                    "net " + net.name + " declared both INPUT and OUTPUT");
      net.interface = Interface::PrimaryOutput;
    }
  }

  finalize(nl);
  return nl;
}

Netlist parse_bench_file(const std::string& path) {
  return parse_bench(read_file(path));
}

std::string write_bench(const Netlist& nl) {
  std::ostringstream out;
  for (uint32_t id : nl.input_ids) out << "INPUT(" << nl.nets[id].name << ")\n";
  for (uint32_t id : nl.output_ids) out << "OUTPUT(" << nl.nets[id].name << ")\n";
  for (const Net& net : nl.nets) {
    if (net.kind == GateKind::Input) continue;
    out << net.name << " = " << gate_kind_name(net.kind) << '(';
    for (size_t i = 0; i < net.fanins.size(); ++i) {
      if (i) out << ", ";
      if (net.invert_mask >> i & 1) out << '!';
      out << nl.nets[net.fanins[i]].name;
    }
    out << ")\n";
  }
  return out.str();
}

Netlist inject_fault(const Netlist& nl, const FaultSpec& fault) {
  if (fault.target >= nl.size())
    throw Error(Error::Kind::TargetNotFound,
                "fault target net id " + std::to_string(fault.target) +
                    " out of range");
  Netlist out = nl;
  Net& net = out.nets[fault.target];
  switch (fault.kind) {
    case FaultKind::StuckAt0:
    case FaultKind::StuckAt1:
      net.kind = fault.kind == FaultKind::StuckAt0 ? GateKind::Const0
                                                   : GateKind::Const1;
      net.fanins.clear();
      net.invert_mask = 0;
      break;
    case FaultKind::GateSubstitution: {
      const GateArity want = gate_arity(fault.replacement);
      if (want.exact ? net.fanins.size() != want.min
                     : net.fanins.size() < want.min) {
        std::ostringstream msg;
        msg << "cannot substitute " << gate_kind_name(net.kind) << " with "
            << gate_kind_name(fault.replacement) << " on net " << net.name
            << ": arity " << net.fanins.size() << " does not fit";
        throw Error(Error::Kind::ArityViolation, msg.str());
      }
      net.kind = fault.replacement;
      break;
    }
    case FaultKind::InputInversion:
      if (net.fanins.empty())
        throw Error(Error::Kind::ArityViolation,
                    "input-inversion target " + net.name + " has no fan-ins");
      // Wrapping through NOT twice cancels, hence xor.
      net.invert_mask ^= 1;
      break;
  }
  finalize(out);
  return out;
}

NetlistStats stats(const Netlist& nl) {
  NetlistStats s;
  s.nodes = nl.size();
  s.max_level = nl.max_level;
  for (const Net& net : nl.nets) {
    switch (net.interface) {
      case Interface::PrimaryInput: ++s.inputs; break;
      case Interface::PrimaryOutput: ++s.outputs; break;
      case Interface::Wire: ++s.wires; break;
    }
    if (net.kind != GateKind::Input)
      ++s.gates[static_cast<size_t>(net.kind)];
    if (net.kind == GateKind::Dff) ++s.dffs;
  }
  return s;
}

std::string stats_json(const NetlistStats& s) {
  nlohmann::json j;
  j["inputs"] = s.inputs;
  j["wires"] = s.wires;
  j["outputs"] = s.outputs;
  j["nodes"] = s.nodes;
  j["dffs"] = s.dffs;
  j["max_level"] = s.max_level;
  nlohmann::json gates = nlohmann::json::object();
  for (int k = 0; k < kGateKindCount; ++k)
    if (s.gates[static_cast<size_t>(k)] > 0)
      gates[gate_kind_name(static_cast<GateKind>(k))] = s.gates[static_cast<size_t>(k)];
  j["gates"] = gates;
  return j.dump(2) + "\n";
}

}  // namespace netfuzz
