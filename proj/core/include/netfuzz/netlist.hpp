#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netfuzz {

// Driver function of a net. Const0/Const1 exist only so stuck-at faults
// can be expressed without changing the node count; the bench frontend
// reads and writes them as `CONST0()` / `CONST1()`.
enum class GateKind : uint8_t {
  Input,
  And,
  Nand,
  Or,
  Nor,
  Xor,
  Xnor,
  Not,
  Buff,
  Dff,
  Const0,
  Const1,
};

inline constexpr int kGateKindCount = 12;

const char* gate_kind_name(GateKind k);
std::optional<GateKind> gate_kind_from_name(std::string_view name);

// Fan-in count contract: exact arity, or minimum when variadic.
struct GateArity {
  uint32_t min = 0;
  bool exact = false;
};
GateArity gate_arity(GateKind k);

enum class Interface : uint8_t { PrimaryInput, Wire, PrimaryOutput };

struct Net {
  uint32_t id = 0;
  std::string name;
  Interface interface = Interface::Wire;
  GateKind kind = GateKind::Input;
  std::vector<uint32_t> fanins;
  // Bit i set means fan-in i is read through an inversion (fault injection).
  uint64_t invert_mask = 0;
};

struct Netlist {
  std::vector<Net> nets;
  std::vector<uint32_t> input_ids;
  std::vector<uint32_t> output_ids;
  std::vector<uint32_t> dff_ids;
  // All nets except DFF-driven ones, in combinational dependency order.
  std::vector<uint32_t> topo_order;
  // Combinational depth; primary inputs, DFF outputs and constants sit at 0.
  std::vector<uint32_t> levels;
  uint32_t max_level = 0;

  uint32_t size() const { return static_cast<uint32_t>(nets.size()); }
  const Net* find(std::string_view name) const;
  uint64_t content_hash() const;
};

enum class FaultKind : uint8_t {
  StuckAt0,
  StuckAt1,
  GateSubstitution,
  InputInversion,
};

const char* fault_kind_name(FaultKind k);
std::optional<FaultKind> fault_kind_from_name(std::string_view name);

struct FaultSpec {
  FaultKind kind = FaultKind::StuckAt0;
  uint32_t target = 0;                       // net id
  GateKind replacement = GateKind::Buff;     // GateSubstitution only
};

/// Parse the ISCAS bench dialect: `INPUT(n)`, `OUTPUT(n)`,
/// `n = GATE(a, b, ...)`, `#` comments. Ids are assigned in order of first
/// appearance in the text. Two extensions keep faulted netlists writable:
/// zero-arity CONST0()/CONST1() drivers and a `!` fan-in prefix marking an
/// injected inversion.
Netlist parse_bench(std::string_view text);
Netlist parse_bench_file(const std::string& path);

std::string write_bench(const Netlist& nl);

/// Returns a modified copy; the input netlist is never touched.
Netlist inject_fault(const Netlist& nl, const FaultSpec& fault);

struct NetlistStats {
  uint32_t inputs = 0;
  uint32_t wires = 0;
  uint32_t outputs = 0;
  uint32_t nodes = 0;
  uint32_t dffs = 0;
  uint32_t max_level = 0;
  std::array<uint32_t, kGateKindCount> gates{};  // indexed by GateKind
};

NetlistStats stats(const Netlist& nl);
std::string stats_json(const NetlistStats& s);

}  // namespace netfuzz
