#pragma once

#include <cstdint>
#include <span>

#include "netfuzz/netlist.hpp"

namespace netfuzz {

// Four-valued logic domain. The ordering is for storage and encoding only.
enum class LogicValue : uint8_t { L0 = 0, L1 = 1, LX = 2, LZ = 3 };

inline constexpr int kLogicValueCount = 4;

char logic_char(LogicValue v);
LogicValue logic_from_char(char c);  // throws BadFormat

inline LogicValue logic_not(LogicValue v) {
  switch (v) {
    case LogicValue::L0: return LogicValue::L1;
    case LogicValue::L1: return LogicValue::L0;
    default: return LogicValue::LX;  // X and Z both invert to X
  }
}

/// Pessimistic 4-valued evaluation. Z is coerced to X on every input.
/// A controlling value (0 for AND/NAND, 1 for OR/NOR) forces a definite
/// output; otherwise any X input yields X. XOR/XNOR yield X if any input
/// is X. DFF evaluates as a buffer of its D pin (clocking is the
/// simulator's job).
LogicValue eval_gate(GateKind kind, std::span<const LogicValue> inputs);

}  // namespace netfuzz
