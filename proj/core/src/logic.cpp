#include "netfuzz/logic.hpp"

#include <sstream>

#include "netfuzz/error.hpp"

namespace netfuzz {

char logic_char(LogicValue v) {
  switch (v) {
    case LogicValue::L0: return '0';
    case LogicValue::L1: return '1';
    case LogicValue::LX: return 'X';
    case LogicValue::LZ: return 'Z';
  }
  return '?';
}

LogicValue logic_from_char(char c) {
  switch (c) {
    case '0': return LogicValue::L0;
    case '1': return LogicValue::L1;
    case 'X': case 'x': return LogicValue::LX;
    case 'Z': case 'z': return LogicValue::LZ;
  }
  throw Error(Error::Kind::BadFormat,
              std::string("invalid logic value character '") + c + "'");
}

namespace {

inline LogicValue coerce(LogicValue v) {
  return v == LogicValue::LZ ? LogicValue::LX : v;
}

}  // namespace

LogicValue eval_gate(GateKind kind, std::span<const LogicValue> inputs) {
  const GateArity a = gate_arity(kind);
  if (a.exact ? inputs.size() != a.min : inputs.size() < a.min) {
    std::ostringstream msg;
    msg << gate_kind_name(kind) << " takes " << (a.exact ? "exactly " : "at least ")
        << a.min << " inputs, got " << inputs.size();
    throw Error(Error::Kind::ArityViolation, msg.str());
  }

  switch (kind) {
    case GateKind::Input:
      throw Error(Error::Kind::ArityViolation,
                  "INPUT is a source, not an evaluable gate");
    case GateKind::Const0:
      return LogicValue::L0;
    case GateKind::Const1:
      return LogicValue::L1;
    case GateKind::Not:
      return logic_not(coerce(inputs[0]));
    case GateKind::Buff:
    case GateKind::Dff:
      return coerce(inputs[0]);
    case GateKind::And:
    case GateKind::Nand: {
      bool any_x = false;
      bool any_zero = false;
      for (LogicValue raw : inputs) {
        const LogicValue v = coerce(raw);
        if (v == LogicValue::L0) any_zero = true;
        else if (v == LogicValue::LX) any_x = true;
      }
      LogicValue r = any_zero ? LogicValue::L0
                   : any_x   ? LogicValue::LX
                             : LogicValue::L1;
      return kind == GateKind::Nand ? logic_not(r) : r;
    }
    case GateKind::Or:
    case GateKind::Nor: {
      bool any_x = false;
      bool any_one = false;
      for (LogicValue raw : inputs) {
        const LogicValue v = coerce(raw);
        if (v == LogicValue::L1) any_one = true;
        else if (v == LogicValue::LX) any_x = true;
      }
      LogicValue r = any_one ? LogicValue::L1
                   : any_x  ? LogicValue::LX
                            : LogicValue::L0;
      return kind == GateKind::Nor ? logic_not(r) : r;
    }
    case GateKind::Xor:
    case GateKind::Xnor: {
      int parity = 0;
      for (LogicValue raw : inputs) {
        const LogicValue v = coerce(raw);
        if (v == LogicValue::LX) return LogicValue::LX;
        parity ^= (v == LogicValue::L1);
      }
      const bool one = kind == GateKind::Xor ? parity != 0 : parity == 0;
      return one ? LogicValue::L1 : LogicValue::L0;
    }
  }
  return LogicValue::LX;
}

}  // namespace netfuzz
