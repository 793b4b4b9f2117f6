#pragma once

#include <stdexcept>
#include <string>

namespace netfuzz {

// Single exception type for the library. `kind` is the stable,
// machine-checkable classification; what() carries the detail.
class Error : public std::runtime_error {
public:
  enum class Kind {
    UnknownGate,
    UndefinedNet,
    DuplicateDriver,
    CombinationalCycle,
    ArityViolation,
    TargetNotFound,
    SeedWidthMismatch,
    ShapeMismatch,
    GraphMismatch,
    EmptyMask,
    EmptySplit,
    DivergenceDetected,
    ModelGraphMismatch,
    BudgetZero,
    ConfigInvalid,
    FileNotFound,
    SchemaVersionMismatch,
    BadFormat,
  };

  Error(Kind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  Kind kind() const { return kind_; }

  static const char* kind_name(Kind k);

private:
  Kind kind_;
};

}  // namespace netfuzz
