#pragma once

#include <stdexcept>

namespace kfrac {

// A declared property of a user-supplied object failed at runtime, e.g. a
// Kirchhoff law returning a value below its stated floor.
struct contract_violation : std::logic_error {
  using std::logic_error::logic_error;
};

// The time stepper cannot continue (non-finite state, diverging corrector
// iteration). The message carries a dump of the failing step.
struct solver_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The requested operation is not defined for the active discretization mode.
struct unsupported_mode : std::logic_error {
  using std::logic_error::logic_error;
};

}
