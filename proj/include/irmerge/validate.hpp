#pragma once

#include <string>
#include <vector>

#include "irmerge/ir.hpp"

namespace irmerge {

// Structural and SSA checks over a module. Empty result means the module
// honors every invariant the interpreter and the transforms rely on.
std::vector<std::string> validate(const IrModule &m);
std::vector<std::string> validate_function(const IrModule &m, const IrFunction &f);

}  // namespace irmerge
