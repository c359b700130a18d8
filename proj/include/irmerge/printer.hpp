#pragma once

#include <string>

#include "irmerge/ir.hpp"

namespace irmerge {

// Text form that parse_module accepts; printing is deterministic and
// byte-stable, and float constants round-trip exactly.
std::string print_module(const IrModule &m);
std::string print_function(const IrFunction &f);
std::string print_instruction(const Instruction &in);

std::string format_double(double v);

}  // namespace irmerge
