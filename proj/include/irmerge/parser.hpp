#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "irmerge/ir.hpp"

namespace irmerge {

enum class DiagKind : uint8_t {
  Syntax,
  TypeMismatch,
  UndefinedValue,
  DuplicateDefinition,
  Validation,
};

struct Diag {
  int line = 0;   // 1-based; 0 for whole-module validation findings
  int col = 0;
  DiagKind kind = DiagKind::Syntax;
  std::string message;

  std::string to_string() const;
};

struct ParseResult {
  IrModule module;
  std::vector<Diag> diags;
  bool ok() const { return diags.empty(); }
  std::string diag_text() const;
};

// Parses and fully checks a module: grammar, name resolution, per-opcode
// typing, then the structural SSA validator. The returned module is valid
// whenever ok() is true.
ParseResult parse_module(std::string_view text);

ParseResult parse_file(const std::string &path);

}  // namespace irmerge
