#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "irmerge/ir.hpp"

namespace irmerge {

// Runtime scalar. Integers keep their value truncated to the type width,
// floats keep their IEEE bit pattern (f32 in the low 32 bits), and addr
// keeps the element offset in `bits` plus the region name.
struct RuntimeValue {
  IrType type = IrType::I32;
  uint64_t bits = 0;
  std::string region;

  static RuntimeValue make_int(IrType t, long long v);
  static RuntimeValue make_f32(float v);
  static RuntimeValue make_f64(double v);
  static RuntimeValue make_addr(std::string region, long long offset);

  long long as_int() const;     // sign-extended from the type width
  double as_double() const;     // f32/f64 payload
  long long addr_offset() const { return static_cast<long long>(bits); }
};

bool runtime_equal(const RuntimeValue &a, const RuntimeValue &b);
std::string runtime_to_string(const RuntimeValue &a);

// Region name -> cell contents. Cells are raw 64-bit payloads; loads
// reinterpret them according to the load type.
using MemoryState = std::map<std::string, std::vector<uint64_t>>;

enum class ExecErrorKind : uint8_t {
  StepLimitExceeded,
  DivisionByZero,
  OutOfBounds,
  CallDepthExceeded,
  BadState,   // e.g. malformed module escaped validation
};

struct ExecError {
  ExecErrorKind kind;
  std::string message;
};

struct TraceEntry {
  std::string block;
  int index = 0;
  Opcode op = Opcode::Add;
};

struct ExecResult {
  RuntimeValue ret;
  MemoryState memory_after;   // globals and caller-provided regions; alloca scratch excluded
  uint64_t dyn_instr_count = 0;
  std::vector<TraceEntry> trace;
};

struct RunOutcome {
  bool ok = false;
  ExecResult result;
  ExecError error{ExecErrorKind::BadState, ""};
};

struct RunOptions {
  uint64_t step_limit = 200000;
  bool collect_trace = false;
  int call_depth_limit = 64;
};

// Executes fname on a validated module. Declared regions missing from
// mem_init start zeroed; extra regions in mem_init are added to the machine.
RunOutcome run_function(const IrModule &m, const std::string &fname,
                        const std::vector<RuntimeValue> &args,
                        const MemoryState &mem_init, const RunOptions &opts = {});

std::string trace_to_string(const std::vector<TraceEntry> &trace);

}  // namespace irmerge
