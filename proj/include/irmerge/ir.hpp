#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irmerge {

enum class IrType : uint8_t { I1, I32, I64, F32, F64, Addr };

const char *type_name(IrType t);
std::optional<IrType> type_from_name(std::string_view s);
bool is_int_type(IrType t);
bool is_float_type(IrType t);
int int_bits(IrType t);

enum class Opcode : uint8_t {
  Add, Sub, Mul, SDiv,
  FAdd, FSub, FMul, FDiv,
  And, Or, Xor, Shl, LShr, AShr,
  ICmp, FCmp,
  SExt, ZExt, Trunc,
  Select,
  Load, Store, Alloca, Gep,
  Br, CondBr, Switch, Phi, Ret,
  Call,
};

constexpr int kNumOpcodes = 30;

enum class OpClass : uint8_t { Arithmetic, Memory, Control, Other };

const char *opcode_name(Opcode op);
std::optional<Opcode> opcode_from_name(std::string_view s);
OpClass opcode_class(Opcode op);
const char *opclass_name(OpClass c);
bool is_terminator(Opcode op);

// Comparison predicates for icmp/fcmp.
enum class Predicate : uint8_t {
  None,
  Eq, Ne, Slt, Sle, Sgt, Sge, Ult, Ule, Ugt, Uge,   // icmp
  OEq, ONe, OLt, OLe, OGt, OGe,                     // fcmp
};

const char *predicate_name(Predicate p);
std::optional<Predicate> predicate_from_name(std::string_view s);

struct Operand {
  enum class Kind : uint8_t { Value, ConstInt, ConstFloat };
  Kind kind = Kind::ConstInt;
  std::string name;        // Kind::Value
  long long ival = 0;      // Kind::ConstInt
  double fval = 0.0;       // Kind::ConstFloat
  IrType type = IrType::I32;

  static Operand value(std::string n, IrType t);
  static Operand const_int(long long v, IrType t);
  static Operand const_float(double v, IrType t);
};

bool operand_equal(const Operand &a, const Operand &b);

struct PhiIncoming {
  Operand value;
  std::string pred;        // incoming block label
};

// One instruction of the mini-IR. Value operands and constants live in
// `operands`; control-flow targets live in `labels` so that CFG edges are
// explicit (br: [target]; condbr: [true, false]; switch: [default, cases...]).
struct Instruction {
  std::string result;                 // empty when the op produces no value
  IrType type = IrType::I32;          // result type, or payload type for store/ret/switch/gep-index
  Opcode op = Opcode::Add;
  Predicate pred = Predicate::None;   // icmp/fcmp only
  std::vector<Operand> operands;
  std::vector<std::string> labels;
  std::vector<long long> case_values; // switch: parallel to labels[1..]
  std::vector<PhiIncoming> incomings; // phi only
  std::string callee;                 // call only

  bool has_result() const { return !result.empty(); }
  bool is_term() const { return is_terminator(op); }
};

struct BasicBlock {
  std::string label;
  std::vector<Instruction> instrs;
};

struct Param {
  std::string name;
  IrType type = IrType::I32;
};

struct IrFunction {
  std::string name;
  std::vector<Param> params;
  IrType ret_type = IrType::I32;
  std::vector<BasicBlock> blocks;   // first block = entry

  const BasicBlock *find_block(std::string_view label) const;
  int block_index(std::string_view label) const;   // -1 if missing
  size_t instr_count() const;
  size_t phi_count() const;
  std::vector<int> opcode_counts() const;          // indexed by Opcode
};

struct MemRegion {
  std::string name;
  IrType elem_type = IrType::I32;   // scalar element type (addr not allowed)
  size_t length = 0;                // in elements
};

struct IrModule {
  std::vector<MemRegion> memories;
  std::vector<IrFunction> functions;

  const IrFunction *find_function(std::string_view name) const;
  IrFunction *find_function(std::string_view name);
  const MemRegion *find_memory(std::string_view name) const;
};

bool structurally_equal(const Instruction &a, const Instruction &b);
bool structurally_equal(const IrFunction &a, const IrFunction &b);
bool structurally_equal(const IrModule &a, const IrModule &b);

// Structural identity modulo the function's own name (used to detect
// copy-renamed duplicates when pairing merge candidates).
bool equal_ignoring_name(const IrFunction &a, const IrFunction &b);

}  // namespace irmerge
