#include "irmerge/ir.hpp"

#include <array>
#include <cstring>

namespace irmerge {

namespace {

struct OpcodeInfo {
  Opcode op;
  const char *name;
  OpClass cls;
};

// Control covers branches, switch, phi, compares and ret; Memory covers the
// scalar memory ops; everything computational (including casts and select)
// is Arithmetic; call stays neutral.
constexpr std::array<OpcodeInfo, kNumOpcodes> kOpcodes = {{
    {Opcode::Add, "add", OpClass::Arithmetic},
    {Opcode::Sub, "sub", OpClass::Arithmetic},
    {Opcode::Mul, "mul", OpClass::Arithmetic},
    {Opcode::SDiv, "sdiv", OpClass::Arithmetic},
    {Opcode::FAdd, "fadd", OpClass::Arithmetic},
    {Opcode::FSub, "fsub", OpClass::Arithmetic},
    {Opcode::FMul, "fmul", OpClass::Arithmetic},
    {Opcode::FDiv, "fdiv", OpClass::Arithmetic},
    {Opcode::And, "and", OpClass::Arithmetic},
    {Opcode::Or, "or", OpClass::Arithmetic},
    {Opcode::Xor, "xor", OpClass::Arithmetic},
    {Opcode::Shl, "shl", OpClass::Arithmetic},
    {Opcode::LShr, "lshr", OpClass::Arithmetic},
    {Opcode::AShr, "ashr", OpClass::Arithmetic},
    {Opcode::ICmp, "icmp", OpClass::Control},
    {Opcode::FCmp, "fcmp", OpClass::Control},
    {Opcode::SExt, "sext", OpClass::Arithmetic},
    {Opcode::ZExt, "zext", OpClass::Arithmetic},
    {Opcode::Trunc, "trunc", OpClass::Arithmetic},
    {Opcode::Select, "select", OpClass::Arithmetic},
    {Opcode::Load, "load", OpClass::Memory},
    {Opcode::Store, "store", OpClass::Memory},
    {Opcode::Alloca, "alloca", OpClass::Memory},
    {Opcode::Gep, "gep", OpClass::Memory},
    {Opcode::Br, "br", OpClass::Control},
    {Opcode::CondBr, "condbr", OpClass::Control},
    {Opcode::Switch, "switch", OpClass::Control},
    {Opcode::Phi, "phi", OpClass::Control},
    {Opcode::Ret, "ret", OpClass::Control},
    {Opcode::Call, "call", OpClass::Other},
}};

constexpr std::array<const char *, 17> kPredNames = {
    "none", "eq", "ne", "slt", "sle", "sgt", "sge", "ult", "ule", "ugt",
    "uge", "oeq", "one", "olt", "ole", "ogt", "oge"};

}  // namespace

const char *type_name(IrType t) {
  switch (t) {
    case IrType::I1: return "i1";
    case IrType::I32: return "i32";
    case IrType::I64: return "i64";
    case IrType::F32: return "f32";
    case IrType::F64: return "f64";
    case IrType::Addr: return "addr";
  }
  return "?";
}

std::optional<IrType> type_from_name(std::string_view s) {
  if (s == "i1") return IrType::I1;
  if (s == "i32") return IrType::I32;
  if (s == "i64") return IrType::I64;
  if (s == "f32") return IrType::F32;
  if (s == "f64") return IrType::F64;
  if (s == "addr") return IrType::Addr;
  return std::nullopt;
}

bool is_int_type(IrType t) {
  return t == IrType::I1 || t == IrType::I32 || t == IrType::I64;
}

bool is_float_type(IrType t) { return t == IrType::F32 || t == IrType::F64; }

int int_bits(IrType t) {
  switch (t) {
    case IrType::I1: return 1;
    case IrType::I32: return 32;
    case IrType::I64: return 64;
    default: return 0;
  }
}

const char *opcode_name(Opcode op) { return kOpcodes[static_cast<size_t>(op)].name; }

std::optional<Opcode> opcode_from_name(std::string_view s) {
  for (const auto &info : kOpcodes)
    if (s == info.name) return info.op;
  return std::nullopt;
}

OpClass opcode_class(Opcode op) { return kOpcodes[static_cast<size_t>(op)].cls; }

const char *opclass_name(OpClass c) {
  switch (c) {
    case OpClass::Arithmetic: return "arithmetic";
    case OpClass::Memory: return "memory";
    case OpClass::Control: return "control";
    case OpClass::Other: return "other";
  }
  return "?";
}

bool is_terminator(Opcode op) {
  return op == Opcode::Br || op == Opcode::CondBr || op == Opcode::Switch ||
         op == Opcode::Ret;
}

const char *predicate_name(Predicate p) {
  return kPredNames[static_cast<size_t>(p)];
}

std::optional<Predicate> predicate_from_name(std::string_view s) {
  for (size_t i = 1; i < kPredNames.size(); ++i)
    if (s == kPredNames[i]) return static_cast<Predicate>(i);
  return std::nullopt;
}

Operand Operand::value(std::string n, IrType t) {
  Operand o;
  o.kind = Kind::Value;
  o.name = std::move(n);
  o.type = t;
  return o;
}

Operand Operand::const_int(long long v, IrType t) {
  Operand o;
  o.kind = Kind::ConstInt;
  o.ival = v;
  o.type = t;
  return o;
}

Operand Operand::const_float(double v, IrType t) {
  Operand o;
  o.kind = Kind::ConstFloat;
  o.fval = v;
  o.type = t;
  return o;
}

bool operand_equal(const Operand &a, const Operand &b) {
  if (a.kind != b.kind || a.type != b.type) return false;
  switch (a.kind) {
    case Operand::Kind::Value: return a.name == b.name;
    case Operand::Kind::ConstInt: return a.ival == b.ival;
    case Operand::Kind::ConstFloat: {
      // bit compare to keep -0.0 vs 0.0 and NaN handling stable
      uint64_t ba, bb;
      static_assert(sizeof(double) == sizeof(uint64_t));
      std::memcpy(&ba, &a.fval, 8);
      std::memcpy(&bb, &b.fval, 8);
      return ba == bb;
    }
  }
  return false;
}

const BasicBlock *IrFunction::find_block(std::string_view label) const {
  for (const auto &b : blocks)
    if (b.label == label) return &b;
  return nullptr;
}

int IrFunction::block_index(std::string_view label) const {
  for (size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].label == label) return static_cast<int>(i);
  return -1;
}

size_t IrFunction::instr_count() const {
  size_t n = 0;
  for (const auto &b : blocks) n += b.instrs.size();
  return n;
}

size_t IrFunction::phi_count() const {
  size_t n = 0;
  for (const auto &b : blocks)
    for (const auto &in : b.instrs)
      if (in.op == Opcode::Phi) ++n;
  return n;
}

std::vector<int> IrFunction::opcode_counts() const {
  std::vector<int> counts(kNumOpcodes, 0);
  for (const auto &b : blocks)
    for (const auto &in : b.instrs) ++counts[static_cast<size_t>(in.op)];
  return counts;
}

const IrFunction *IrModule::find_function(std::string_view name) const {
  for (const auto &f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

IrFunction *IrModule::find_function(std::string_view name) {
  for (auto &f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

const MemRegion *IrModule::find_memory(std::string_view name) const {
  for (const auto &m : memories)
    if (m.name == name) return &m;
  return nullptr;
}

bool structurally_equal(const Instruction &a, const Instruction &b) {
  if (a.result != b.result || a.type != b.type || a.op != b.op ||
      a.pred != b.pred || a.callee != b.callee)
    return false;
  if (a.operands.size() != b.operands.size()) return false;
  for (size_t i = 0; i < a.operands.size(); ++i)
    if (!operand_equal(a.operands[i], b.operands[i])) return false;
  if (a.labels != b.labels || a.case_values != b.case_values) return false;
  if (a.incomings.size() != b.incomings.size()) return false;
  for (size_t i = 0; i < a.incomings.size(); ++i) {
    if (a.incomings[i].pred != b.incomings[i].pred) return false;
    if (!operand_equal(a.incomings[i].value, b.incomings[i].value)) return false;
  }
  return true;
}

bool structurally_equal(const IrFunction &a, const IrFunction &b) {
  if (a.name != b.name) return false;
  return equal_ignoring_name(a, b);
}

bool equal_ignoring_name(const IrFunction &a, const IrFunction &b) {
  if (a.ret_type != b.ret_type || a.params.size() != b.params.size() ||
      a.blocks.size() != b.blocks.size())
    return false;
  for (size_t i = 0; i < a.params.size(); ++i)
    if (a.params[i].name != b.params[i].name || a.params[i].type != b.params[i].type)
      return false;
  for (size_t i = 0; i < a.blocks.size(); ++i) {
    if (a.blocks[i].label != b.blocks[i].label) return false;
    if (a.blocks[i].instrs.size() != b.blocks[i].instrs.size()) return false;
    for (size_t j = 0; j < a.blocks[i].instrs.size(); ++j)
      if (!structurally_equal(a.blocks[i].instrs[j], b.blocks[i].instrs[j]))
        return false;
  }
  return true;
}

bool structurally_equal(const IrModule &a, const IrModule &b) {
  if (a.memories.size() != b.memories.size() ||
      a.functions.size() != b.functions.size())
    return false;
  for (size_t i = 0; i < a.memories.size(); ++i) {
    const auto &ma = a.memories[i], &mb = b.memories[i];
    if (ma.name != mb.name || ma.elem_type != mb.elem_type || ma.length != mb.length)
      return false;
  }
  for (size_t i = 0; i < a.functions.size(); ++i)
    if (!structurally_equal(a.functions[i], b.functions[i])) return false;
  return true;
}

}  // namespace irmerge
