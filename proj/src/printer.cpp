#include "irmerge/printer.hpp"

#include <cstdio>
#include <cstring>
#include <sstream>

namespace irmerge {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // the grammar wants floats marked by '.' (or exponent)
  if (!std::strchr(buf, '.') && !std::strchr(buf, 'e') && !std::strchr(buf, 'E') &&
      !std::strchr(buf, 'n') && !std::strchr(buf, 'i'))
    std::strcat(buf, ".0");
  return buf;
}

namespace {

void print_operand(std::ostream &os, const Operand &o) {
  switch (o.kind) {
    case Operand::Kind::Value: os << '%' << o.name; break;
    case Operand::Kind::ConstInt: os << o.ival; break;
    case Operand::Kind::ConstFloat: os << format_double(o.fval); break;
  }
}

void print_instr(std::ostream &os, const Instruction &in) {
  if (in.has_result()) os << '%' << in.result << " = ";
  os << opcode_name(in.op);
  switch (in.op) {
    case Opcode::Add: case Opcode::Sub: case Opcode::Mul: case Opcode::SDiv:
    case Opcode::FAdd: case Opcode::FSub: case Opcode::FMul: case Opcode::FDiv:
    case Opcode::And: case Opcode::Or: case Opcode::Xor:
    case Opcode::Shl: case Opcode::LShr: case Opcode::AShr:
      os << ' ' << type_name(in.type) << ' ';
      print_operand(os, in.operands[0]);
      os << ", ";
      print_operand(os, in.operands[1]);
      break;
    case Opcode::ICmp: case Opcode::FCmp:
      os << ' ' << predicate_name(in.pred) << ' ' << type_name(in.type) << ' ';
      print_operand(os, in.operands[0]);
      os << ", ";
      print_operand(os, in.operands[1]);
      break;
    case Opcode::SExt: case Opcode::ZExt: case Opcode::Trunc:
      os << ' ' << type_name(in.operands[0].type) << ' ';
      print_operand(os, in.operands[0]);
      os << " to " << type_name(in.type);
      break;
    case Opcode::Select:
      os << ' ' << type_name(in.type) << ' ';
      print_operand(os, in.operands[0]);
      os << ", ";
      print_operand(os, in.operands[1]);
      os << ", ";
      print_operand(os, in.operands[2]);
      break;
    case Opcode::Load:
      os << ' ' << type_name(in.type) << ' ';
      print_operand(os, in.operands[0]);
      break;
    case Opcode::Store:
      os << ' ' << type_name(in.type) << ' ';
      print_operand(os, in.operands[0]);
      os << ", ";
      print_operand(os, in.operands[1]);
      break;
    case Opcode::Alloca:
      os << ' ' << type_name(in.type);
      break;
    case Opcode::Gep:
      os << ' ';
      print_operand(os, in.operands[0]);
      os << ", " << type_name(in.type) << ' ';
      print_operand(os, in.operands[1]);
      break;
    case Opcode::Br:
      os << ' ' << in.labels[0];
      break;
    case Opcode::CondBr:
      os << ' ';
      print_operand(os, in.operands[0]);
      os << ", " << in.labels[0] << ", " << in.labels[1];
      break;
    case Opcode::Switch:
      os << ' ' << type_name(in.type) << ' ';
      print_operand(os, in.operands[0]);
      os << ", " << in.labels[0] << " [ ";
      for (size_t i = 0; i < in.case_values.size(); ++i) {
        if (i) os << ", ";
        os << in.case_values[i] << ": " << in.labels[i + 1];
      }
      os << " ]";
      break;
    case Opcode::Phi:
      os << ' ' << type_name(in.type) << ' ';
      for (size_t i = 0; i < in.incomings.size(); ++i) {
        if (i) os << ", ";
        os << "[ ";
        print_operand(os, in.incomings[i].value);
        os << ", " << in.incomings[i].pred << " ]";
      }
      break;
    case Opcode::Ret:
      os << ' ' << type_name(in.type) << ' ';
      print_operand(os, in.operands[0]);
      break;
    case Opcode::Call:
      os << ' ' << type_name(in.type) << " @" << in.callee << '(';
      for (size_t i = 0; i < in.operands.size(); ++i) {
        if (i) os << ", ";
        print_operand(os, in.operands[i]);
      }
      os << ')';
      break;
  }
}

}  // namespace

std::string print_instruction(const Instruction &in) {
  std::ostringstream os;
  print_instr(os, in);
  return os.str();
}

std::string print_function(const IrFunction &f) {
  std::ostringstream os;
  os << "func @" << f.name << '(';
  for (size_t i = 0; i < f.params.size(); ++i) {
    if (i) os << ", ";
    os << '%' << f.params[i].name << ": " << type_name(f.params[i].type);
  }
  os << ") -> " << type_name(f.ret_type) << " {\n";
  for (const auto &b : f.blocks) {
    os << b.label << ":\n";
    for (const auto &in : b.instrs) {
      os << "  ";
      print_instr(os, in);
      os << '\n';
    }
  }
  os << "}\n";
  return os.str();
}

std::string print_module(const IrModule &m) {
  std::ostringstream os;
  for (const auto &mem : m.memories)
    os << "mem @" << mem.name << ": " << type_name(mem.elem_type) << '['
       << mem.length << "]\n";
  if (!m.memories.empty() && !m.functions.empty()) os << '\n';
  for (size_t i = 0; i < m.functions.size(); ++i) {
    if (i) os << '\n';
    os << print_function(m.functions[i]);
  }
  return os.str();
}

}  // namespace irmerge
