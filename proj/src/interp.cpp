#include "irmerge/interp.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace irmerge {

namespace {

uint64_t truncate_to(IrType t, uint64_t bits) {
  switch (t) {
    case IrType::I1: return bits & 1;
    case IrType::I32: return bits & 0xffffffffull;
    default: return bits;
  }
}

long long sign_extend(IrType t, uint64_t bits) {
  switch (t) {
    case IrType::I1: return (bits & 1) ? -1 : 0;
    case IrType::I32: return static_cast<int32_t>(bits & 0xffffffffull);
    default: return static_cast<long long>(bits);
  }
}

}  // namespace

RuntimeValue RuntimeValue::make_int(IrType t, long long v) {
  RuntimeValue r;
  r.type = t;
  r.bits = truncate_to(t, static_cast<uint64_t>(v));
  return r;
}

RuntimeValue RuntimeValue::make_f32(float v) {
  RuntimeValue r;
  r.type = IrType::F32;
  uint32_t b;
  std::memcpy(&b, &v, 4);
  r.bits = b;
  return r;
}

RuntimeValue RuntimeValue::make_f64(double v) {
  RuntimeValue r;
  r.type = IrType::F64;
  std::memcpy(&r.bits, &v, 8);
  return r;
}

RuntimeValue RuntimeValue::make_addr(std::string region, long long offset) {
  RuntimeValue r;
  r.type = IrType::Addr;
  r.region = std::move(region);
  r.bits = static_cast<uint64_t>(offset);
  return r;
}

long long RuntimeValue::as_int() const { return sign_extend(type, bits); }

double RuntimeValue::as_double() const {
  if (type == IrType::F32) {
    uint32_t b = static_cast<uint32_t>(bits);
    float f;
    std::memcpy(&f, &b, 4);
    return f;
  }
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

bool runtime_equal(const RuntimeValue &a, const RuntimeValue &b) {
  return a.type == b.type && a.bits == b.bits && a.region == b.region;
}

std::string runtime_to_string(const RuntimeValue &a) {
  std::ostringstream os;
  switch (a.type) {
    case IrType::I1:
    case IrType::I32:
    case IrType::I64:
      os << type_name(a.type) << ' ' << a.as_int();
      break;
    case IrType::F32:
    case IrType::F64:
      os << type_name(a.type) << ' ' << a.as_double();
      break;
    case IrType::Addr:
      os << "addr @" << a.region << '+' << a.addr_offset();
      break;
  }
  return os.str();
}

namespace {

class Machine {
 public:
  Machine(const IrModule &m, const MemoryState &mem_init, const RunOptions &opts)
      : mod_(m), opts_(opts) {
    for (const auto &region : m.memories)
      memory_[region.name].assign(region.length, 0);
    for (const auto &[name, cells] : mem_init) memory_[name] = cells;
  }

  RuntimeValue run(const std::string &fname, const std::vector<RuntimeValue> &args,
                   int depth) {
    if (depth > opts_.call_depth_limit)
      throw ExecError{ExecErrorKind::CallDepthExceeded, "call depth limit exceeded"};
    const IrFunction *fn = mod_.find_function(fname);
    if (!fn) throw ExecError{ExecErrorKind::BadState, "no such function @" + fname};
    if (args.size() != fn->params.size())
      throw ExecError{ExecErrorKind::BadState, "bad arity calling @" + fname};

    std::map<std::string, RuntimeValue> env;
    for (size_t i = 0; i < args.size(); ++i) {
      if (args[i].type != fn->params[i].type)
        throw ExecError{ExecErrorKind::BadState, "bad argument type calling @" + fname};
      env[fn->params[i].name] = args[i];
    }

    int block = 0, prev_block = -1;
    for (;;) {
      const BasicBlock &bb = fn->blocks[block];

      // phis read their incoming values as a group before any writes land
      size_t first_nonphi = 0;
      while (first_nonphi < bb.instrs.size() &&
             bb.instrs[first_nonphi].op == Opcode::Phi)
        ++first_nonphi;
      if (first_nonphi > 0) {
        std::vector<RuntimeValue> phi_vals(first_nonphi);
        for (size_t i = 0; i < first_nonphi; ++i) {
          const Instruction &phi = bb.instrs[i];
          tick(bb.label, static_cast<int>(i), phi.op);
          const Operand *chosen = nullptr;
          for (const auto &inc : phi.incomings)
            if (prev_block >= 0 && inc.pred == fn->blocks[prev_block].label) {
              chosen = &inc.value;
              break;
            }
          if (!chosen)
            throw ExecError{ExecErrorKind::BadState,
                            "phi %" + phi.result + " has no incoming for the taken edge"};
          phi_vals[i] = eval(env, *chosen);
        }
        for (size_t i = 0; i < first_nonphi; ++i)
          env[bb.instrs[i].result] = phi_vals[i];
      }

      for (size_t i = first_nonphi; i < bb.instrs.size(); ++i) {
        const Instruction &in = bb.instrs[i];
        tick(bb.label, static_cast<int>(i), in.op);
        if (in.is_term()) {
          switch (in.op) {
            case Opcode::Ret:
              return eval(env, in.operands[0]);
            case Opcode::Br:
              prev_block = block;
              block = fn->block_index(in.labels[0]);
              break;
            case Opcode::CondBr: {
              bool c = eval(env, in.operands[0]).bits & 1;
              prev_block = block;
              block = fn->block_index(in.labels[c ? 0 : 1]);
              break;
            }
            case Opcode::Switch: {
              long long v = eval(env, in.operands[0]).as_int();
              int target = fn->block_index(in.labels[0]);
              for (size_t k = 0; k < in.case_values.size(); ++k)
                if (in.case_values[k] == v) {
                  target = fn->block_index(in.labels[k + 1]);
                  break;
                }
              prev_block = block;
              block = target;
              break;
            }
            default:
              throw ExecError{ExecErrorKind::BadState, "unknown terminator"};
          }
          if (block < 0)
            throw ExecError{ExecErrorKind::BadState, "branch to unknown block"};
          break;
        }
        RuntimeValue out = exec(env, in, depth);
        if (in.has_result()) env[in.result] = out;
      }
    }
  }

  uint64_t steps() const { return steps_; }
  std::vector<TraceEntry> take_trace() { return std::move(trace_); }

  MemoryState snapshot_globals() const {
    MemoryState out;
    for (const auto &[name, cells] : memory_)
      if (name.rfind("$a.", 0) != 0) out[name] = cells;
    return out;
  }

 private:
  void tick(const std::string &block, int index, Opcode op) {
    if (++steps_ > opts_.step_limit)
      throw ExecError{ExecErrorKind::StepLimitExceeded, "step limit exceeded"};
    if (opts_.collect_trace) trace_.push_back({block, index, op});
  }

  RuntimeValue eval(const std::map<std::string, RuntimeValue> &env, const Operand &o) {
    switch (o.kind) {
      case Operand::Kind::Value: {
        auto it = env.find(o.name);
        if (it == env.end())
          throw ExecError{ExecErrorKind::BadState, "read of unset value %" + o.name};
        return it->second;
      }
      case Operand::Kind::ConstInt:
        return RuntimeValue::make_int(o.type, o.ival);
      case Operand::Kind::ConstFloat:
        return o.type == IrType::F32 ? RuntimeValue::make_f32(static_cast<float>(o.fval))
                                     : RuntimeValue::make_f64(o.fval);
    }
    throw ExecError{ExecErrorKind::BadState, "bad operand"};
  }

  std::vector<uint64_t> &region(const std::string &name) {
    auto it = memory_.find(name);
    if (it == memory_.end())
      throw ExecError{ExecErrorKind::OutOfBounds, "unknown region @" + name};
    return it->second;
  }

  RuntimeValue exec(std::map<std::string, RuntimeValue> &env, const Instruction &in,
                    int depth) {
    switch (in.op) {
      case Opcode::Add: case Opcode::Sub: case Opcode::Mul: case Opcode::SDiv:
      case Opcode::And: case Opcode::Or: case Opcode::Xor:
      case Opcode::Shl: case Opcode::LShr: case Opcode::AShr: {
        RuntimeValue a = eval(env, in.operands[0]);
        RuntimeValue b = eval(env, in.operands[1]);
        return int_binop(in, a, b);
      }
      case Opcode::FAdd: case Opcode::FSub: case Opcode::FMul: case Opcode::FDiv: {
        double a = eval(env, in.operands[0]).as_double();
        double b = eval(env, in.operands[1]).as_double();
        double r = 0;
        switch (in.op) {
          case Opcode::FAdd: r = a + b; break;
          case Opcode::FSub: r = a - b; break;
          case Opcode::FMul: r = a * b; break;
          default: r = a / b; break;   // IEEE semantics, inf/nan allowed
        }
        if (in.type == IrType::F32) return RuntimeValue::make_f32(static_cast<float>(r));
        return RuntimeValue::make_f64(r);
      }
      case Opcode::ICmp: {
        RuntimeValue av = eval(env, in.operands[0]);
        RuntimeValue bv = eval(env, in.operands[1]);
        bool r;
        if (in.pred >= Predicate::Ult) {
          uint64_t a = av.bits, b = bv.bits;
          switch (in.pred) {
            case Predicate::Ult: r = a < b; break;
            case Predicate::Ule: r = a <= b; break;
            case Predicate::Ugt: r = a > b; break;
            default: r = a >= b; break;
          }
        } else {
          long long a = av.as_int(), b = bv.as_int();
          switch (in.pred) {
            case Predicate::Eq: r = a == b; break;
            case Predicate::Ne: r = a != b; break;
            case Predicate::Slt: r = a < b; break;
            case Predicate::Sle: r = a <= b; break;
            case Predicate::Sgt: r = a > b; break;
            default: r = a >= b; break;
          }
        }
        return RuntimeValue::make_int(IrType::I1, r ? 1 : 0);
      }
      case Opcode::FCmp: {
        double a = eval(env, in.operands[0]).as_double();
        double b = eval(env, in.operands[1]).as_double();
        bool ordered = !(std::isnan(a) || std::isnan(b));
        bool r = false;
        if (ordered) switch (in.pred) {
            case Predicate::OEq: r = a == b; break;
            case Predicate::ONe: r = a != b; break;
            case Predicate::OLt: r = a < b; break;
            case Predicate::OLe: r = a <= b; break;
            case Predicate::OGt: r = a > b; break;
            default: r = a >= b; break;
          }
        return RuntimeValue::make_int(IrType::I1, r ? 1 : 0);
      }
      case Opcode::SExt:
        return RuntimeValue::make_int(in.type, eval(env, in.operands[0]).as_int());
      case Opcode::ZExt:
        return RuntimeValue::make_int(in.type,
                                      static_cast<long long>(eval(env, in.operands[0]).bits));
      case Opcode::Trunc:
        return RuntimeValue::make_int(in.type,
                                      static_cast<long long>(eval(env, in.operands[0]).bits));
      case Opcode::Select: {
        bool c = eval(env, in.operands[0]).bits & 1;
        return eval(env, in.operands[c ? 1 : 2]);
      }
      case Opcode::Load: {
        RuntimeValue p = eval(env, in.operands[0]);
        auto &cells = region(p.region);
        long long off = p.addr_offset();
        if (off < 0 || static_cast<size_t>(off) >= cells.size())
          throw ExecError{ExecErrorKind::OutOfBounds,
                          "load out of bounds at @" + p.region + "+" + std::to_string(off)};
        uint64_t raw = cells[static_cast<size_t>(off)];
        RuntimeValue r;
        r.type = in.type;
        r.bits = truncate_to(in.type, raw);
        if (in.type == IrType::F32) r.bits = raw & 0xffffffffull;
        return r;
      }
      case Opcode::Store: {
        RuntimeValue v = eval(env, in.operands[0]);
        RuntimeValue p = eval(env, in.operands[1]);
        auto &cells = region(p.region);
        long long off = p.addr_offset();
        if (off < 0 || static_cast<size_t>(off) >= cells.size())
          throw ExecError{ExecErrorKind::OutOfBounds,
                          "store out of bounds at @" + p.region + "+" + std::to_string(off)};
        cells[static_cast<size_t>(off)] = v.bits;
        return {};
      }
      case Opcode::Alloca: {
        std::string name = "$a." + std::to_string(alloca_counter_++);
        memory_[name].assign(1, 0);
        return RuntimeValue::make_addr(name, 0);
      }
      case Opcode::Gep: {
        RuntimeValue p = eval(env, in.operands[0]);
        long long idx = eval(env, in.operands[1]).as_int();
        return RuntimeValue::make_addr(p.region, p.addr_offset() + idx);
      }
      case Opcode::Call: {
        std::vector<RuntimeValue> args;
        args.reserve(in.operands.size());
        for (const auto &o : in.operands) args.push_back(eval(env, o));
        return run(in.callee, args, depth + 1);
      }
      default:
        throw ExecError{ExecErrorKind::BadState, "unexpected opcode in exec"};
    }
  }

  RuntimeValue int_binop(const Instruction &in, const RuntimeValue &av,
                         const RuntimeValue &bv) {
    int width = int_bits(in.type);
    uint64_t a = av.bits, b = bv.bits;
    uint64_t r = 0;
    switch (in.op) {
      case Opcode::Add: r = a + b; break;   // two's-complement wrap
      case Opcode::Sub: r = a - b; break;
      case Opcode::Mul: r = a * b; break;
      case Opcode::SDiv: {
        long long sa = av.as_int(), sb = bv.as_int();
        if (sb == 0)
          throw ExecError{ExecErrorKind::DivisionByZero, "sdiv by zero"};
        if (sb == -1)
          r = (~a + 1);   // wraps INT_MIN / -1 instead of trapping
        else
          r = static_cast<uint64_t>(sa / sb);
        break;
      }
      case Opcode::And: r = a & b; break;
      case Opcode::Or: r = a | b; break;
      case Opcode::Xor: r = a ^ b; break;
      case Opcode::Shl: r = a << (b & (width - 1)); break;
      case Opcode::LShr: r = a >> (b & (width - 1)); break;
      case Opcode::AShr: {
        long long sa = av.as_int();
        r = static_cast<uint64_t>(sa >> (b & (width - 1)));
        break;
      }
      default: break;
    }
    return RuntimeValue::make_int(in.type, static_cast<long long>(r));
  }

  const IrModule &mod_;
  const RunOptions &opts_;
  MemoryState memory_;
  uint64_t steps_ = 0;
  uint64_t alloca_counter_ = 0;
  std::vector<TraceEntry> trace_;
};

}  // namespace

RunOutcome run_function(const IrModule &m, const std::string &fname,
                        const std::vector<RuntimeValue> &args,
                        const MemoryState &mem_init, const RunOptions &opts) {
  RunOutcome out;
  Machine machine(m, mem_init, opts);
  try {
    out.result.ret = machine.run(fname, args, 0);
    out.result.memory_after = machine.snapshot_globals();
    out.result.dyn_instr_count = machine.steps();
    out.result.trace = machine.take_trace();
    out.ok = true;
  } catch (ExecError &e) {
    out.ok = false;
    out.error = std::move(e);
    out.result.dyn_instr_count = machine.steps();
  }
  return out;
}

std::string trace_to_string(const std::vector<TraceEntry> &trace) {
  std::ostringstream os;
  for (const auto &t : trace)
    os << t.block << ':' << t.index << ' ' << opcode_name(t.op) << '\n';
  return os.str();
}

}  // namespace irmerge
