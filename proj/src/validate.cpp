#include "irmerge/validate.hpp"

#include <map>
#include <set>

#include "irmerge/cfg.hpp"

namespace irmerge {

namespace {

struct DefSite {
  IrType type;
  int block = -1;   // -1: parameter
  int index = -1;
};

class FunctionValidator {
 public:
  FunctionValidator(const IrModule &m, const IrFunction &f,
                    std::vector<std::string> &out)
      : mod_(m), fn_(f), out_(out) {}

  void run() {
    if (fn_.blocks.empty()) {
      report("function has no blocks");
      return;
    }
    collect_defs();
    check_block_shapes();
    if (structure_ok_) {
      cfg_ = build_cfg(fn_);
      check_phis_against_preds();
      check_instructions();
    }
  }

 private:
  void report(const std::string &msg) { out_.push_back(msg + " in @" + fn_.name); }

  void report_at(int block, const std::string &msg) {
    out_.push_back(msg + " in @" + fn_.name + ":" + fn_.blocks[block].label);
  }

  void collect_defs() {
    for (size_t i = 0; i < fn_.params.size(); ++i) {
      if (!defs_.emplace(fn_.params[i].name, DefSite{fn_.params[i].type, -1, -1}).second)
        report("duplicate parameter %" + fn_.params[i].name);
    }
    for (size_t b = 0; b < fn_.blocks.size(); ++b) {
      for (size_t i = 0; i < fn_.blocks[b].instrs.size(); ++i) {
        const Instruction &in = fn_.blocks[b].instrs[i];
        if (!in.has_result()) continue;
        IrType rt = in.type;
        if (in.op == Opcode::ICmp || in.op == Opcode::FCmp) rt = IrType::I1;
        if (in.op == Opcode::Alloca || in.op == Opcode::Gep) rt = IrType::Addr;
        if (!defs_.emplace(in.result, DefSite{rt, static_cast<int>(b), static_cast<int>(i)})
                 .second)
          report_at(static_cast<int>(b), "duplicate definition of %" + in.result);
      }
    }
  }

  void check_block_shapes() {
    std::set<std::string> labels;
    for (const auto &b : fn_.blocks)
      if (!labels.insert(b.label).second) report("duplicate block label '" + b.label + "'");

    for (size_t bi = 0; bi < fn_.blocks.size(); ++bi) {
      const auto &b = fn_.blocks[bi];
      if (b.instrs.empty()) {
        report_at(static_cast<int>(bi), "empty block");
        structure_ok_ = false;
        continue;
      }
      int terms = 0;
      size_t last_term = 0;
      bool past_phis = false;
      for (size_t i = 0; i < b.instrs.size(); ++i) {
        const Instruction &in = b.instrs[i];
        if (in.is_term()) {
          ++terms;
          last_term = i;
        }
        if (in.op == Opcode::Phi) {
          if (past_phis) report_at(static_cast<int>(bi), "phi after non-phi instruction");
          if (bi == 0) report_at(static_cast<int>(bi), "phi in entry block");
        } else {
          past_phis = true;
        }
        for (const auto &label : in.labels)
          if (fn_.block_index(label) < 0)
            report_at(static_cast<int>(bi), "reference to unknown block '" + label + "'");
        if (in.op == Opcode::Phi)
          for (const auto &inc : in.incomings)
            if (fn_.block_index(inc.pred) < 0)
              report_at(static_cast<int>(bi),
                        "phi incoming from unknown block '" + inc.pred + "'");
      }
      if (terms > 1) {
        report_at(static_cast<int>(bi), "multiple terminators");
        structure_ok_ = false;
      } else if (terms == 0) {
        report_at(static_cast<int>(bi), "block does not end with a terminator");
        structure_ok_ = false;
      } else if (last_term + 1 != b.instrs.size()) {
        report_at(static_cast<int>(bi), "terminator before end of block");
        structure_ok_ = false;
      }
    }
  }

  // Executable phis must cover exactly the reachable CFG predecessors.
  void check_phis_against_preds() {
    for (size_t bi = 0; bi < fn_.blocks.size(); ++bi) {
      if (!cfg_.reachable(static_cast<int>(bi))) continue;
      std::set<int> preds(cfg_.preds[bi].begin(), cfg_.preds[bi].end());
      for (const auto &in : fn_.blocks[bi].instrs) {
        if (in.op != Opcode::Phi) continue;
        std::set<int> covered;
        for (const auto &inc : in.incomings) {
          int p = fn_.block_index(inc.pred);
          if (p < 0) continue;  // reported already
          if (!covered.insert(p).second)
            report_at(static_cast<int>(bi),
                      "phi %" + in.result + " has duplicate incoming '" + inc.pred + "'");
        }
        for (int p : preds)
          if (!covered.count(p))
            report_at(static_cast<int>(bi), "phi %" + in.result +
                                                " missing incoming for predecessor '" +
                                                fn_.blocks[p].label + "'");
      }
    }
  }

  bool def_dominates_use(const DefSite &d, int use_block, int use_index) {
    if (d.block < 0) return true;  // parameter
    if (d.block == use_block) return d.index < use_index;
    return cfg_.dominates(d.block, use_block);
  }

  void check_operand(const Operand &o, IrType want, int bi, int ii, const Instruction &in) {
    if (o.type != want) {
      report_at(bi, "operand of %" + std::string(opcode_name(in.op)) + " has type " +
                        type_name(o.type) + ", expected " + type_name(want));
      return;
    }
    if (o.kind != Operand::Kind::Value) {
      if (o.kind == Operand::Kind::ConstInt && !is_int_type(want))
        report_at(bi, "integer constant used as " + std::string(type_name(want)));
      if (o.kind == Operand::Kind::ConstFloat && !is_float_type(want))
        report_at(bi, "float constant used as " + std::string(type_name(want)));
      return;
    }
    auto it = defs_.find(o.name);
    if (it == defs_.end()) {
      report_at(bi, "undefined value %" + o.name);
      return;
    }
    if (it->second.type != want) {
      report_at(bi, "%" + o.name + " has type " + type_name(it->second.type) +
                        ", expected " + type_name(want));
      return;
    }
    if (in.op != Opcode::Phi && cfg_.reachable(bi) &&
        !def_dominates_use(it->second, bi, ii))
      report_at(bi, "use of %" + o.name + " is not dominated by its definition");
  }

  void check_instructions() {
    for (size_t bi = 0; bi < fn_.blocks.size(); ++bi) {
      for (size_t ii = 0; ii < fn_.blocks[bi].instrs.size(); ++ii) {
        const Instruction &in = fn_.blocks[bi].instrs[ii];
        std::vector<IrType> want;
        switch (in.op) {
          case Opcode::Add: case Opcode::Sub: case Opcode::Mul: case Opcode::SDiv:
          case Opcode::Shl: case Opcode::LShr: case Opcode::AShr:
            want = {in.type, in.type};
            if (in.type != IrType::I32 && in.type != IrType::I64)
              report_at(static_cast<int>(bi),
                        std::string(opcode_name(in.op)) + " requires i32 or i64");
            break;
          case Opcode::And: case Opcode::Or: case Opcode::Xor:
            want = {in.type, in.type};
            if (!is_int_type(in.type))
              report_at(static_cast<int>(bi),
                        std::string(opcode_name(in.op)) + " requires an integer type");
            break;
          case Opcode::FAdd: case Opcode::FSub: case Opcode::FMul: case Opcode::FDiv:
            want = {in.type, in.type};
            if (!is_float_type(in.type))
              report_at(static_cast<int>(bi),
                        std::string(opcode_name(in.op)) + " requires f32 or f64");
            break;
          case Opcode::ICmp: case Opcode::FCmp:
            want = {in.type, in.type};
            break;
          case Opcode::SExt: case Opcode::ZExt: case Opcode::Trunc:
            if (!in.operands.empty()) want = {in.operands[0].type};
            break;
          case Opcode::Select:
            want = {IrType::I1, in.type, in.type};
            break;
          case Opcode::Load:
            want = {IrType::Addr};
            if (in.type == IrType::Addr) report_at(static_cast<int>(bi), "load of addr");
            break;
          case Opcode::Store:
            want = {in.type, IrType::Addr};
            if (in.type == IrType::Addr) report_at(static_cast<int>(bi), "store of addr");
            break;
          case Opcode::Alloca:
            if (in.type == IrType::Addr) report_at(static_cast<int>(bi), "alloca of addr");
            break;
          case Opcode::Gep:
            want = {IrType::Addr, in.type};
            break;
          case Opcode::Br:
            break;
          case Opcode::CondBr:
            want = {IrType::I1};
            break;
          case Opcode::Switch:
            want = {in.type};
            break;
          case Opcode::Phi: {
            for (const auto &inc : in.incomings) {
              // the use is logically at the end of the incoming block
              if (inc.value.kind == Operand::Kind::Value) {
                auto it = defs_.find(inc.value.name);
                if (it == defs_.end()) {
                  report_at(static_cast<int>(bi), "undefined value %" + inc.value.name);
                  continue;
                }
                if (it->second.type != in.type) {
                  report_at(static_cast<int>(bi),
                            "phi incoming %" + inc.value.name + " has type " +
                                type_name(it->second.type));
                  continue;
                }
                int p = fn_.block_index(inc.pred);
                if (p >= 0 && cfg_.reachable(p) &&
                    !def_dominates_use(it->second, p,
                                       static_cast<int>(fn_.blocks[p].instrs.size())))
                  report_at(static_cast<int>(bi),
                            "phi incoming %" + inc.value.name +
                                " does not dominate predecessor '" + inc.pred + "'");
              } else if (inc.value.type != in.type) {
                report_at(static_cast<int>(bi), "phi incoming constant type mismatch");
              }
            }
            break;
          }
          case Opcode::Ret:
            want = {in.type};
            if (in.type != fn_.ret_type)
              report_at(static_cast<int>(bi), "ret type does not match function return type");
            break;
          case Opcode::Call: {
            const IrFunction *callee = mod_.find_function(in.callee);
            if (!callee) {
              report_at(static_cast<int>(bi), "call to unknown function @" + in.callee);
              break;
            }
            if (callee->ret_type != in.type)
              report_at(static_cast<int>(bi), "call type mismatch for @" + in.callee);
            if (in.operands.size() != callee->params.size()) {
              report_at(static_cast<int>(bi), "call arity mismatch for @" + in.callee);
              break;
            }
            for (const auto &p : callee->params) want.push_back(p.type);
            break;
          }
        }
        if (!want.empty() && in.operands.size() != want.size()) {
          report_at(static_cast<int>(bi),
                    std::string("wrong operand count for ") + opcode_name(in.op));
          continue;
        }
        for (size_t k = 0; k < want.size(); ++k)
          check_operand(in.operands[k], want[k], static_cast<int>(bi),
                        static_cast<int>(ii), in);
      }
    }
  }

  const IrModule &mod_;
  const IrFunction &fn_;
  std::vector<std::string> &out_;
  std::map<std::string, DefSite> defs_;
  Cfg cfg_;
  bool structure_ok_ = true;
};

}  // namespace

std::vector<std::string> validate_function(const IrModule &m, const IrFunction &f) {
  std::vector<std::string> out;
  FunctionValidator(m, f, out).run();
  return out;
}

std::vector<std::string> validate(const IrModule &m) {
  std::vector<std::string> out;
  std::set<std::string> fn_names, mem_names;
  for (const auto &mem : m.memories) {
    if (!mem_names.insert(mem.name).second)
      out.push_back("duplicate memory @" + mem.name);
    if (mem.elem_type == IrType::Addr)
      out.push_back("memory @" + mem.name + " has addr elements");
    if (mem.length == 0) out.push_back("memory @" + mem.name + " has zero length");
  }
  for (const auto &f : m.functions) {
    if (!fn_names.insert(f.name).second) out.push_back("duplicate function @" + f.name);
    FunctionValidator(m, f, out).run();
  }
  return out;
}

}  // namespace irmerge
