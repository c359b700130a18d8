#pragma once

#include <vector>

#include "irmerge/ir.hpp"

namespace irmerge {

// One element of a linearized CFG: a block boundary or an instruction.
struct LinearItem {
  enum class Kind : uint8_t { BlockMarker, Instr };
  Kind kind = Kind::Instr;
  int block = 0;
  int instr = -1;          // Instr only

  static LinearItem marker(int block) { return {Kind::BlockMarker, block, -1}; }
  static LinearItem instruction(int block, int instr) {
    return {Kind::Instr, block, instr};
  }
  bool is_marker() const { return kind == Kind::BlockMarker; }
};

struct LinearSeq {
  const IrFunction *fn = nullptr;
  std::vector<LinearItem> items;

  const Instruction &instr_at(size_t idx) const {
    const LinearItem &it = items[idx];
    return fn->blocks[static_cast<size_t>(it.block)].instrs[static_cast<size_t>(it.instr)];
  }
  size_t size() const { return items.size(); }
};

// Blocks in layout order, one marker per block, instructions in program
// order. include_phis=false drops phi instructions from the sequence (they
// stay in the function and are handled by SSA-aware code generation).
LinearSeq linearize(const IrFunction &f, bool include_phis);

struct Reg2MemResult {
  IrFunction fn;
  std::vector<bool> is_demotion;   // per flat instruction index of fn
};

// Register demotion: each phi becomes an entry-block alloca, one store per
// incoming edge and a load at the phi's position.
Reg2MemResult reg2mem_tracked(const IrFunction &f);
IrFunction reg2mem(const IrFunction &f);

struct Mem2RegResult {
  IrFunction fn;
  // old flat instruction index -> new flat index, -1 for deleted ops
  std::vector<int> old_to_new;
  // flat indices (in fn) of phis this pass inserted
  std::vector<int> inserted_phis;
};

// Promotes entry-block allocas whose address never escapes back to SSA
// values, inserting phis at (pruned) iterated dominance frontiers. Loads
// with no reaching store read the alloca's zero initialization.
Mem2RegResult mem2reg_tracked(const IrFunction &f);
IrFunction mem2reg(const IrFunction &f);

}  // namespace irmerge
