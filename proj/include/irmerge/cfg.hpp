#pragma once

#include <vector>

#include "irmerge/ir.hpp"

namespace irmerge {

// Block-level control-flow analysis: successors/predecessors, dominator
// tree (Cooper-Harvey-Kennedy), and dominance frontiers.
struct Cfg {
  int num_blocks = 0;
  std::vector<std::vector<int>> succs;
  std::vector<std::vector<int>> preds;
  std::vector<int> rpo;          // reverse postorder over reachable blocks
  std::vector<int> rpo_index;    // -1 for unreachable blocks
  std::vector<int> idom;         // immediate dominator; entry -> itself; unreachable -> -1
  std::vector<int> dom_depth;
  std::vector<std::vector<int>> dom_children;
  std::vector<std::vector<int>> frontier;

  bool reachable(int b) const { return rpo_index[b] >= 0; }
  // a dominates b (reflexive)
  bool dominates(int a, int b) const;
};

Cfg build_cfg(const IrFunction &f);

// Iterated dominance frontier of a set of definition blocks.
std::vector<int> iterated_frontier(const Cfg &cfg, const std::vector<int> &def_blocks);

}  // namespace irmerge
