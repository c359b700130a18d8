#pragma once

#include <vector>

#include "irmerge/ir.hpp"

namespace irmerge {

// How the two input parameter lists fold into the merged signature. Slot 0
// is always the i1 function identifier (0 selects f1, 1 selects f2);
// type-compatible parameters share a slot.
struct ParamMap {
  static constexpr int kFuncIdSlot = 0;

  std::vector<Param> merged_params;
  std::vector<int> f1_slot;   // f1 param index -> merged slot
  std::vector<int> f2_slot;

  size_t shared_count() const;   // slots serving both functions
};

// Greedy first-fit sharing: f1 params claim slots in order, then each f2
// param takes the first unclaimed f1 slot of its type; leftovers append.
ParamMap merge_parameters(const IrFunction &f1, const IrFunction &f2);

}  // namespace irmerge
