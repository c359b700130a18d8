#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irmerge/interp.hpp"
#include "irmerge/param_map.hpp"

namespace irmerge {

struct DiffMismatch {
  int trial = 0;
  uint64_t seed = 0;
  std::string detail;
};

struct DiffReport {
  int trials = 0;
  std::vector<DiffMismatch> mismatches;
  bool passed() const { return mismatches.empty(); }
  std::string to_string() const;
};

struct DiffOptions {
  uint64_t step_limit = 200000;
  bool parallel = true;
};

// Differential testing of a merged function against its two originals.
// Every trial draws one shared argument/memory environment, then compares
// f1 against merged(funcid=0) and f2 against merged(funcid=1): return value
// and final memory must agree bit-exactly. Interpreter errors agree only
// when both sides divide by zero; any out-of-bounds or step-limit outcome
// is reported as a mismatch.
DiffReport differential_check(const IrModule &orig, const std::string &f1,
                              const std::string &f2, const IrModule &merged_mod,
                              const std::string &merged, const ParamMap &pm,
                              int trials, uint64_t seed, const DiffOptions &opts = {});

// Args and fresh backing regions for one trial; shared by the latency-proxy
// measurement in the CLI so both use the same sampling policy.
struct TrialInputs {
  std::vector<RuntimeValue> merged_args;   // slot 0 (funcid) left unset
  MemoryState memory;
};
TrialInputs draw_trial_inputs(const IrModule &orig, const IrModule &merged_mod,
                              const ParamMap &pm, uint64_t trial_seed);
std::vector<RuntimeValue> map_args_for(const ParamMap &pm, int which_fn,
                                       const std::vector<RuntimeValue> &merged_args);

}  // namespace irmerge
