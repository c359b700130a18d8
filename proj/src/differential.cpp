#include "irmerge/differential.hpp"

#include <algorithm>
#include <sstream>

#include "irmerge/rng.hpp"

namespace irmerge {

namespace {

RuntimeValue draw_scalar(Rng &rng, IrType t) {
  switch (t) {
    case IrType::I1: return RuntimeValue::make_int(t, static_cast<long long>(rng.below(2)));
    case IrType::I32:
    case IrType::I64: return RuntimeValue::make_int(t, rng.range(-32768, 32768));
    case IrType::F32: return RuntimeValue::make_f32(static_cast<float>(rng.uniform(-1e3, 1e3)));
    case IrType::F64: return RuntimeValue::make_f64(rng.uniform(-1e3, 1e3));
    case IrType::Addr: break;
  }
  return {};
}

void fill_region(Rng &rng, std::vector<uint64_t> &cells) {
  for (auto &c : cells)
    c = static_cast<uint64_t>(rng.range(-100, 101));
}

std::string kind_name(ExecErrorKind k) {
  switch (k) {
    case ExecErrorKind::StepLimitExceeded: return "step-limit";
    case ExecErrorKind::DivisionByZero: return "div-by-zero";
    case ExecErrorKind::OutOfBounds: return "out-of-bounds";
    case ExecErrorKind::CallDepthExceeded: return "call-depth";
    case ExecErrorKind::BadState: return "bad-state";
  }
  return "?";
}

// nullopt-style: empty string means the sides agree
std::string compare_sides(const RunOutcome &orig, const RunOutcome &merged) {
  if (!orig.ok || !merged.ok) {
    // merges must not change memory-safety or termination behavior, so only
    // matching division-by-zero counts as agreement
    if (!orig.ok && !merged.ok &&
        orig.error.kind == ExecErrorKind::DivisionByZero &&
        merged.error.kind == ExecErrorKind::DivisionByZero)
      return {};
    std::ostringstream os;
    os << "original " << (orig.ok ? "ok" : kind_name(orig.error.kind)) << ", merged "
       << (merged.ok ? "ok" : kind_name(merged.error.kind));
    return os.str();
  }
  if (!runtime_equal(orig.result.ret, merged.result.ret))
    return "return value differs: " + runtime_to_string(orig.result.ret) + " vs " +
           runtime_to_string(merged.result.ret);
  if (orig.result.memory_after != merged.result.memory_after) {
    for (const auto &[name, cells] : orig.result.memory_after) {
      auto it = merged.result.memory_after.find(name);
      if (it == merged.result.memory_after.end()) return "region @" + name + " missing";
      if (it->second != cells) return "memory differs in @" + name;
    }
    return "merged run created extra regions";
  }
  return {};
}

}  // namespace

std::vector<RuntimeValue> map_args_for(const ParamMap &pm, int which_fn,
                                       const std::vector<RuntimeValue> &merged_args) {
  const std::vector<int> &slots = which_fn == 0 ? pm.f1_slot : pm.f2_slot;
  std::vector<RuntimeValue> args;
  args.reserve(slots.size());
  for (int s : slots) args.push_back(merged_args[static_cast<size_t>(s)]);
  return args;
}

TrialInputs draw_trial_inputs(const IrModule &orig, const IrModule &merged_mod,
                              const ParamMap &pm, uint64_t trial_seed) {
  Rng rng(trial_seed);
  TrialInputs t;
  t.merged_args.resize(pm.merged_params.size());
  for (size_t s = 1; s < pm.merged_params.size(); ++s) {
    IrType ty = pm.merged_params[s].type;
    if (ty == IrType::Addr) {
      std::string name = "$arg" + std::to_string(s);
      auto &cells = t.memory[name];
      cells.assign(64, 0);
      fill_region(rng, cells);
      t.merged_args[s] = RuntimeValue::make_addr(name, 0);
    } else {
      t.merged_args[s] = draw_scalar(rng, ty);
    }
  }
  // randomize declared regions; same name => same contents on both sides
  auto seed_declared = [&](const IrModule &m) {
    for (const auto &mem : m.memories) {
      if (t.memory.count(mem.name)) continue;
      auto &cells = t.memory[mem.name];
      cells.assign(mem.length, 0);
      fill_region(rng, cells);
    }
  };
  seed_declared(orig);
  seed_declared(merged_mod);
  return t;
}

DiffReport differential_check(const IrModule &orig, const std::string &f1,
                              const std::string &f2, const IrModule &merged_mod,
                              const std::string &merged, const ParamMap &pm,
                              int trials, uint64_t seed, const DiffOptions &opts) {
  DiffReport report;
  report.trials = trials;
  std::vector<std::vector<DiffMismatch>> found(static_cast<size_t>(trials));

  RunOptions ro;
  ro.step_limit = opts.step_limit;

#pragma omp parallel for schedule(dynamic) if (opts.parallel)
  for (int trial = 0; trial < trials; ++trial) {
    uint64_t trial_seed = derive_seed(seed, static_cast<uint64_t>(trial));
    TrialInputs inputs = draw_trial_inputs(orig, merged_mod, pm, trial_seed);
    for (int side = 0; side < 2; ++side) {
      std::vector<RuntimeValue> merged_args = inputs.merged_args;
      merged_args[ParamMap::kFuncIdSlot] = RuntimeValue::make_int(IrType::I1, side);
      RunOutcome o = run_function(orig, side == 0 ? f1 : f2,
                                  map_args_for(pm, side, merged_args), inputs.memory, ro);
      RunOutcome m = run_function(merged_mod, merged, merged_args, inputs.memory, ro);
      std::string diff = compare_sides(o, m);
      if (!diff.empty())
        found[static_cast<size_t>(trial)].push_back(
            {trial, trial_seed,
             "funcid=" + std::to_string(side) + ": " + diff});
    }
  }
  for (auto &per_trial : found)
    for (auto &m : per_trial) report.mismatches.push_back(std::move(m));
  return report;
}

std::string DiffReport::to_string() const {
  std::ostringstream os;
  os << "trials: " << trials << ", mismatches: " << mismatches.size() << '\n';
  for (const auto &m : mismatches)
    os << "  trial " << m.trial << " seed " << m.seed << ": " << m.detail << '\n';
  return os.str();
}

}  // namespace irmerge
