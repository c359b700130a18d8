// Compares single-threaded and OpenMP execution of the two hot paths:
// differential verification trials and the forest training grid.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "irmerge/codegen.hpp"
#include "irmerge/differential.hpp"
#include "irmerge/forest.hpp"
#include "irmerge/parser.hpp"
#include "irmerge/rng.hpp"

using namespace irmerge;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const char *kPair = R"(
func @poly(%p: addr, %n: i32) -> i32 {
entry:
  br loop
loop:
  %i = phi i32 [ 0, entry ], [ %i2, loop ]
  %acc = phi i32 [ 0, entry ], [ %acc2, loop ]
  %im = and i32 %i, 63
  %im64 = sext i32 %im to i64
  %q = gep %p, i64 %im64
  %v = load i32 %q
  %sq = mul i32 %v, %v
  %acc2 = add i32 %acc, %sq
  %i2 = add i32 %i, 1
  %nm = and i32 %n, 31
  %c = icmp slt i32 %i2, %nm
  condbr %c, loop, exit
exit:
  ret i32 %acc2
}

func @mix(%p: addr, %n: i32) -> i32 {
entry:
  br loop
loop:
  %i = phi i32 [ 0, entry ], [ %i2, loop ]
  %acc = phi i32 [ 1, entry ], [ %acc2, loop ]
  %im = and i32 %i, 63
  %im64 = sext i32 %im to i64
  %q = gep %p, i64 %im64
  %v = load i32 %q
  %sh = shl i32 %v, 2
  %acc2 = xor i32 %acc, %sh
  %i2 = add i32 %i, 1
  %nm = and i32 %n, 31
  %c = icmp slt i32 %i2, %nm
  condbr %c, loop, exit
exit:
  ret i32 %acc2
}
)";

std::vector<TrainRow> synthetic_rows(int n, uint64_t seed) {
  Rng rng(seed);
  std::vector<TrainRow> rows;
  for (int r = 0; r < n; ++r) {
    TrainRow row;
    row.features.resize(kNumOpcodes);
    for (auto &f : row.features) f = static_cast<double>(rng.range(-4, 12));
    row.target = 3.0 * row.features[2] + 1.5 * row.features[20] - row.features[25] +
                 rng.uniform(-0.5, 0.5);
    rows.push_back(std::move(row));
  }
  return rows;
}

void set_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace

int main() {
  int hw = max_threads();
  std::printf("threads available: %d\n\n", hw);

  // differential trials
  ParseResult pr = parse_module(kPair);
  if (!pr.ok()) {
    std::fprintf(stderr, "%s", pr.diag_text().c_str());
    return 1;
  }
  const IrFunction &f1 = pr.module.functions[0];
  const IrFunction &f2 = pr.module.functions[1];
  MergeResult mr = merge_with_model(f1, f2, AlignmentModel::named(ModelKind::Arithmetic),
                                    MergeMode::SsaGlobal);
  IrModule merged_mod = build_merged_module(pr.module, f1, f2, mr);
  const int kTrials = 4000;

  std::printf("%-34s %10s %10s\n", "benchmark", "serial(s)", "omp(s)");
  {
    set_threads(1);
    auto t0 = Clock::now();
    DiffReport serial = differential_check(pr.module, f1.name, f2.name, merged_mod,
                                           merged_mod.functions.back().name,
                                           mr.param_map, kTrials, 7);
    double ts = seconds_since(t0);
    set_threads(hw);
    t0 = Clock::now();
    DiffReport par = differential_check(pr.module, f1.name, f2.name, merged_mod,
                                        merged_mod.functions.back().name, mr.param_map,
                                        kTrials, 7);
    double tp = seconds_since(t0);
    bool same = serial.mismatches.size() == par.mismatches.size();
    std::printf("%-34s %10.3f %10.3f%s\n", "differential trials (4000)", ts, tp,
                same ? "" : "  RESULTS DIFFER");
  }

  // forest grid search (reduced grid: one fraction slice via fewer rows)
  {
    std::vector<TrainRow> rows = synthetic_rows(200, 11);
    TrainConfig cfg;
    cfg.cv_folds = 3;
    cfg.seed = 5;
    set_threads(1);
    auto t0 = Clock::now();
    TrainReport rep_s;
    ForestModel ms = train_forest(rows, opcode_feature_names(), cfg, &rep_s);
    double ts = seconds_since(t0);
    set_threads(hw);
    t0 = Clock::now();
    TrainReport rep_p;
    ForestModel mp = train_forest(rows, opcode_feature_names(), cfg, &rep_p);
    double tp = seconds_since(t0);
    bool same = forest_to_text(ms) == forest_to_text(mp);
    std::printf("%-34s %10.3f %10.3f%s\n", "forest grid search (300 pts)", ts, tp,
                same ? "" : "  RESULTS DIFFER");
  }
  return 0;
}
