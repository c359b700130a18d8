#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "irmerge/codegen.hpp"
#include "irmerge/differential.hpp"
#include "irmerge/ensemble.hpp"
#include "irmerge/parser.hpp"
#include "irmerge/printer.hpp"
#include "irmerge/rng.hpp"
#include "irmerge/validate.hpp"

using namespace irmerge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBadInput = 3;

struct CliError {
  int code;
  std::string message;
};

IrModule load_module(const std::string &path) {
  ParseResult pr = parse_file(path);
  if (!pr.ok()) throw CliError{kExitBadInput, path + ":\n" + pr.diag_text()};
  return std::move(pr.module);
}

// Two input files describe one module; duplicate names must agree.
IrModule combine_modules(const std::string &path_a, const std::string &path_b) {
  IrModule a = load_module(path_a);
  if (path_a == path_b) return a;
  IrModule b = load_module(path_b);
  for (auto &mem : b.memories) {
    const MemRegion *have = a.find_memory(mem.name);
    if (!have) {
      a.memories.push_back(mem);
    } else if (have->elem_type != mem.elem_type || have->length != mem.length) {
      throw CliError{kExitBadInput, "memory @" + mem.name + " declared differently in " +
                                        path_a + " and " + path_b};
    }
  }
  for (auto &fn : b.functions) {
    const IrFunction *have = a.find_function(fn.name);
    if (!have) {
      a.functions.push_back(std::move(fn));
    } else if (!structurally_equal(*have, fn)) {
      throw CliError{kExitBadInput, "function @" + fn.name + " defined differently in " +
                                        path_a + " and " + path_b};
    }
  }
  return a;
}

const IrFunction &pick_function(const IrModule &m, const std::string &wanted,
                                const std::string &path) {
  if (!wanted.empty()) {
    const IrFunction *f = m.find_function(wanted);
    if (!f) throw CliError{kExitBadInput, "no function @" + wanted + " in " + path};
    return *f;
  }
  if (m.functions.empty()) throw CliError{kExitBadInput, "no functions in " + path};
  return m.functions.front();
}

AlignmentModel model_arg(const std::string &name) {
  auto k = model_from_name(name);
  if (!k) throw CliError{kExitUsage, "unknown model '" + name + "'"};
  return AlignmentModel::named(*k);
}

MergeMode mode_arg(const std::string &name) {
  auto m = merge_mode_from_name(name);
  if (!m) throw CliError{kExitUsage, "unknown mode '" + name + "'"};
  return *m;
}

EnergyProxyWeights energy_arg(const std::string &spec) {
  EnergyProxyWeights e;
  if (spec.empty()) return e;
  if (std::sscanf(spec.c_str(), "%lf,%lf,%lf", &e.lut, &e.ff, &e.dsp) != 3)
    throw CliError{kExitUsage, "--energy-weights wants 'lut,ff,dsp'"};
  return e;
}

void write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path);
  if (!out) throw CliError{kExitBadInput, "cannot write " + path};
  out << content;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

struct SavingsSummary {
  int total = 0, control = 0, memory = 0, arithmetic = 0, other = 0;
};

SavingsSummary summarize(const SavingsVector &sv) {
  SavingsSummary s;
  for (int k = 0; k < kNumOpcodes; ++k) {
    int d = sv.delta[static_cast<size_t>(k)];
    s.total += d;
    switch (opcode_class(static_cast<Opcode>(k))) {
      case OpClass::Control: s.control += d; break;
      case OpClass::Memory: s.memory += d; break;
      case OpClass::Arithmetic: s.arithmetic += d; break;
      case OpClass::Other: s.other += d; break;
    }
  }
  return s;
}

// mean dynamic-instruction count over a few seeded runs; counts only trials
// where original and merged both complete
struct LatencyProxy {
  bool valid = false;
  double overhead_pct = 0.0;
};

LatencyProxy latency_proxy(const IrModule &orig, const std::string &f1,
                           const std::string &f2, const IrModule &merged_mod,
                           const std::string &merged, const ParamMap &pm,
                           uint64_t seed) {
  const int kRuns = 5;
  double sums[2][2] = {{0, 0}, {0, 0}};  // [side][orig/merged]
  int ok_runs[2] = {0, 0};
  RunOptions ro;
  for (int side = 0; side < 2; ++side) {
    for (int r = 0; r < kRuns; ++r) {
      TrialInputs in = draw_trial_inputs(orig, merged_mod, pm,
                                         derive_seed(seed ^ 0x1a7e, static_cast<uint64_t>(r)));
      std::vector<RuntimeValue> margs = in.merged_args;
      margs[0] = RuntimeValue::make_int(IrType::I1, side);
      RunOutcome o = run_function(orig, side == 0 ? f1 : f2,
                                  map_args_for(pm, side, margs), in.memory, ro);
      RunOutcome m = run_function(merged_mod, merged, margs, in.memory, ro);
      if (!o.ok || !m.ok) continue;
      sums[side][0] += static_cast<double>(o.result.dyn_instr_count);
      sums[side][1] += static_cast<double>(m.result.dyn_instr_count);
      ++ok_runs[side];
    }
  }
  LatencyProxy lp;
  if (ok_runs[0] == 0 || ok_runs[1] == 0 || sums[0][0] == 0 || sums[1][0] == 0)
    return lp;
  lp.valid = true;
  lp.overhead_pct = latency_overhead(sums[0][1] / ok_runs[0], sums[0][0] / ok_runs[0],
                                     sums[1][1] / ok_runs[1], sums[1][0] / ok_runs[1]);
  return lp;
}

// ---------------------------------------------------------------------------

struct MergeArgs {
  std::string file_a, file_b, f1, f2, mode = "ssa-global", select = "model";
  std::string model = "uniform", forest_path, weights_path, energy_spec;
  std::string out_path, prov_path;
  int trials = 100;
  uint64_t seed = 1;
  bool no_verify = false;
};

int run_merge(const MergeArgs &a) {
  IrModule mod = combine_modules(a.file_a, a.file_b);
  const IrFunction &f1 = pick_function(mod, a.f1, a.file_a);
  const IrFunction &f2 = pick_function(mod, a.f2.empty() && a.f1.empty() && mod.functions.size() > 1
                                                ? mod.functions[1].name
                                                : a.f2,
                                       a.file_b);
  if (f1.name == f2.name)
    throw CliError{kExitUsage, "merging a function with itself needs two distinct names"};
  MergeMode mode = mode_arg(a.mode);
  ResourceWeights weights =
      a.weights_path.empty() ? default_weights() : load_weights_file(a.weights_path);
  EnergyProxyWeights ew = energy_arg(a.energy_spec);

  MergeResult mr;
  std::string choice;
  if (a.select == "model") {
    mr = merge_with_model(f1, f2, model_arg(a.model), mode);
    choice = a.model;
  } else if (a.select == "exhaustive") {
    CandidateSet cs = generate_candidates(f1, f2, mode);
    ExhaustiveChoice ec = select_exhaustive(cs, weights, ew);
    mr = cs.candidates[static_cast<size_t>(ec.index)].result;
    choice = cs.candidates[static_cast<size_t>(ec.index)].model.name();
  } else if (a.select == "ensemble") {
    if (a.forest_path.empty())
      throw CliError{kExitUsage, "--select ensemble needs --forest model.txt"};
    ForestModel fm = load_forest_file(a.forest_path);
    CandidateSet cs = generate_candidates(f1, f2, mode);
    int idx = select_ensemble_index(cs, fm);
    mr = cs.candidates[static_cast<size_t>(idx)].result;
    choice = cs.candidates[static_cast<size_t>(idx)].model.name();
  } else {
    throw CliError{kExitUsage, "unknown --select '" + a.select + "'"};
  }

  IrModule out_mod = build_merged_module(mod, f1, f2, mr);
  std::string merged_name = out_mod.functions.back().name;

  bool verified_ok = true;
  DiffReport report;
  if (!a.no_verify) {
    report = differential_check(mod, f1.name, f2.name, out_mod, merged_name,
                                mr.param_map, a.trials, a.seed);
    verified_ok = report.passed();
  }

  if (!a.out_path.empty()) {
    write_file(a.out_path, print_module(out_mod));
    std::string prov = a.prov_path.empty() ? a.out_path + ".prov" : a.prov_path;
    write_file(prov, mr.provenance_dump());
  }

  SavingsVector sv = savings_vector(f1, f2, mr.merged);
  SavingsSummary ss = summarize(sv);
  ResourceEstimate e1 = estimate_resources(f1, weights, ew);
  ResourceEstimate e2 = estimate_resources(f2, weights, ew);
  ResourceEstimate em = estimate_resources(mr.merged, weights, ew);

  std::cout << "merged @" << f1.name << " + @" << f2.name << " -> @" << merged_name
            << " (" << merge_mode_name(mode) << ", " << choice << ")\n";
  std::cout << "saved instructions: " << ss.total << " (control " << ss.control
            << ", memory " << ss.memory << ", arithmetic " << ss.arithmetic << ", other "
            << ss.other << ")\n";
  std::cout << "estimate: lut " << pct(em.lut) << " ff " << pct(em.ff) << " dsp "
            << pct(em.dsp) << " energy-proxy " << pct(em.energy_proxy) << "\n";
  std::cout << "energy-proxy improvement: "
            << pct(improvement(e1.energy_proxy, e2.energy_proxy, em.energy_proxy))
            << "%\n";
  if (!a.no_verify) {
    std::cout << (verified_ok ? "verification: ok (" : "verification: FAILED (")
              << a.trials << " trials)\n";
    if (!verified_ok) std::cout << report.to_string();
  }
  return verified_ok ? kExitOk : kExitVerifyFailed;
}

struct AlignArgs {
  std::string file_a, file_b, f1, f2, model = "uniform";
  bool include_phis = false;
};

int run_align(const AlignArgs &a) {
  IrModule mod = combine_modules(a.file_a, a.file_b);
  const IrFunction &f1 = pick_function(mod, a.f1, a.file_a);
  const IrFunction &f2 = pick_function(mod, a.f2.empty() && a.f1.empty() && mod.functions.size() > 1
                                                ? mod.functions[1].name
                                                : a.f2,
                                       a.file_b);
  LinearSeq sa = linearize(f1, a.include_phis);
  LinearSeq sb = linearize(f2, a.include_phis);
  Alignment alg = nw_align(sa, sb, model_arg(a.model));
  std::cout << alignment_to_string(alg, sa, sb);
  std::cout << "score " << alg.score << "\n";
  return kExitOk;
}

struct EstimateArgs {
  std::string file, func, weights_path, energy_spec;
};

int run_estimate(const EstimateArgs &a) {
  IrModule mod = load_module(a.file);
  ResourceWeights w =
      a.weights_path.empty() ? default_weights() : load_weights_file(a.weights_path);
  EnergyProxyWeights ew = energy_arg(a.energy_spec);
  for (const auto &fn : mod.functions) {
    if (!a.func.empty() && fn.name != a.func) continue;
    ResourceEstimate e = estimate_resources(fn, w, ew);
    std::cout << "@" << fn.name << " lut " << pct(e.lut) << " ff " << pct(e.ff)
              << " dsp " << pct(e.dsp) << " energy-proxy " << pct(e.energy_proxy)
              << "\n";
  }
  return kExitOk;
}

struct VerifyArgs {
  std::string file_a, file_b, file_merged, f1, f2, merged;
  int trials = 100;
  uint64_t seed = 1;
};

int run_verify(const VerifyArgs &a) {
  IrModule orig = combine_modules(a.file_a, a.file_b);
  IrModule merged_mod = load_module(a.file_merged);
  const IrFunction &f1 = pick_function(orig, a.f1, a.file_a);
  const IrFunction &f2 = pick_function(orig, a.f2.empty() && a.f1.empty() && orig.functions.size() > 1
                                                 ? orig.functions[1].name
                                                 : a.f2,
                                       a.file_b);
  std::string merged_name = a.merged;
  if (merged_name.empty()) {
    if (merged_mod.functions.empty())
      throw CliError{kExitBadInput, "no functions in " + a.file_merged};
    merged_name = merged_mod.functions.back().name;  // merged output is appended last
  } else if (!merged_mod.find_function(merged_name)) {
    throw CliError{kExitBadInput, "no function @" + merged_name + " in " + a.file_merged};
  }
  ParamMap pm = merge_parameters(f1, f2);
  if (merged_mod.find_function(merged_name)->params.size() != pm.merged_params.size())
    throw CliError{kExitBadInput,
                   "merged function arity does not match merge_parameters(f1, f2)"};
  DiffReport report = differential_check(orig, f1.name, f2.name, merged_mod, merged_name,
                                         pm, a.trials, a.seed);
  std::cout << report.to_string();
  return report.passed() ? kExitOk : kExitVerifyFailed;
}

struct TrainArgs {
  std::string data_path, out_path, report_path;
  int folds = 5;
  uint64_t seed = 1;
};

int run_train(const TrainArgs &a) {
  std::ifstream in(a.data_path);
  if (!in) throw CliError{kExitBadInput, "cannot open " + a.data_path};
  std::stringstream ss;
  ss << in.rdbuf();
  std::vector<std::string> names;
  std::vector<TrainRow> rows;
  try {
    rows = train_rows_from_csv(ss.str());
    names = opcode_feature_names();
    if (!rows.empty() && rows[0].features.size() != names.size())
      throw std::invalid_argument("training rows must have one column per opcode");
  } catch (const std::exception &e) {
    throw CliError{kExitBadInput, std::string("bad training data: ") + e.what()};
  }
  TrainConfig cfg;
  cfg.cv_folds = a.folds;
  cfg.seed = a.seed;
  TrainReport report;
  ForestModel m = train_forest(rows, names, cfg, &report);
  write_file(a.out_path, forest_to_text(m));
  if (!a.report_path.empty()) write_file(a.report_path, report.to_csv());
  std::cout << "trained forest: depth " << m.max_depth << ", estimators "
            << m.n_estimators << ", fraction " << m.max_features_fraction << ", cv-mse "
            << report.best.cv_mse << "\n";
  std::cout << "grid points evaluated: " << report.grid.size() << "\n";
  return kExitOk;
}

struct BatchArgs {
  std::string corpus_dir, mode = "ssa-global", select = "model", model = "uniform";
  std::string forest_path, weights_path, energy_spec, out_path, emit_train;
  int trials = 100;
  uint64_t seed = 1;
  bool all_pairs = false, no_verify = false, allow_identical = false;
};

struct BatchRow {
  std::string f1, f2, mode, choice;
  SavingsSummary saved;
  ResourceEstimate est;
  double improvement_pct = 0.0;
  LatencyProxy lat;
  std::string verified;  // "1", "0", "skipped"
  bool emitted = true;
  std::vector<TrainRow> train_rows;
};

int run_batch(const BatchArgs &a) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  if (!fs::is_directory(a.corpus_dir))
    throw CliError{kExitBadInput, a.corpus_dir + " is not a directory"};
  for (const auto &entry : fs::directory_iterator(a.corpus_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".ir")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw CliError{kExitBadInput, "no .ir files in " + a.corpus_dir};

  IrModule corpus;
  for (const auto &path : files) {
    IrModule m = load_module(path);
    for (auto &mem : m.memories) {
      const MemRegion *have = corpus.find_memory(mem.name);
      if (!have)
        corpus.memories.push_back(mem);
      else if (have->elem_type != mem.elem_type || have->length != mem.length)
        throw CliError{kExitBadInput, "memory @" + mem.name + " redeclared in " + path};
    }
    for (auto &fn : m.functions) {
      if (corpus.find_function(fn.name))
        throw CliError{kExitBadInput, "function @" + fn.name + " defined twice in corpus"};
      corpus.functions.push_back(std::move(fn));
    }
  }

  std::vector<std::string> fn_names;
  for (const auto &fn : corpus.functions) fn_names.push_back(fn.name);
  std::sort(fn_names.begin(), fn_names.end());

  MergeMode mode = mode_arg(a.mode);
  ResourceWeights weights =
      a.weights_path.empty() ? default_weights() : load_weights_file(a.weights_path);
  EnergyProxyWeights ew = energy_arg(a.energy_spec);
  ForestModel forest;
  if (a.select == "ensemble") {
    if (a.forest_path.empty())
      throw CliError{kExitUsage, "--select ensemble needs --forest model.txt"};
    forest = load_forest_file(a.forest_path);
  }

  struct PairTask {
    std::string f1, f2;
  };
  std::vector<PairTask> tasks;
  for (size_t i = 0; i < fn_names.size(); ++i)
    for (size_t j = i + 1; j < fn_names.size(); ++j) {
      const IrFunction *f1 = corpus.find_function(fn_names[i]);
      const IrFunction *f2 = corpus.find_function(fn_names[j]);
      if (!a.allow_identical && equal_ignoring_name(*f1, *f2)) continue;
      if (f1->ret_type != f2->ret_type) continue;  // unmergeable signature
      tasks.push_back({fn_names[i], fn_names[j]});
    }

  std::vector<BatchRow> rows(tasks.size());
  const int n_tasks = static_cast<int>(tasks.size());
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < n_tasks; ++t) {
    const PairTask &task = tasks[static_cast<size_t>(t)];
    BatchRow &row = rows[static_cast<size_t>(t)];
    row.f1 = task.f1;
    row.f2 = task.f2;
    row.mode = merge_mode_name(mode);
    const IrFunction &f1 = *corpus.find_function(task.f1);
    const IrFunction &f2 = *corpus.find_function(task.f2);
    try {
      MergeResult mr;
      if (a.select == "model" || mode == MergeMode::Concat) {
        mr = merge_with_model(f1, f2, model_arg(a.model), mode);
        row.choice = mode == MergeMode::Concat ? "concat" : a.model;
      } else {
        CandidateSet cs = generate_candidates(f1, f2, mode);
        int idx = a.select == "ensemble"
                      ? select_ensemble_index(cs, forest)
                      : select_exhaustive(cs, weights, ew).index;
        mr = cs.candidates[static_cast<size_t>(idx)].result;
        row.choice = cs.candidates[static_cast<size_t>(idx)].model.name();
        if (!a.emit_train.empty())
          for (const auto &c : cs.candidates) {
            double target = estimate_resources(f1, weights, ew).energy_proxy +
                            estimate_resources(f2, weights, ew).energy_proxy -
                            estimate_resources(c.result.merged, weights, ew).energy_proxy;
            row.train_rows.push_back({savings_features(c.savings), target});
          }
      }
      SavingsVector sv = savings_vector(f1, f2, mr.merged);
      row.saved = summarize(sv);
      row.est = estimate_resources(mr.merged, weights, ew);
      ResourceEstimate e1 = estimate_resources(f1, weights, ew);
      ResourceEstimate e2 = estimate_resources(f2, weights, ew);
      row.improvement_pct =
          improvement(e1.energy_proxy, e2.energy_proxy, row.est.energy_proxy);
      IrModule merged_mod = build_merged_module(corpus, f1, f2, mr);
      std::string merged_name = merged_mod.functions.back().name;
      if (a.no_verify) {
        row.verified = "skipped";
      } else {
        DiffReport rep = differential_check(corpus, f1.name, f2.name, merged_mod,
                                            merged_name, mr.param_map, a.trials, a.seed,
                                            {200000, false});
        row.verified = rep.passed() ? "1" : "0";
      }
      row.lat = latency_proxy(corpus, f1.name, f2.name, merged_mod, merged_name,
                              mr.param_map, a.seed);
    } catch (const std::exception &e) {
      row.emitted = false;
#pragma omp critical
      std::cerr << "pair (" << task.f1 << ", " << task.f2 << ") failed: " << e.what()
                << "\n";
    }
  }

  std::ostringstream csv;
  csv << "f1,f2,mode,choice,saved_total,saved_control,saved_memory,saved_arithmetic,"
         "saved_other,est_lut,est_ff,est_dsp,energy_proxy,energy_improvement_pct,"
         "latency_overhead_pct,verified\n";
  std::vector<TrainRow> train_rows;
  for (const auto &row : rows) {
    if (!row.emitted) continue;
    csv << row.f1 << ',' << row.f2 << ',' << row.mode << ',' << row.choice << ','
        << row.saved.total << ',' << row.saved.control << ',' << row.saved.memory << ','
        << row.saved.arithmetic << ',' << row.saved.other << ',' << pct(row.est.lut)
        << ',' << pct(row.est.ff) << ',' << pct(row.est.dsp) << ','
        << pct(row.est.energy_proxy) << ',' << pct(row.improvement_pct) << ','
        << (row.lat.valid ? pct(row.lat.overhead_pct) : "nan") << ',' << row.verified
        << '\n';
    for (const auto &tr : row.train_rows) train_rows.push_back(tr);
  }
  if (!a.out_path.empty()) write_file(a.out_path, csv.str());
  if (!a.emit_train.empty()) write_file(a.emit_train, train_rows_to_csv(train_rows));

  // human-readable table
  std::cout << "pair results (" << tasks.size() << " pairs, mode " << merge_mode_name(mode)
            << "):\n";
  std::printf("%-14s %-14s %-10s %7s %9s %9s %8s\n", "f1", "f2", "choice", "saved",
              "energy", "improv%", "verified");
  for (const auto &row : rows) {
    if (!row.emitted) continue;
    std::printf("%-14s %-14s %-10s %7d %9.1f %8.2f%% %8s\n", row.f1.c_str(),
                row.f2.c_str(), row.choice.c_str(), row.saved.total,
                row.est.energy_proxy, row.improvement_pct, row.verified.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"coarse-grained function merging toolkit for a miniature SSA IR"};
  app.require_subcommand(1);

  MergeArgs ma;
  auto *merge = app.add_subcommand("merge", "align, merge and verify a function pair");
  merge->add_option("file_a", ma.file_a, "module holding the first function")->required();
  merge->add_option("file_b", ma.file_b, "module holding the second function")->required();
  merge->add_option("--f1", ma.f1, "first function name (default: first in file)");
  merge->add_option("--f2", ma.f2, "second function name (default: second/first in file)");
  merge->add_option("--mode", ma.mode, "ssa-global|nonssa-global|local|concat");
  merge->add_option("--select", ma.select, "model|ensemble|exhaustive");
  merge->add_option("--model", ma.model, "uniform|control|memory|arithmetic");
  merge->add_option("--forest", ma.forest_path, "trained forest for --select ensemble");
  merge->add_option("--weights", ma.weights_path, "resource weights file");
  merge->add_option("--energy-weights", ma.energy_spec, "energy proxy weights 'lut,ff,dsp'");
  merge->add_option("-o,--output", ma.out_path, "write merged module here");
  merge->add_option("--provenance", ma.prov_path, "provenance dump path (default: <out>.prov)");
  merge->add_option("--trials", ma.trials, "verification trials");
  merge->add_option("--seed", ma.seed, "verification seed");
  merge->add_flag("--no-verify", ma.no_verify, "skip differential verification");

  AlignArgs aa;
  auto *align_cmd = app.add_subcommand("align", "dump the alignment of two functions");
  align_cmd->add_option("file_a", aa.file_a)->required();
  align_cmd->add_option("file_b", aa.file_b)->required();
  align_cmd->add_option("--f1", aa.f1);
  align_cmd->add_option("--f2", aa.f2);
  align_cmd->add_option("--model", aa.model, "uniform|control|memory|arithmetic");
  align_cmd->add_flag("--include-phis", aa.include_phis, "keep phis in the sequences");

  EstimateArgs ea;
  auto *est = app.add_subcommand("estimate", "print resource estimates per function");
  est->add_option("file", ea.file)->required();
  est->add_option("--func", ea.func, "estimate this function only");
  est->add_option("--weights", ea.weights_path, "resource weights file");
  est->add_option("--energy-weights", ea.energy_spec, "energy proxy weights 'lut,ff,dsp'");

  VerifyArgs va;
  auto *ver = app.add_subcommand("verify", "differential check of a merged function");
  ver->add_option("file_a", va.file_a)->required();
  ver->add_option("file_b", va.file_b)->required();
  ver->add_option("file_merged", va.file_merged)->required();
  ver->add_option("--f1", va.f1);
  ver->add_option("--f2", va.f2);
  ver->add_option("--merged", va.merged, "merged function name (default: last)");
  ver->add_option("--trials", va.trials);
  ver->add_option("--seed", va.seed);

  TrainArgs ta;
  auto *tr = app.add_subcommand("train", "train the ensemble selector forest");
  tr->add_option("--data", ta.data_path, "training csv (opcode deltas + target)")->required();
  tr->add_option("-o,--output", ta.out_path, "model file")->required();
  tr->add_option("--report", ta.report_path, "cv grid report csv");
  tr->add_option("--folds", ta.folds, "cross-validation folds");
  tr->add_option("--seed", ta.seed);

  BatchArgs ba;
  auto *ba_cmd = app.add_subcommand("batch", "merge every function pair in a corpus");
  ba_cmd->add_option("corpus_dir", ba.corpus_dir, "directory of .ir files")->required();
  ba_cmd->add_flag("--all-pairs", ba.all_pairs, "merge all unordered pairs (default)");
  ba_cmd->add_option("--mode", ba.mode, "ssa-global|nonssa-global|local|concat");
  ba_cmd->add_option("--select", ba.select, "model|ensemble|exhaustive");
  ba_cmd->add_option("--model", ba.model);
  ba_cmd->add_option("--forest", ba.forest_path);
  ba_cmd->add_option("--weights", ba.weights_path);
  ba_cmd->add_option("--energy-weights", ba.energy_spec);
  ba_cmd->add_option("-o,--output", ba.out_path, "report csv path");
  ba_cmd->add_option("--emit-train", ba.emit_train,
                     "write per-candidate training rows (needs ensemble/exhaustive)");
  ba_cmd->add_option("--trials", ba.trials);
  ba_cmd->add_option("--seed", ba.seed);
  ba_cmd->add_flag("--no-verify", ba.no_verify);
  ba_cmd->add_flag("--allow-identical", ba.allow_identical,
                   "merge structurally identical functions too");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (merge->parsed()) return run_merge(ma);
    if (align_cmd->parsed()) return run_align(aa);
    if (est->parsed()) return run_estimate(ea);
    if (ver->parsed()) return run_verify(va);
    if (tr->parsed()) return run_train(ta);
    if (ba_cmd->parsed()) return run_batch(ba);
  } catch (const CliError &e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const FitError &e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitBadInput;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitUsage;
}
