#pragma once

#include <array>
#include <string>
#include <vector>

#include "irmerge/ir.hpp"

namespace irmerge {

// Per-opcode linear coefficients for LUT/FF/DSP estimation plus one
// intercept per resource. DSP coefficients are fractional (one DSP per N
// instructions).
struct ResourceWeights {
  struct Coef {
    double lut = 0, ff = 0, dsp = 0;
  };
  std::array<Coef, kNumOpcodes> per_opcode{};
  Coef intercept;

  const Coef &of(Opcode op) const { return per_opcode[static_cast<size_t>(op)]; }
  Coef &of(Opcode op) { return per_opcode[static_cast<size_t>(op)]; }
};

struct EnergyProxyWeights {
  double lut = 1.0, ff = 1.0, dsp = 100.0;  // DSPs are coarse blocks
};

// Regression-fitted defaults for the six instruction kinds the cost table
// covers (load/store/phi/br/alloca/select; condbr shares the branch row);
// every other opcode gets a flat non-measured default.
ResourceWeights default_weights();

struct ResourceEstimate {
  double lut = 0, ff = 0, dsp = 0;
  double energy_proxy = 0;
};

ResourceEstimate estimate_resources(const IrFunction &f, const ResourceWeights &w,
                                    const EnergyProxyWeights &e = {});
double energy_proxy_of(const ResourceEstimate &r, const EnergyProxyWeights &e = {});

// fitting ------------------------------------------------------------------

struct FitRow {
  std::array<int, kNumOpcodes> counts{};
  double lut = 0, ff = 0, dsp = 0, energy = 0;
};

struct FitDataset {
  std::vector<FitRow> rows;
};

struct FitError {
  std::string message;
};

// Ordinary least squares per target via normal equations with partial
// pivoting. Throws FitError naming the collinear column on rank deficiency.
ResourceWeights fit_weights(const FitDataset &d);

// savings ------------------------------------------------------------------

// Per-opcode delta: count(f1) + count(f2) - count(merged). Negative entries
// are overhead introduced by the merge (selects, dispatch branches).
struct SavingsVector {
  std::array<int, kNumOpcodes> delta{};
  int total() const;
};

SavingsVector savings_vector(const IrFunction &f1, const IrFunction &f2,
                             const IrFunction &merged);

// metrics ------------------------------------------------------------------

// ((c_i + c_j) / c_merged - 1) * 100
double improvement(double c_base_i, double c_base_j, double c_merged);
// ((l_i/lm_i + l_j/lm_j) / 2 - 1) * 100
double latency_overhead(double l_merged_fi, double l_mono_fi, double l_merged_fj,
                        double l_mono_fj);
// (c_concat / c_cgma - 1) * 100
double cgma_improvement(double c_concat, double c_cgma);

// files --------------------------------------------------------------------

// "#intercept lut ff dsp" header line, then "opcode lut ff dsp" lines.
std::string weights_to_text(const ResourceWeights &w);
ResourceWeights weights_from_text(const std::string &text);
ResourceWeights load_weights_file(const std::string &path);

// CSV with header "<opcodes...>,lut,ff,dsp,energy".
std::string dataset_to_csv(const FitDataset &d);
FitDataset dataset_from_csv(const std::string &text);

}  // namespace irmerge
