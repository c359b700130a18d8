#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "irmerge/align.hpp"
#include "irmerge/param_map.hpp"

namespace irmerge {

enum class MergeMode : uint8_t { SsaGlobal, NonSsaGlobal, Local, Concat };

const char *merge_mode_name(MergeMode m);
std::optional<MergeMode> merge_mode_from_name(const std::string &s);

struct Provenance {
  enum class Kind : uint8_t { F1, F2, Fused, Overhead };
  Kind kind = Kind::Overhead;
  int i = -1;  // flat instruction index in the first merge input
  int j = -1;  // flat instruction index in the second merge input

  static Provenance f1(int i) { return {Kind::F1, i, -1}; }
  static Provenance f2(int j) { return {Kind::F2, -1, j}; }
  static Provenance fused(int i, int j) { return {Kind::Fused, i, j}; }
  static Provenance overhead() { return {Kind::Overhead, -1, -1}; }
};

struct MergeResult {
  IrFunction merged;
  ParamMap param_map;
  MergeMode mode = MergeMode::SsaGlobal;
  std::vector<Provenance> provenance;   // parallel to merged flat instruction order
  // the functions the alignment actually ran on (reg2mem'd in non-SSA mode)
  IrFunction input_f1, input_f2;

  std::string provenance_dump() const;
  size_t overhead_count() const;
};

// Opcode histogram of one basic block.
struct Fingerprint {
  std::array<int, kNumOpcodes> counts{};
};

Fingerprint fingerprint(const BasicBlock &b);
int fingerprint_distance(const Fingerprint &a, const Fingerprint &b);

struct BlockPairing {
  std::vector<std::pair<int, int>> pairs;   // (block of f1, block of f2)
  std::vector<int> leftover_f1, leftover_f2;
};

// Greedy minimum-distance matching on fingerprints; pairs whose distance
// exceeds the smaller block's size stay unpaired.
BlockPairing pair_blocks(const IrFunction &f1, const IrFunction &f2);

// Global merge driven by an alignment over linearize(f1)/linearize(f2);
// phi inclusion must match the mode (SSA mode aligns phi-free sequences,
// non-SSA mode aligns reg2mem'd functions). The demoted flags, when given,
// mark which input instructions are phi-demotion artifacts so they count as
// overhead. Throws std::invalid_argument for malformed alignments and
// incompatible signatures.
MergeResult merge_functions(const IrFunction &f1, const IrFunction &f2,
                            const Alignment &alg, MergeMode mode,
                            const std::vector<bool> *demoted_f1 = nullptr,
                            const std::vector<bool> *demoted_f2 = nullptr);

// Local (block-pairing) merge and the no-fusion baseline.
MergeResult hyfm_merge(const IrFunction &f1, const IrFunction &f2,
                       const AlignmentModel &m);
MergeResult concat_merge(const IrFunction &f1, const IrFunction &f2);

// Convenience driver: performs the mode's linearization/alignment pipeline.
MergeResult merge_with_model(const IrFunction &f1, const IrFunction &f2,
                             const AlignmentModel &m, MergeMode mode);

// A module that can execute the merged function: memories plus callees of
// both inputs, with the merged function appended.
IrModule build_merged_module(const IrModule &src, const IrFunction &f1,
                             const IrFunction &f2, const MergeResult &mr);

}  // namespace irmerge
