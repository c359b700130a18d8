#pragma once

#include <optional>
#include <string>
#include <vector>

#include "irmerge/linearize.hpp"

namespace irmerge {

enum class ModelKind : uint8_t { Uniform, Control, Memory, Arithmetic };

// Linear per-opcode-class weighting for the aligner: the emphasized class
// scores twice the others, block markers score zero.
struct AlignmentModel {
  ModelKind kind = ModelKind::Uniform;
  double class_weight[4] = {1.0, 1.0, 1.0, 1.0};  // indexed by OpClass

  static AlignmentModel named(ModelKind k, double emphasis = 2.0);
  double weight(OpClass c) const { return class_weight[static_cast<size_t>(c)]; }
  const char *name() const;
};

std::optional<ModelKind> model_from_name(const std::string &s);

struct AlignEntry {
  enum class Kind : uint8_t { Match, GapA, GapB };
  Kind kind = Kind::Match;
  int i = -1;  // index into sequence A
  int j = -1;  // index into sequence B
};

struct Alignment {
  std::vector<AlignEntry> entries;
  double score = 0.0;
};

// Two items can fuse: both block markers, or instructions with identical
// opcode, types (result, stated type, and every operand position),
// predicate, callee and switch cases. Phis never match.
bool matchable(const LinearSeq &a, size_t i, const LinearSeq &b, size_t j);
bool instrs_matchable(const Instruction &x, const Instruction &y);

double match_score(const LinearSeq &a, size_t i, const LinearSeq &b, size_t j,
                   const AlignmentModel &m);

// Needleman-Wunsch with zero gap penalty and match-only scores; ties in the
// traceback prefer Match over GapA over GapB.
Alignment nw_align(const LinearSeq &a, const LinearSeq &b, const AlignmentModel &m);

// Exhaustive oracle over all order-preserving match sets; |a|,|b| <= 8.
Alignment brute_force_align(const LinearSeq &a, const LinearSeq &b,
                            const AlignmentModel &m);

// One line per entry: "M i j opcode" / "A i opcode" / "B j opcode".
std::string alignment_to_string(const Alignment &alg, const LinearSeq &a,
                                const LinearSeq &b);

}  // namespace irmerge
