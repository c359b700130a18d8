#include "irmerge/align.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace irmerge {

AlignmentModel AlignmentModel::named(ModelKind k, double emphasis) {
  AlignmentModel m;
  m.kind = k;
  switch (k) {
    case ModelKind::Uniform: break;
    case ModelKind::Control:
      m.class_weight[static_cast<size_t>(OpClass::Control)] = emphasis;
      break;
    case ModelKind::Memory:
      m.class_weight[static_cast<size_t>(OpClass::Memory)] = emphasis;
      break;
    case ModelKind::Arithmetic:
      m.class_weight[static_cast<size_t>(OpClass::Arithmetic)] = emphasis;
      break;
  }
  return m;
}

const char *AlignmentModel::name() const {
  switch (kind) {
    case ModelKind::Uniform: return "uniform";
    case ModelKind::Control: return "control";
    case ModelKind::Memory: return "memory";
    case ModelKind::Arithmetic: return "arithmetic";
  }
  return "?";
}

std::optional<ModelKind> model_from_name(const std::string &s) {
  if (s == "uniform") return ModelKind::Uniform;
  if (s == "control") return ModelKind::Control;
  if (s == "memory") return ModelKind::Memory;
  if (s == "arithmetic") return ModelKind::Arithmetic;
  return std::nullopt;
}

bool instrs_matchable(const Instruction &x, const Instruction &y) {
  if (x.op != y.op) return false;
  if (x.op == Opcode::Phi) return false;
  if (x.type != y.type || x.pred != y.pred) return false;
  if (x.has_result() != y.has_result()) return false;
  if (x.operands.size() != y.operands.size()) return false;
  for (size_t k = 0; k < x.operands.size(); ++k)
    if (x.operands[k].type != y.operands[k].type) return false;
  if (x.op == Opcode::Call && x.callee != y.callee) return false;
  if (x.op == Opcode::Switch && x.case_values != y.case_values) return false;
  if (x.labels.size() != y.labels.size()) return false;
  return true;
}

bool matchable(const LinearSeq &a, size_t i, const LinearSeq &b, size_t j) {
  const LinearItem &x = a.items[i], &y = b.items[j];
  if (x.is_marker() || y.is_marker()) return x.is_marker() && y.is_marker();
  return instrs_matchable(a.instr_at(i), b.instr_at(j));
}

double match_score(const LinearSeq &a, size_t i, const LinearSeq &b, size_t j,
                   const AlignmentModel &m) {
  (void)b;
  (void)j;
  if (a.items[i].is_marker()) return 0.0;
  return m.weight(opcode_class(a.instr_at(i).op));
}

Alignment nw_align(const LinearSeq &a, const LinearSeq &b, const AlignmentModel &m) {
  const size_t n = a.size(), mm = b.size();
  std::vector<std::vector<double>> score(n + 1, std::vector<double>(mm + 1, 0.0));
  // 1 = match, 2 = gap in B (consume A), 3 = gap in A (consume B)
  std::vector<std::vector<uint8_t>> choice(n + 1, std::vector<uint8_t>(mm + 1, 0));

  for (size_t i = 1; i <= n; ++i) choice[i][0] = 2;
  for (size_t j = 1; j <= mm; ++j) choice[0][j] = 3;

  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= mm; ++j) {
      double up = score[i - 1][j];
      double left = score[i][j - 1];
      bool can_match = matchable(a, i - 1, b, j - 1);
      double diag = can_match ? score[i - 1][j - 1] + match_score(a, i - 1, b, j - 1, m)
                              : -1.0;
      if (can_match && diag >= up && diag >= left) {
        score[i][j] = diag;
        choice[i][j] = 1;
      } else if (up >= left) {
        score[i][j] = up;
        choice[i][j] = 2;
      } else {
        score[i][j] = left;
        choice[i][j] = 3;
      }
    }
  }

  Alignment out;
  out.score = score[n][mm];
  size_t i = n, j = mm;
  while (i > 0 || j > 0) {
    switch (choice[i][j]) {
      case 1:
        out.entries.push_back({AlignEntry::Kind::Match, static_cast<int>(i - 1),
                               static_cast<int>(j - 1)});
        --i;
        --j;
        break;
      case 2:
        out.entries.push_back({AlignEntry::Kind::GapA, static_cast<int>(i - 1), -1});
        --i;
        break;
      default:
        out.entries.push_back({AlignEntry::Kind::GapB, -1, static_cast<int>(j - 1)});
        --j;
        break;
    }
  }
  std::reverse(out.entries.begin(), out.entries.end());
  return out;
}

namespace {

struct BruteState {
  const LinearSeq *a, *b;
  const AlignmentModel *m;
  double best = -1.0;
  std::vector<std::pair<int, int>> best_matches;
  std::vector<std::pair<int, int>> cur;

  void search(size_t i, size_t j, double scored) {
    if (scored > best) {
      best = scored;
      best_matches = cur;
    }
    for (size_t ii = i; ii < a->size(); ++ii)
      for (size_t jj = j; jj < b->size(); ++jj)
        if (matchable(*a, ii, *b, jj)) {
          cur.push_back({static_cast<int>(ii), static_cast<int>(jj)});
          search(ii + 1, jj + 1, scored + match_score(*a, ii, *b, jj, *m));
          cur.pop_back();
        }
  }
};

}  // namespace

Alignment brute_force_align(const LinearSeq &a, const LinearSeq &b,
                            const AlignmentModel &m) {
  if (a.size() > 8 || b.size() > 8)
    throw std::invalid_argument("brute_force_align: sequences longer than 8 items");
  BruteState st;
  st.a = &a;
  st.b = &b;
  st.m = &m;
  st.search(0, 0, 0.0);

  Alignment out;
  out.score = st.best;
  size_t ia = 0, ib = 0;
  auto flush_gaps = [&](size_t until_a, size_t until_b) {
    while (ia < until_a) out.entries.push_back({AlignEntry::Kind::GapA, static_cast<int>(ia++), -1});
    while (ib < until_b) out.entries.push_back({AlignEntry::Kind::GapB, -1, static_cast<int>(ib++)});
  };
  for (auto &[i, j] : st.best_matches) {
    flush_gaps(static_cast<size_t>(i), static_cast<size_t>(j));
    out.entries.push_back({AlignEntry::Kind::Match, i, j});
    ia = static_cast<size_t>(i) + 1;
    ib = static_cast<size_t>(j) + 1;
  }
  flush_gaps(a.size(), b.size());
  return out;
}

std::string alignment_to_string(const Alignment &alg, const LinearSeq &a,
                                const LinearSeq &b) {
  std::ostringstream os;
  auto item_name = [](const LinearSeq &s, int idx) -> std::string {
    const LinearItem &it = s.items[static_cast<size_t>(idx)];
    if (it.is_marker()) return "block:" + s.fn->blocks[static_cast<size_t>(it.block)].label;
    return opcode_name(s.instr_at(static_cast<size_t>(idx)).op);
  };
  for (const auto &e : alg.entries) {
    switch (e.kind) {
      case AlignEntry::Kind::Match:
        os << "M " << e.i << ' ' << e.j << ' ' << item_name(a, e.i) << '\n';
        break;
      case AlignEntry::Kind::GapA:
        os << "A " << e.i << ' ' << item_name(a, e.i) << '\n';
        break;
      case AlignEntry::Kind::GapB:
        os << "B " << e.j << ' ' << item_name(b, e.j) << '\n';
        break;
    }
  }
  return os.str();
}

}  // namespace irmerge
