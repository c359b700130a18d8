#include "irmerge/codegen.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "irmerge/cfg.hpp"
#include "irmerge/printer.hpp"

namespace irmerge {

const char *merge_mode_name(MergeMode m) {
  switch (m) {
    case MergeMode::SsaGlobal: return "ssa-global";
    case MergeMode::NonSsaGlobal: return "nonssa-global";
    case MergeMode::Local: return "local";
    case MergeMode::Concat: return "concat";
  }
  return "?";
}

std::optional<MergeMode> merge_mode_from_name(const std::string &s) {
  if (s == "ssa-global") return MergeMode::SsaGlobal;
  if (s == "nonssa-global") return MergeMode::NonSsaGlobal;
  if (s == "local") return MergeMode::Local;
  if (s == "concat") return MergeMode::Concat;
  return std::nullopt;
}

Fingerprint fingerprint(const BasicBlock &b) {
  Fingerprint fp;
  for (const auto &in : b.instrs) ++fp.counts[static_cast<size_t>(in.op)];
  return fp;
}

int fingerprint_distance(const Fingerprint &a, const Fingerprint &b) {
  int d = 0;
  for (size_t k = 0; k < a.counts.size(); ++k) d += std::abs(a.counts[k] - b.counts[k]);
  return d;
}

BlockPairing pair_blocks(const IrFunction &f1, const IrFunction &f2) {
  const int na = static_cast<int>(f1.blocks.size());
  const int nb = static_cast<int>(f2.blocks.size());
  std::vector<Fingerprint> fa(na), fb(nb);
  for (int i = 0; i < na; ++i) fa[i] = fingerprint(f1.blocks[static_cast<size_t>(i)]);
  for (int j = 0; j < nb; ++j) fb[j] = fingerprint(f2.blocks[static_cast<size_t>(j)]);

  BlockPairing out;
  std::vector<bool> used_a(na, false), used_b(nb, false);
  for (;;) {
    int best_d = -1, best_i = -1, best_j = -1;
    for (int i = 0; i < na; ++i) {
      if (used_a[i]) continue;
      for (int j = 0; j < nb; ++j) {
        if (used_b[j]) continue;
        int d = fingerprint_distance(fa[i], fb[j]);
        int smaller = static_cast<int>(std::min(f1.blocks[i].instrs.size(),
                                                f2.blocks[j].instrs.size()));
        if (d > smaller) continue;   // sharing less than half is unprofitable
        if (best_d < 0 || d < best_d) {
          best_d = d;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_i < 0) break;
    used_a[best_i] = true;
    used_b[best_j] = true;
    out.pairs.push_back({best_i, best_j});
  }
  for (int i = 0; i < na; ++i)
    if (!used_a[i]) out.leftover_f1.push_back(i);
  for (int j = 0; j < nb; ++j)
    if (!used_b[j]) out.leftover_f2.push_back(j);
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

std::string MergeResult::provenance_dump() const {
  std::ostringstream os;
  int idx = 0;
  for (const auto &b : merged.blocks)
    for (const auto &in : b.instrs) {
      const Provenance &p = provenance[static_cast<size_t>(idx)];
      os << idx << ' ';
      switch (p.kind) {
        case Provenance::Kind::F1: os << "f1(" << p.i << ")"; break;
        case Provenance::Kind::F2: os << "f2(" << p.j << ")"; break;
        case Provenance::Kind::Fused: os << "fused(" << p.i << "," << p.j << ")"; break;
        case Provenance::Kind::Overhead: os << "overhead"; break;
      }
      os << ' ' << opcode_name(in.op) << '\n';
      ++idx;
    }
  return os.str();
}

size_t MergeResult::overhead_count() const {
  size_t n = 0;
  for (const auto &p : provenance)
    if (p.kind == Provenance::Kind::Overhead) ++n;
  return n;
}

namespace {

// ---------------------------------------------------------------------------
// merge plan: the mode-independent input of the emitter
// ---------------------------------------------------------------------------

struct PlanEntry {
  enum class Kind : uint8_t { MarkerBoth, MarkerA, MarkerB, InstrBoth, InstrA, InstrB };
  Kind kind;
  int ab = -1, ai = -1;  // A side (block, instr)
  int bb = -1, bi = -1;  // B side
};

std::vector<int> flat_index_map(const IrFunction &f) {
  // flat index of (block, instr) = prefix[block] + instr
  std::vector<int> prefix(f.blocks.size() + 1, 0);
  for (size_t b = 0; b < f.blocks.size(); ++b)
    prefix[b + 1] = prefix[b] + static_cast<int>(f.blocks[b].instrs.size());
  return prefix;
}

std::vector<PlanEntry> plan_from_alignment(const LinearSeq &a, const LinearSeq &b,
                                           const Alignment &alg) {
  std::vector<PlanEntry> plan;
  size_t next_a = 0, next_b = 0;
  for (const auto &e : alg.entries) {
    PlanEntry pe;
    switch (e.kind) {
      case AlignEntry::Kind::Match: {
        if (e.i < 0 || e.j < 0 || static_cast<size_t>(e.i) != next_a ||
            static_cast<size_t>(e.j) != next_b || static_cast<size_t>(e.i) >= a.size() ||
            static_cast<size_t>(e.j) >= b.size())
          throw std::invalid_argument("invalid alignment: bad match indices");
        if (!matchable(a, next_a, b, next_b))
          throw std::invalid_argument("invalid alignment: non-matchable pair");
        const LinearItem &ia = a.items[next_a], &ib = b.items[next_b];
        pe.kind = ia.is_marker() ? PlanEntry::Kind::MarkerBoth : PlanEntry::Kind::InstrBoth;
        pe.ab = ia.block;
        pe.ai = ia.instr;
        pe.bb = ib.block;
        pe.bi = ib.instr;
        ++next_a;
        ++next_b;
        break;
      }
      case AlignEntry::Kind::GapA: {
        if (e.i < 0 || static_cast<size_t>(e.i) != next_a || static_cast<size_t>(e.i) >= a.size())
          throw std::invalid_argument("invalid alignment: bad gap index");
        const LinearItem &ia = a.items[next_a];
        pe.kind = ia.is_marker() ? PlanEntry::Kind::MarkerA : PlanEntry::Kind::InstrA;
        pe.ab = ia.block;
        pe.ai = ia.instr;
        ++next_a;
        break;
      }
      case AlignEntry::Kind::GapB: {
        if (e.j < 0 || static_cast<size_t>(e.j) != next_b || static_cast<size_t>(e.j) >= b.size())
          throw std::invalid_argument("invalid alignment: bad gap index");
        const LinearItem &ib = b.items[next_b];
        pe.kind = ib.is_marker() ? PlanEntry::Kind::MarkerB : PlanEntry::Kind::InstrB;
        pe.bb = ib.block;
        pe.bi = ib.instr;
        ++next_b;
        break;
      }
    }
    plan.push_back(pe);
  }
  if (next_a != a.size() || next_b != b.size())
    throw std::invalid_argument("invalid alignment: does not cover both sequences");
  return plan;
}

// ---------------------------------------------------------------------------
// the emitter: plan -> merged function in virtual-register form -> SSA
// ---------------------------------------------------------------------------

// A value operand slot of an emitted instruction: a concrete operand
// (constant or merged parameter) or a read of a virtual variable that the
// SSA pass resolves.
struct Ref {
  bool is_var = false;
  int var = -1;
  Operand op;

  static Ref concrete(Operand o) { return {false, -1, std::move(o)}; }
  static Ref of_var(int v, IrType t) {
    Ref r;
    r.is_var = true;
    r.var = v;
    r.op.type = t;
    return r;
  }
};

struct VirtualVar {
  IrType type = IrType::I32;
  // for variables standing for an original phi: which one
  int phi_side = -1;
  int phi_flat = -1;
  int phi_home_block = -1;   // original block index holding the phi
};

struct MInstr {
  Instruction skel;                            // operands filled at the end
  std::vector<Ref> refs;
  Provenance prov;
  std::vector<int> defines;                    // virtual vars defined by the result
  std::vector<std::pair<int, Ref>> virt_defs;  // phi demotion defs before this instr
};

struct MBlock {
  std::string label;
  std::vector<MInstr> instrs;
  bool open = false;
};

// definition identity used to decide whether two fused operands already
// agree (and need no select)
struct DefKey {
  enum class Kind : uint8_t { None, Param, Instr, PhiVar, ConstI, ConstF } kind = Kind::None;
  int id = 0;
  IrType type = IrType::I32;
  uint64_t bits = 0;

  bool operator==(const DefKey &o) const {
    return kind == o.kind && id == o.id && type == o.type && bits == o.bits;
  }
};

class MergeEmitter {
 public:
  MergeEmitter(const IrFunction &fa, const IrFunction &fb, MergeMode mode,
               const std::vector<bool> *dem_a, const std::vector<bool> *dem_b,
               bool always_dispatch)
      : fa_(fa), fb_(fb), mode_(mode), dem_a_(dem_a), dem_b_(dem_b),
        always_dispatch_(always_dispatch) {
    if (fa.ret_type != fb.ret_type)
      throw std::invalid_argument("cannot merge functions with different return types");
    pm_ = merge_parameters(fa, fb);
    flat_a_ = flat_index_map(fa);
    flat_b_ = flat_index_map(fb);
    for (const auto &p : pm_.merged_params) taken_names_.insert(p.name);
  }

  MergeResult run(const std::vector<PlanEntry> &plan) {
    assign_block_labels(plan);
    register_phis();
    for (const auto &pe : plan) emit_entry(pe);
    if (diverge_.active)
      throw std::logic_error("merge emitter: dangling divergence at end of plan");
    attach_phi_defs();
    ensure_entry();
    build_ssa();
    return materialize();
  }

 private:
  // ---- naming ----
  std::string fresh_value(const char *stem) {
    std::string name;
    do {
      name = stem + std::to_string(value_counter_++);
    } while (!taken_names_.insert(name).second);
    return name;
  }

  std::string fresh_label(std::string base) {
    std::string label = std::move(base);
    int n = 2;
    while (!taken_labels_.insert(label).second) label += "." + std::to_string(n++);
    return label;
  }

  int new_block(const std::string &label) {
    blocks_.push_back({label, {}, true});
    return static_cast<int>(blocks_.size()) - 1;
  }

  const IrFunction &side_fn(int side) const { return side == 0 ? fa_ : fb_; }

  int flat_of(int side, int block, int instr) const {
    const auto &prefix = side == 0 ? flat_a_ : flat_b_;
    return prefix[static_cast<size_t>(block)] + instr;
  }

  // ---- pass 0: labels for every original block ----
  void assign_block_labels(const std::vector<PlanEntry> &plan) {
    loc_[0].assign(fa_.blocks.size(), "");
    loc_[1].assign(fb_.blocks.size(), "");
    for (const auto &pe : plan) {
      switch (pe.kind) {
        case PlanEntry::Kind::MarkerBoth: {
          std::string l = fresh_label("m." + fa_.blocks[pe.ab].label + "." +
                                      fb_.blocks[pe.bb].label);
          loc_[0][pe.ab] = l;
          loc_[1][pe.bb] = l;
          break;
        }
        case PlanEntry::Kind::MarkerA:
          loc_[0][pe.ab] = fresh_label("f1." + fa_.blocks[pe.ab].label);
          break;
        case PlanEntry::Kind::MarkerB:
          loc_[1][pe.bb] = fresh_label("f2." + fb_.blocks[pe.bb].label);
          break;
        default:
          break;
      }
    }
    for (size_t b = 0; b < loc_[0].size(); ++b)
      if (loc_[0][b].empty())
        throw std::invalid_argument("alignment misses a block marker of f1");
    for (size_t b = 0; b < loc_[1].size(); ++b)
      if (loc_[1][b].empty())
        throw std::invalid_argument("alignment misses a block marker of f2");
  }

  // ---- virtual variables ----
  int var_for(int side, const std::string &name, IrType t) {
    auto [it, inserted] = var_ids_[side].try_emplace(name, -1);
    if (inserted) {
      it->second = static_cast<int>(vars_.size());
      vars_.push_back({t, -1, -1, -1});
    }
    return it->second;
  }

  // original phis become virtual variables defined at the merged images of
  // their incoming edges; the SSA pass rebuilds the phis
  void register_phis() {
    for (int side = 0; side < 2; ++side) {
      const IrFunction &f = side_fn(side);
      for (size_t b = 0; b < f.blocks.size(); ++b)
        for (size_t i = 0; i < f.blocks[b].instrs.size(); ++i) {
          const Instruction &in = f.blocks[b].instrs[i];
          if (in.op != Opcode::Phi) continue;
          int v = var_for(side, in.result, in.type);
          vars_[static_cast<size_t>(v)].phi_side = side;
          vars_[static_cast<size_t>(v)].phi_flat =
              flat_of(side, static_cast<int>(b), static_cast<int>(i));
          vars_[static_cast<size_t>(v)].phi_home_block = static_cast<int>(b);
          def_keys_[side][in.result] = DefKey{DefKey::Kind::PhiVar, v, in.type, 0};
        }
    }
  }

  // ---- operand resolution ----
  int param_slot(int side, const std::string &name) const {
    const IrFunction &f = side_fn(side);
    for (size_t i = 0; i < f.params.size(); ++i)
      if (f.params[i].name == name)
        return side == 0 ? pm_.f1_slot[i] : pm_.f2_slot[i];
    return -1;
  }

  Ref resolve(int side, const Operand &o) {
    if (o.kind != Operand::Kind::Value) return Ref::concrete(o);
    int slot = param_slot(side, o.name);
    if (slot >= 0)
      return Ref::concrete(Operand::value(pm_.merged_params[static_cast<size_t>(slot)].name, o.type));
    return Ref::of_var(var_for(side, o.name, o.type), o.type);
  }

  DefKey key_of(int side, const Operand &o) {
    switch (o.kind) {
      case Operand::Kind::ConstInt:
        return {DefKey::Kind::ConstI, 0, o.type, static_cast<uint64_t>(o.ival)};
      case Operand::Kind::ConstFloat: {
        uint64_t b;
        static_assert(sizeof(double) == 8);
        __builtin_memcpy(&b, &o.fval, 8);
        return {DefKey::Kind::ConstF, 0, o.type, b};
      }
      case Operand::Kind::Value: {
        int slot = param_slot(side, o.name);
        if (slot >= 0) return {DefKey::Kind::Param, slot, o.type, 0};
        auto it = def_keys_[side].find(o.name);
        if (it != def_keys_[side].end()) return it->second;
        return {DefKey::Kind::None, 0, o.type, 0};  // layout-odd use-before-def
      }
    }
    return {};
  }

  Operand funcid_operand() const { return Operand::value(pm_.merged_params[0].name, IrType::I1); }

  // ---- emission state helpers ----
  struct Divergence {
    bool active = false;
    int block = -1, instr = -1;   // the placeholder condbr
    bool a_target_set = false, b_target_set = false;
  };

  void require_open_shared() {
    if (shared_ < 0 || !blocks_[static_cast<size_t>(shared_)].open)
      throw std::logic_error("merge emitter: no open shared block");
  }

  MInstr &append(int block, MInstr mi) {
    blocks_[static_cast<size_t>(block)].instrs.push_back(std::move(mi));
    return blocks_[static_cast<size_t>(block)].instrs.back();
  }

  void close_block(int block) { blocks_[static_cast<size_t>(block)].open = false; }

  // divergence from an open shared block: a funcid condbr whose targets are
  // patched as the side blocks (or the reconvergence block) appear
  void diverge_from_shared() {
    require_open_shared();
    MInstr mi;
    mi.skel.op = Opcode::CondBr;
    mi.skel.labels = {"", ""};
    mi.refs.push_back(Ref::concrete(funcid_operand()));
    mi.prov = Provenance::overhead();
    append(shared_, std::move(mi));
    diverge_ = {true, shared_, static_cast<int>(blocks_[static_cast<size_t>(shared_)].instrs.size()) - 1,
                false, false};
    close_block(shared_);
    shared_ = -1;
  }

  void patch_diverge(int side, const std::string &label) {
    if (!diverge_.active) return;
    MInstr &mi = blocks_[static_cast<size_t>(diverge_.block)]
                     .instrs[static_cast<size_t>(diverge_.instr)];
    // condbr %fid, <f2 target>, <f1 target>
    if (side == 0 && !diverge_.a_target_set) {
      mi.skel.labels[1] = label;
      diverge_.a_target_set = true;
    } else if (side == 1 && !diverge_.b_target_set) {
      mi.skel.labels[0] = label;
      diverge_.b_target_set = true;
    }
    if (diverge_.a_target_set && diverge_.b_target_set) diverge_.active = false;
  }

  int open_side_block(int side, const std::string &label) {
    if (side_cur_[side] >= 0 && blocks_[static_cast<size_t>(side_cur_[side])].open)
      throw std::logic_error("merge emitter: side block left open");
    if (shared_ >= 0 && blocks_[static_cast<size_t>(shared_)].open) diverge_from_shared();
    int b = new_block(label);
    patch_diverge(side, label);
    side_cur_[side] = b;
    return b;
  }

  int side_block_for_instr(int side) {
    if (side_cur_[side] >= 0) return side_cur_[side];
    return open_side_block(side, fresh_label(side == 0 ? "f1.c" : "f2.c"));
  }

  // reconvergence: a fused instruction while no shared block is open
  void reconverge() {
    std::string label = fresh_label("cv" + std::to_string(conv_counter_++));
    // close unterminated side blocks with a jump to the new block
    for (int side = 0; side < 2; ++side) {
      int b = side_cur_[side];
      if (b >= 0 && blocks_[static_cast<size_t>(b)].open) {
        MInstr br;
        br.skel.op = Opcode::Br;
        br.skel.labels = {label};
        br.prov = Provenance::overhead();
        append(b, std::move(br));
        close_block(b);
      }
      side_cur_[side] = -1;
      patch_diverge(side, label);
    }
    if (diverge_.active)
      throw std::logic_error("merge emitter: unresolved divergence at reconvergence");
    shared_ = new_block(label);
  }

  // ---- instruction cloning ----
  bool side_is_demotion(int side, int flat) const {
    const std::vector<bool> *dem = side == 0 ? dem_a_ : dem_b_;
    if (!dem) return false;
    return (*dem)[static_cast<size_t>(flat)];
  }

  MInstr clone_side(int side, int block, int instr) {
    const Instruction &in = side_fn(side).blocks[static_cast<size_t>(block)]
                                .instrs[static_cast<size_t>(instr)];
    MInstr mi;
    mi.skel = in;
    mi.skel.operands.clear();
    mi.skel.incomings.clear();
    for (const auto &o : in.operands) mi.refs.push_back(resolve(side, o));
    for (auto &l : mi.skel.labels)
      l = loc_[side][static_cast<size_t>(side_fn(side).block_index(l))];
    int flat = flat_of(side, block, instr);
    mi.prov = side_is_demotion(side, flat)
                  ? Provenance::overhead()
                  : (side == 0 ? Provenance::f1(flat) : Provenance::f2(flat));
    if (in.has_result()) {
      std::string merged_name = fresh_value("t");
      mi.skel.result = merged_name;
      int v = var_for(side, in.result, result_type(in));
      mi.defines.push_back(v);
      def_keys_[side][in.result] =
          DefKey{DefKey::Kind::Instr, instr_id_counter_, result_type(in), 0};
    }
    ++instr_id_counter_;
    return mi;
  }

  static IrType result_type(const Instruction &in) {
    if (in.op == Opcode::ICmp || in.op == Opcode::FCmp) return IrType::I1;
    if (in.op == Opcode::Alloca || in.op == Opcode::Gep) return IrType::Addr;
    return in.type;
  }

  // a select feeding a fused instruction whose operands disagree
  Ref emit_select(int target_block, IrType t, Ref a_ref, Ref b_ref) {
    MInstr sel;
    sel.skel.op = Opcode::Select;
    sel.skel.type = t;
    sel.skel.result = fresh_value("s");
    sel.refs.push_back(Ref::concrete(funcid_operand()));
    sel.refs.push_back(std::move(b_ref));   // funcid=1 -> f2 operand
    sel.refs.push_back(std::move(a_ref));
    sel.prov = Provenance::overhead();
    std::string name = sel.skel.result;
    append(target_block, std::move(sel));
    return Ref::concrete(Operand::value(name, t));
  }

  // target label for one side of a fused terminator; creates a funcid
  // trampoline when the two sides branch to different merged blocks
  std::string fused_target(const std::string &la, const std::string &lb) {
    if (la == lb) return la;
    std::string tl = fresh_label("tr" + std::to_string(tramp_counter_++));
    int tb = new_block(tl);
    MInstr mi;
    mi.skel.op = Opcode::CondBr;
    mi.skel.labels = {lb, la};
    mi.refs.push_back(Ref::concrete(funcid_operand()));
    mi.prov = Provenance::overhead();
    append(tb, std::move(mi));
    close_block(tb);
    return tl;
  }

  // ---- plan entry emission ----
  void emit_entry(const PlanEntry &pe) {
    switch (pe.kind) {
      case PlanEntry::Kind::MarkerBoth: {
        if ((shared_ >= 0 && blocks_[static_cast<size_t>(shared_)].open) ||
            (side_cur_[0] >= 0 && blocks_[static_cast<size_t>(side_cur_[0])].open) ||
            (side_cur_[1] >= 0 && blocks_[static_cast<size_t>(side_cur_[1])].open) ||
            diverge_.active)
          throw std::logic_error("merge emitter: open region at matched marker");
        side_cur_[0] = side_cur_[1] = -1;
        shared_ = new_block(loc_[0][static_cast<size_t>(pe.ab)]);
        break;
      }
      case PlanEntry::Kind::MarkerA:
        open_side_block(0, loc_[0][static_cast<size_t>(pe.ab)]);
        break;
      case PlanEntry::Kind::MarkerB:
        open_side_block(1, loc_[1][static_cast<size_t>(pe.bb)]);
        break;
      case PlanEntry::Kind::InstrA:
      case PlanEntry::Kind::InstrB: {
        int side = pe.kind == PlanEntry::Kind::InstrA ? 0 : 1;
        int block = side == 0 ? pe.ab : pe.bb;
        int instr = side == 0 ? pe.ai : pe.bi;
        int mb = side_block_for_instr(side);
        const Instruction &in = side_fn(side).blocks[static_cast<size_t>(block)]
                                    .instrs[static_cast<size_t>(instr)];
        MInstr mi = clone_side(side, block, instr);
        bool term = in.is_term();
        append(mb, std::move(mi));
        if (term) {
          term_image_[side][block] = {mb,
                                      static_cast<int>(blocks_[static_cast<size_t>(mb)].instrs.size()) - 1};
          close_block(mb);
          side_cur_[side] = -1;
        }
        break;
      }
      case PlanEntry::Kind::InstrBoth:
        emit_fused(pe);
        break;
    }
  }

  void emit_fused(const PlanEntry &pe) {
    if (shared_ < 0 || !blocks_[static_cast<size_t>(shared_)].open) reconverge();
    const Instruction &ia = fa_.blocks[static_cast<size_t>(pe.ab)].instrs[static_cast<size_t>(pe.ai)];
    const Instruction &ib = fb_.blocks[static_cast<size_t>(pe.bb)].instrs[static_cast<size_t>(pe.bi)];
    int flat_a = flat_of(0, pe.ab, pe.ai);
    int flat_b = flat_of(1, pe.bb, pe.bi);

    MInstr mi;
    mi.skel = ia;
    mi.skel.operands.clear();
    mi.skel.incomings.clear();
    mi.skel.labels.clear();
    mi.prov = (side_is_demotion(0, flat_a) && side_is_demotion(1, flat_b))
                  ? Provenance::overhead()
                  : Provenance::fused(flat_a, flat_b);

    // operand selects where the two sides disagree
    for (size_t k = 0; k < ia.operands.size(); ++k) {
      Ref ra = resolve(0, ia.operands[k]);
      Ref rb = resolve(1, ib.operands[k]);
      if (key_of(0, ia.operands[k]) == key_of(1, ib.operands[k]) &&
          key_of(0, ia.operands[k]).kind != DefKey::Kind::None) {
        mi.refs.push_back(std::move(ra));
      } else {
        mi.refs.push_back(emit_select(shared_, ia.operands[k].type, std::move(ra), std::move(rb)));
      }
    }

    if (!ia.is_term()) {
      if (ia.has_result()) {
        mi.skel.result = fresh_value("t");
        IrType rt = result_type(ia);
        mi.defines.push_back(var_for(0, ia.result, rt));
        mi.defines.push_back(var_for(1, ib.result, rt));
        DefKey key{DefKey::Kind::Instr, instr_id_counter_, rt, 0};
        def_keys_[0][ia.result] = key;
        def_keys_[1][ib.result] = key;
      }
      ++instr_id_counter_;
      append(shared_, std::move(mi));
      return;
    }

    // fused terminators
    switch (ia.op) {
      case Opcode::Ret:
        break;  // operands already handled
      case Opcode::Br: {
        const std::string &la = loc_[0][static_cast<size_t>(fa_.block_index(ia.labels[0]))];
        const std::string &lb = loc_[1][static_cast<size_t>(fb_.block_index(ib.labels[0]))];
        if (la == lb) {
          mi.skel.labels = {la};
        } else {
          // the two branches fuse into one funcid dispatch
          mi.skel.op = Opcode::CondBr;
          mi.refs.insert(mi.refs.begin(), Ref::concrete(funcid_operand()));
          mi.skel.labels = {lb, la};
        }
        break;
      }
      case Opcode::CondBr: {
        auto target = [&](size_t which) {
          const std::string &la =
              loc_[0][static_cast<size_t>(fa_.block_index(ia.labels[which]))];
          const std::string &lb =
              loc_[1][static_cast<size_t>(fb_.block_index(ib.labels[which]))];
          return fused_target(la, lb);
        };
        mi.skel.labels = {target(0), target(1)};
        break;
      }
      case Opcode::Switch: {
        mi.skel.labels.clear();
        for (size_t k = 0; k < ia.labels.size(); ++k) {
          const std::string &la = loc_[0][static_cast<size_t>(fa_.block_index(ia.labels[k]))];
          const std::string &lb = loc_[1][static_cast<size_t>(fb_.block_index(ib.labels[k]))];
          mi.skel.labels.push_back(fused_target(la, lb));
        }
        break;
      }
      default:
        throw std::logic_error("unknown fused terminator");
    }
    ++instr_id_counter_;
    append(shared_, std::move(mi));
    term_image_[0][pe.ab] = {shared_,
                             static_cast<int>(blocks_[static_cast<size_t>(shared_)].instrs.size()) - 1};
    term_image_[1][pe.bb] = term_image_[0][pe.ab];
    close_block(shared_);
    shared_ = -1;
  }

  // ---- phi demotion sites ----
  void attach_phi_defs() {
    for (int side = 0; side < 2; ++side) {
      const IrFunction &f = side_fn(side);
      for (size_t b = 0; b < f.blocks.size(); ++b)
        for (const auto &in : f.blocks[b].instrs) {
          if (in.op != Opcode::Phi) continue;
          int v = var_ids_[side].at(in.result);
          for (const auto &inc : in.incomings) {
            int pred = f.block_index(inc.pred);
            auto it = term_image_[side].find(pred);
            if (it == term_image_[side].end())
              throw std::logic_error("merge emitter: missing terminator image");
            auto [mb, midx] = it->second;
            blocks_[static_cast<size_t>(mb)]
                .instrs[static_cast<size_t>(midx)]
                .virt_defs.push_back({v, resolve(side, inc.value)});
          }
        }
    }
  }

  // ---- entry dispatch ----
  void ensure_entry() {
    const std::string &ea = loc_[0][0];
    const std::string &eb = loc_[1][0];
    bool same = ea == eb && !blocks_.empty() && blocks_[0].label == ea;
    if (same && !always_dispatch_) {
      // a matched-entry merge can keep the shared block as the entry unless
      // something branches back to it
      bool has_pred = false;
      for (const auto &blk : blocks_)
        for (const auto &mi : blk.instrs)
          for (const auto &l : mi.skel.labels)
            if (l == ea) has_pred = true;
      if (!has_pred) return;
    }
    MBlock dispatch;
    dispatch.label = fresh_label("start");
    MInstr mi;
    mi.skel.op = Opcode::CondBr;
    mi.skel.labels = {eb, ea};
    mi.refs.push_back(Ref::concrete(funcid_operand()));
    mi.prov = Provenance::overhead();
    ++instr_id_counter_;
    dispatch.instrs.push_back(std::move(mi));
    blocks_.insert(blocks_.begin(), std::move(dispatch));
  }

  // ------------------------------------------------------------------
  // SSA construction over the virtual variables
  // ------------------------------------------------------------------

  struct InsertedPhi {
    Instruction phi;                         // incomings filled during renaming
    int block = -1;
    int var = -1;
    Provenance prov = Provenance::overhead();
    bool deleted = false;
    std::vector<std::pair<std::string, Operand>> inc;   // (pred label, value)
  };

  Operand fallback_value(IrType t) {
    if (is_float_type(t)) return Operand::const_float(0.0, t);
    if (t != IrType::Addr)
      return Operand::const_int(0, t);
    for (const auto &p : pm_.merged_params)
      if (p.type == IrType::Addr) return Operand::value(p.name, IrType::Addr);
    return Operand::value(emergency_addr(), IrType::Addr);
  }

  std::string emergency_addr() {
    if (!emergency_addr_name_.empty()) return emergency_addr_name_;
    // a never-dereferenced placeholder address for untaken select/phi arms
    MInstr mi;
    mi.skel.op = Opcode::Alloca;
    mi.skel.type = IrType::I32;
    mi.skel.result = fresh_value("t");
    mi.prov = Provenance::overhead();
    ++instr_id_counter_;
    emergency_addr_name_ = mi.skel.result;
    blocks_[0].instrs.insert(blocks_[0].instrs.begin(), std::move(mi));
    return emergency_addr_name_;
  }

  void build_ssa() {
    // skeleton function for CFG/dominators
    IrFunction skel;
    skel.name = "skel";
    skel.ret_type = fa_.ret_type;
    for (const auto &mb : blocks_) {
      BasicBlock bb;
      bb.label = mb.label;
      for (const auto &mi : mb.instrs) bb.instrs.push_back(mi.skel);
      skel.blocks.push_back(std::move(bb));
    }
    Cfg cfg = build_cfg(skel);
    const int nb = static_cast<int>(blocks_.size());
    const int nv = static_cast<int>(vars_.size());

    // def/use blocks + in-block first positions for pruned placement
    struct Access {
      int first_use = -1;
      int first_def = -1;
    };
    std::vector<std::vector<Access>> acc(static_cast<size_t>(nv),
                                         std::vector<Access>(static_cast<size_t>(nb)));
    std::vector<std::vector<int>> def_blocks(static_cast<size_t>(nv));
    for (int b = 0; b < nb; ++b) {
      auto &mb = blocks_[static_cast<size_t>(b)];
      for (int i = 0; i < static_cast<int>(mb.instrs.size()); ++i) {
        MInstr &mi = mb.instrs[static_cast<size_t>(i)];
        for (const auto &r : mi.refs)
          if (r.is_var) {
            Access &a = acc[static_cast<size_t>(r.var)][static_cast<size_t>(b)];
            if (a.first_use < 0) a.first_use = i;
          }
        for (const auto &[v, rhs] : mi.virt_defs)
          if (rhs.is_var) {
            Access &a = acc[static_cast<size_t>(rhs.var)][static_cast<size_t>(b)];
            if (a.first_use < 0) a.first_use = i;
          }
        for (int v : mi.defines) {
          Access &a = acc[static_cast<size_t>(v)][static_cast<size_t>(b)];
          if (a.first_def < 0) a.first_def = i;
          def_blocks[static_cast<size_t>(v)].push_back(b);
        }
        for (const auto &[v, rhs] : mi.virt_defs) {
          Access &a = acc[static_cast<size_t>(v)][static_cast<size_t>(b)];
          if (a.first_def < 0) a.first_def = i;
          def_blocks[static_cast<size_t>(v)].push_back(b);
        }
      }
    }

    // pruned phi insertion
    for (int v = 0; v < nv; ++v) {
      if (def_blocks[static_cast<size_t>(v)].empty()) continue;
      // liveness
      std::vector<bool> live_in(static_cast<size_t>(nb), false);
      std::vector<int> work;
      for (int b = 0; b < nb; ++b) {
        const Access &a = acc[static_cast<size_t>(v)][static_cast<size_t>(b)];
        bool upexposed = a.first_use >= 0 && (a.first_def < 0 || a.first_use <= a.first_def);
        if (upexposed) {
          live_in[static_cast<size_t>(b)] = true;
          work.push_back(b);
        }
      }
      while (!work.empty()) {
        int b = work.back();
        work.pop_back();
        for (int p : cfg.preds[static_cast<size_t>(b)]) {
          if (live_in[static_cast<size_t>(p)]) continue;
          const Access &a = acc[static_cast<size_t>(v)][static_cast<size_t>(p)];
          if (a.first_def >= 0) continue;   // killed
          if (a.first_use >= 0) continue;   // already seeded
          live_in[static_cast<size_t>(p)] = true;
          work.push_back(p);
        }
      }
      for (int b : iterated_frontier(cfg, def_blocks[static_cast<size_t>(v)])) {
        if (!live_in[static_cast<size_t>(b)]) continue;
        InsertedPhi ip;
        ip.var = v;
        ip.block = b;
        ip.phi.op = Opcode::Phi;
        ip.phi.type = vars_[static_cast<size_t>(v)].type;
        ip.phi.result = fresh_value("p");
        const VirtualVar &vv = vars_[static_cast<size_t>(v)];
        ip.prov = Provenance::overhead();
        if (vv.phi_side >= 0) {
          const std::string &home = loc_[vv.phi_side][static_cast<size_t>(vv.phi_home_block)];
          if (blocks_[static_cast<size_t>(b)].label == home)
            ip.prov = vv.phi_side == 0 ? Provenance::f1(vv.phi_flat)
                                       : Provenance::f2(vv.phi_flat);
        }
        phis_.push_back(std::move(ip));
      }
    }

    std::vector<std::vector<int>> phis_in_block(static_cast<size_t>(nb));
    for (size_t k = 0; k < phis_.size(); ++k)
      phis_in_block[static_cast<size_t>(phis_[k].block)].push_back(static_cast<int>(k));

    // renaming
    std::vector<std::vector<Operand>> stacks(static_cast<size_t>(nv));
    auto current = [&](int v) -> Operand {
      auto &st = stacks[static_cast<size_t>(v)];
      if (st.empty()) return fallback_value(vars_[static_cast<size_t>(v)].type);
      return st.back();
    };

    auto rename = [&](auto &&self, int b) -> void {
      std::vector<std::pair<int, size_t>> saved;
      auto push = [&](int v, const Operand &o) {
        saved.push_back({v, stacks[static_cast<size_t>(v)].size()});
        stacks[static_cast<size_t>(v)].push_back(o);
      };

      for (int k : phis_in_block[static_cast<size_t>(b)])
        push(phis_[static_cast<size_t>(k)].var,
             Operand::value(phis_[static_cast<size_t>(k)].phi.result,
                            phis_[static_cast<size_t>(k)].phi.type));

      for (auto &mi : blocks_[static_cast<size_t>(b)].instrs) {
        for (auto &r : mi.refs)
          if (r.is_var) {
            r.op = current(r.var);
            r.is_var = false;
          }
        std::vector<std::pair<int, Operand>> resolved_defs;
        for (auto &[v, rhs] : mi.virt_defs) {
          Operand o = rhs.is_var ? current(rhs.var) : rhs.op;
          resolved_defs.push_back({v, o});
        }
        for (auto &[v, o] : resolved_defs) push(v, o);
        for (int v : mi.defines)
          push(v, Operand::value(mi.skel.result, vars_[static_cast<size_t>(v)].type));
      }

      for (int s : cfg.succs[static_cast<size_t>(b)])
        for (int k : phis_in_block[static_cast<size_t>(s)]) {
          InsertedPhi &ip = phis_[static_cast<size_t>(k)];
          ip.inc.push_back({blocks_[static_cast<size_t>(b)].label, current(ip.var)});
        }

      for (int c : cfg.dom_children[static_cast<size_t>(b)]) self(self, c);

      for (auto it = saved.rbegin(); it != saved.rend(); ++it)
        stacks[static_cast<size_t>(it->first)].resize(it->second);
    };
    if (nb > 0) rename(rename, 0);

    // resolve leftover var refs in unreachable blocks
    for (auto &mb : blocks_)
      for (auto &mi : mb.instrs)
        for (auto &r : mi.refs)
          if (r.is_var) {
            r.op = fallback_value(r.op.type);
            r.is_var = false;
          }

    cleanup_phis(cfg);
  }

  // trivial-phi removal and identical-phi deduplication
  void cleanup_phis(const Cfg &cfg) {
    (void)cfg;
    std::map<std::string, Operand> rewrite;
    auto resolve_op = [&](Operand o) {
      while (o.kind == Operand::Kind::Value) {
        auto it = rewrite.find(o.name);
        if (it == rewrite.end()) break;
        o = it->second;
      }
      return o;
    };

    for (auto &ip : phis_)
      if (ip.inc.empty()) ip.deleted = true;   // unreachable insertion point

    bool changed = true;
    while (changed) {
      changed = false;
      // trivial phis: every incoming resolves to the same operand or the phi
      for (auto &ip : phis_) {
        if (ip.deleted) continue;
        Operand uniq;
        bool found = false, trivial = true;
        for (auto &[pred, val] : ip.inc) {
          Operand v = resolve_op(val);
          if (v.kind == Operand::Kind::Value && v.name == ip.phi.result) continue;
          if (!found) {
            uniq = v;
            found = true;
          } else if (!operand_equal(uniq, v)) {
            trivial = false;
            break;
          }
        }
        if (trivial && found) {
          ip.deleted = true;
          rewrite[ip.phi.result] = uniq;
          changed = true;
        }
      }
      // identical phis in the same block
      for (size_t x = 0; x < phis_.size(); ++x) {
        if (phis_[x].deleted) continue;
        for (size_t y = x + 1; y < phis_.size(); ++y) {
          if (phis_[y].deleted || phis_[y].block != phis_[x].block) continue;
          if (phis_[x].phi.type != phis_[y].phi.type) continue;
          if (phis_[x].inc.size() != phis_[y].inc.size()) continue;
          std::map<std::string, Operand> mx, my;
          for (auto &[p, v] : phis_[x].inc) mx[p] = resolve_op(v);
          for (auto &[p, v] : phis_[y].inc) my[p] = resolve_op(v);
          bool same = mx.size() == my.size();
          for (auto &[p, v] : mx) {
            auto it = my.find(p);
            if (it == my.end() || !operand_equal(v, it->second)) {
              same = false;
              break;
            }
          }
          if (!same) continue;
          phis_[y].deleted = true;
          rewrite[phis_[y].phi.result] = Operand::value(phis_[x].phi.result, phis_[x].phi.type);
          // keep the stronger origin
          if (phis_[x].prov.kind == Provenance::Kind::Overhead)
            phis_[x].prov = phis_[y].prov;
          else if (phis_[y].prov.kind == Provenance::Kind::F2 &&
                   phis_[x].prov.kind == Provenance::Kind::F1)
            phis_[x].prov = Provenance::fused(phis_[x].prov.i, phis_[y].prov.j);
          else if (phis_[y].prov.kind == Provenance::Kind::F1 &&
                   phis_[x].prov.kind == Provenance::Kind::F2)
            phis_[x].prov = Provenance::fused(phis_[y].prov.i, phis_[x].prov.j);
          changed = true;
        }
      }
    }

    // apply rewrites to all refs and phi incomings
    for (auto &mb : blocks_)
      for (auto &mi : mb.instrs)
        for (auto &r : mi.refs) r.op = resolve_op(r.op);
    for (auto &ip : phis_) {
      if (ip.deleted) continue;
      for (auto &[pred, val] : ip.inc) val = resolve_op(val);
    }
  }

  // ---- final construction ----
  MergeResult materialize() {
    MergeResult mr;
    mr.mode = mode_;
    mr.param_map = pm_;
    mr.input_f1 = fa_;
    mr.input_f2 = fb_;

    IrFunction &fn = mr.merged;
    fn.name = fresh_label("merged");   // overridden by drivers
    fn.ret_type = fa_.ret_type;
    fn.params = pm_.merged_params;
    fn.blocks.resize(blocks_.size());

    for (size_t b = 0; b < blocks_.size(); ++b) {
      fn.blocks[b].label = blocks_[b].label;
      for (size_t k = 0; k < phis_.size(); ++k) {
        InsertedPhi &ip = phis_[k];
        if (ip.deleted || ip.block != static_cast<int>(b)) continue;
        Instruction phi = ip.phi;
        std::sort(ip.inc.begin(), ip.inc.end(),
                  [](const auto &x, const auto &y) { return x.first < y.first; });
        for (auto &[pred, val] : ip.inc) phi.incomings.push_back({val, pred});
        fn.blocks[b].instrs.push_back(std::move(phi));
        mr.provenance.push_back(ip.prov);
      }
      for (auto &mi : blocks_[b].instrs) {
        Instruction in = mi.skel;
        for (auto &r : mi.refs) in.operands.push_back(r.op);
        fn.blocks[b].instrs.push_back(std::move(in));
        mr.provenance.push_back(mi.prov);
      }
    }
    return mr;
  }

  // ---- members ----
  const IrFunction &fa_, &fb_;
  MergeMode mode_;
  const std::vector<bool> *dem_a_, *dem_b_;
  bool always_dispatch_;
  ParamMap pm_;
  std::vector<int> flat_a_, flat_b_;

  std::vector<MBlock> blocks_;
  std::vector<VirtualVar> vars_;
  std::map<std::string, int> var_ids_[2];
  std::map<std::string, DefKey> def_keys_[2];
  std::vector<std::string> loc_[2];
  std::map<int, std::pair<int, int>> term_image_[2];
  std::vector<InsertedPhi> phis_;

  int shared_ = -1;
  int side_cur_[2] = {-1, -1};
  Divergence diverge_;

  std::set<std::string> taken_names_, taken_labels_;
  int value_counter_ = 0, conv_counter_ = 0, tramp_counter_ = 0;
  int instr_id_counter_ = 0;
  std::string emergency_addr_name_;
};

bool has_phis(const IrFunction &f) {
  for (const auto &b : f.blocks)
    for (const auto &in : b.instrs)
      if (in.op == Opcode::Phi) return true;
  return false;
}

std::string default_merged_name(const IrFunction &f1, const IrFunction &f2) {
  return "merged." + f1.name + "." + f2.name;
}

}  // namespace

MergeResult concat_merge(const IrFunction &f1, const IrFunction &f2) {
  if (f1.ret_type != f2.ret_type)
    throw std::invalid_argument("cannot merge functions with different return types");
  ParamMap pm = merge_parameters(f1, f2);

  MergeResult mr;
  mr.mode = MergeMode::Concat;
  mr.param_map = pm;
  mr.input_f1 = f1;
  mr.input_f2 = f2;

  IrFunction &fn = mr.merged;
  fn.name = default_merged_name(f1, f2);
  fn.ret_type = f1.ret_type;
  fn.params = pm.merged_params;

  std::set<std::string> taken;
  for (const auto &p : pm.merged_params) taken.insert(p.name);

  BasicBlock start;
  start.label = "start";
  Instruction dis;
  dis.op = Opcode::CondBr;
  dis.operands.push_back(Operand::value(pm.merged_params[0].name, IrType::I1));
  dis.labels = {"f2." + f2.blocks[0].label, "f1." + f1.blocks[0].label};
  start.instrs.push_back(std::move(dis));
  fn.blocks.push_back(std::move(start));
  mr.provenance.push_back(Provenance::overhead());

  for (int side = 0; side < 2; ++side) {
    const IrFunction &src = side == 0 ? f1 : f2;
    const std::vector<int> &slots = side == 0 ? pm.f1_slot : pm.f2_slot;
    const std::string prefix = side == 0 ? "f1." : "f2.";
    const std::string vprefix = side == 0 ? "a." : "b.";

    std::map<std::string, std::string> value_rename;
    for (size_t i = 0; i < src.params.size(); ++i)
      value_rename[src.params[i].name] =
          pm.merged_params[static_cast<size_t>(slots[i])].name;
    auto renamed = [&](const std::string &name) -> std::string {
      auto it = value_rename.find(name);
      if (it != value_rename.end()) return it->second;
      std::string fresh = vprefix + name;
      int n = 2;
      while (!taken.insert(fresh).second) fresh = vprefix + name + "." + std::to_string(n++);
      value_rename[name] = fresh;
      return fresh;
    };

    int flat = 0;
    for (const auto &b : src.blocks) {
      BasicBlock nb;
      nb.label = prefix + b.label;
      for (const auto &in : b.instrs) {
        Instruction copy = in;
        if (copy.has_result()) copy.result = renamed(copy.result);
        for (auto &o : copy.operands)
          if (o.kind == Operand::Kind::Value) o.name = renamed(o.name);
        for (auto &inc : copy.incomings) {
          if (inc.value.kind == Operand::Kind::Value) inc.value.name = renamed(inc.value.name);
          inc.pred = prefix + inc.pred;
        }
        for (auto &l : copy.labels) l = prefix + l;
        nb.instrs.push_back(std::move(copy));
        mr.provenance.push_back(side == 0 ? Provenance::f1(flat) : Provenance::f2(flat));
        ++flat;
      }
      fn.blocks.push_back(std::move(nb));
    }
  }
  return mr;
}

MergeResult merge_functions(const IrFunction &f1, const IrFunction &f2,
                            const Alignment &alg, MergeMode mode,
                            const std::vector<bool> *demoted_f1,
                            const std::vector<bool> *demoted_f2) {
  switch (mode) {
    case MergeMode::Concat:
      return concat_merge(f1, f2);
    case MergeMode::Local:
      throw std::invalid_argument("local mode merges block pairs; use hyfm_merge");
    case MergeMode::SsaGlobal: {
      LinearSeq a = linearize(f1, false), b = linearize(f2, false);
      auto plan = plan_from_alignment(a, b, alg);
      MergeEmitter em(f1, f2, mode, nullptr, nullptr, false);
      MergeResult mr = em.run(plan);
      mr.merged.name = default_merged_name(f1, f2);
      return mr;
    }
    case MergeMode::NonSsaGlobal: {
      if (has_phis(f1) || has_phis(f2))
        throw std::invalid_argument("non-SSA merge expects reg2mem'd (phi-free) inputs");
      LinearSeq a = linearize(f1, true), b = linearize(f2, true);
      auto plan = plan_from_alignment(a, b, alg);
      MergeEmitter em(f1, f2, mode, demoted_f1, demoted_f2, false);
      MergeResult mr = em.run(plan);
      // best-effort phi recovery; selects block promotion exactly where the
      // alignment fused demotion ops against unrelated memory ops
      Mem2RegResult rec = mem2reg_tracked(mr.merged);
      std::vector<Provenance> np(rec.fn.instr_count(), Provenance::overhead());
      for (size_t old = 0; old < mr.provenance.size(); ++old) {
        int ni = rec.old_to_new[old];
        if (ni >= 0) np[static_cast<size_t>(ni)] = mr.provenance[old];
      }
      mr.merged = std::move(rec.fn);
      mr.provenance = std::move(np);
      mr.merged.name = default_merged_name(f1, f2);
      return mr;
    }
  }
  throw std::invalid_argument("unknown merge mode");
}

MergeResult hyfm_merge(const IrFunction &f1, const IrFunction &f2,
                       const AlignmentModel &m) {
  if (f1.ret_type != f2.ret_type)
    throw std::invalid_argument("cannot merge functions with different return types");
  BlockPairing bp = pair_blocks(f1, f2);

  std::vector<PlanEntry> plan;
  auto instr_items = [](const IrFunction &f, int block) {
    LinearSeq seq;
    seq.fn = &f;
    const auto &instrs = f.blocks[static_cast<size_t>(block)].instrs;
    for (size_t i = 0; i < instrs.size(); ++i)
      if (instrs[i].op != Opcode::Phi)
        seq.items.push_back(LinearItem::instruction(block, static_cast<int>(i)));
    return seq;
  };

  for (auto &[x, y] : bp.pairs) {
    plan.push_back({PlanEntry::Kind::MarkerBoth, x, -1, y, -1});
    LinearSeq sa = instr_items(f1, x), sb = instr_items(f2, y);
    Alignment alg = nw_align(sa, sb, m);
    for (const auto &e : alg.entries) {
      PlanEntry pe;
      switch (e.kind) {
        case AlignEntry::Kind::Match: {
          const LinearItem &ia = sa.items[static_cast<size_t>(e.i)];
          const LinearItem &ib = sb.items[static_cast<size_t>(e.j)];
          pe = {PlanEntry::Kind::InstrBoth, ia.block, ia.instr, ib.block, ib.instr};
          break;
        }
        case AlignEntry::Kind::GapA: {
          const LinearItem &ia = sa.items[static_cast<size_t>(e.i)];
          pe = {PlanEntry::Kind::InstrA, ia.block, ia.instr, -1, -1};
          break;
        }
        case AlignEntry::Kind::GapB: {
          const LinearItem &ib = sb.items[static_cast<size_t>(e.j)];
          pe = {PlanEntry::Kind::InstrB, -1, -1, ib.block, ib.instr};
          break;
        }
      }
      plan.push_back(pe);
    }
  }
  for (int x : bp.leftover_f1) {
    plan.push_back({PlanEntry::Kind::MarkerA, x, -1, -1, -1});
    for (size_t i = 0; i < f1.blocks[static_cast<size_t>(x)].instrs.size(); ++i)
      if (f1.blocks[static_cast<size_t>(x)].instrs[i].op != Opcode::Phi)
        plan.push_back({PlanEntry::Kind::InstrA, x, static_cast<int>(i), -1, -1});
  }
  for (int y : bp.leftover_f2) {
    plan.push_back({PlanEntry::Kind::MarkerB, -1, -1, y, -1});
    for (size_t i = 0; i < f2.blocks[static_cast<size_t>(y)].instrs.size(); ++i)
      if (f2.blocks[static_cast<size_t>(y)].instrs[i].op != Opcode::Phi)
        plan.push_back({PlanEntry::Kind::InstrB, -1, -1, y, static_cast<int>(i)});
  }

  MergeEmitter em(f1, f2, MergeMode::Local, nullptr, nullptr, /*always_dispatch=*/true);
  MergeResult mr = em.run(plan);
  mr.merged.name = default_merged_name(f1, f2);
  return mr;
}

MergeResult merge_with_model(const IrFunction &f1, const IrFunction &f2,
                             const AlignmentModel &m, MergeMode mode) {
  switch (mode) {
    case MergeMode::Concat:
      return concat_merge(f1, f2);
    case MergeMode::Local:
      return hyfm_merge(f1, f2, m);
    case MergeMode::SsaGlobal: {
      LinearSeq a = linearize(f1, false), b = linearize(f2, false);
      return merge_functions(f1, f2, nw_align(a, b, m), mode);
    }
    case MergeMode::NonSsaGlobal: {
      Reg2MemResult d1 = reg2mem_tracked(f1), d2 = reg2mem_tracked(f2);
      LinearSeq a = linearize(d1.fn, true), b = linearize(d2.fn, true);
      return merge_functions(d1.fn, d2.fn, nw_align(a, b, m), mode,
                             &d1.is_demotion, &d2.is_demotion);
    }
  }
  throw std::invalid_argument("unknown merge mode");
}

IrModule build_merged_module(const IrModule &src, const IrFunction &f1,
                             const IrFunction &f2, const MergeResult &mr) {
  IrModule out;
  out.memories = src.memories;

  std::string merged_name = mr.merged.name;
  while (src.find_function(merged_name)) merged_name += ".m";

  const ParamMap &pm = mr.param_map;
  auto rewrite_call = [&](Instruction &in, const std::string &caller) {
    int side = in.callee == f1.name ? 0 : 1;
    const std::vector<int> &slots = side == 0 ? pm.f1_slot : pm.f2_slot;
    std::vector<Operand> args(pm.merged_params.size());
    std::vector<bool> covered(pm.merged_params.size(), false);
    args[0] = Operand::const_int(side, IrType::I1);
    covered[0] = true;
    for (size_t i = 0; i < slots.size(); ++i) {
      args[static_cast<size_t>(slots[i])] = in.operands[i];
      covered[static_cast<size_t>(slots[i])] = true;
    }
    for (size_t s = 1; s < args.size(); ++s) {
      if (covered[s]) continue;
      IrType t = pm.merged_params[s].type;
      if (t == IrType::Addr) {
        const Operand *addr = nullptr;
        for (const auto &o : in.operands)
          if (o.type == IrType::Addr) addr = &o;
        if (!addr)
          throw std::runtime_error("cannot rewrite call to @" + in.callee + " in @" +
                                   caller + ": no addr value for unused merged slot");
        args[s] = *addr;
      } else if (is_float_type(t)) {
        args[s] = Operand::const_float(0.0, t);
      } else {
        args[s] = Operand::const_int(0, t);
      }
    }
    in.callee = merged_name;
    in.operands = std::move(args);
  };

  for (const auto &fn : src.functions) {
    if (fn.name == f1.name || fn.name == f2.name) continue;
    IrFunction copy = fn;
    for (auto &b : copy.blocks)
      for (auto &in : b.instrs)
        if (in.op == Opcode::Call && (in.callee == f1.name || in.callee == f2.name))
          rewrite_call(in, copy.name);
    out.functions.push_back(std::move(copy));
  }

  IrFunction merged = mr.merged;
  merged.name = merged_name;
  for (auto &b : merged.blocks)
    for (auto &in : b.instrs)
      if (in.op == Opcode::Call && (in.callee == f1.name || in.callee == f2.name))
        rewrite_call(in, merged.name);
  out.functions.push_back(std::move(merged));
  return out;
}

}  // namespace irmerge
