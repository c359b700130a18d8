#include "irmerge/linearize.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "irmerge/cfg.hpp"

namespace irmerge {

LinearSeq linearize(const IrFunction &f, bool include_phis) {
  LinearSeq seq;
  seq.fn = &f;
  for (size_t b = 0; b < f.blocks.size(); ++b) {
    seq.items.push_back(LinearItem::marker(static_cast<int>(b)));
    for (size_t i = 0; i < f.blocks[b].instrs.size(); ++i) {
      if (!include_phis && f.blocks[b].instrs[i].op == Opcode::Phi) continue;
      seq.items.push_back(LinearItem::instruction(static_cast<int>(b), static_cast<int>(i)));
    }
  }
  return seq;
}

namespace {

std::set<std::string> collect_value_names(const IrFunction &f) {
  std::set<std::string> names;
  for (const auto &p : f.params) names.insert(p.name);
  for (const auto &b : f.blocks)
    for (const auto &in : b.instrs)
      if (in.has_result()) names.insert(in.result);
  return names;
}

std::string fresh_name(std::set<std::string> &taken, const std::string &base) {
  std::string name = base;
  int n = 0;
  while (!taken.insert(name).second) name = base + std::to_string(n++);
  return name;
}

}  // namespace

Reg2MemResult reg2mem_tracked(const IrFunction &f) {
  std::set<std::string> taken = collect_value_names(f);

  struct Demoted {
    std::string slot;        // alloca result name
    IrType type;
    Instruction phi;         // original phi
  };
  std::vector<Demoted> demoted;
  std::map<std::string, std::vector<Instruction>> stores_at_end;  // pred label -> stores

  IrFunction out;
  out.name = f.name;
  out.params = f.params;
  out.ret_type = f.ret_type;
  out.blocks.resize(f.blocks.size());

  for (size_t b = 0; b < f.blocks.size(); ++b) {
    out.blocks[b].label = f.blocks[b].label;
    for (const auto &in : f.blocks[b].instrs) {
      if (in.op != Opcode::Phi) continue;
      Demoted d;
      d.slot = fresh_name(taken, in.result + ".slot");
      d.type = in.type;
      d.phi = in;
      for (const auto &inc : in.incomings) {
        Instruction st;
        st.op = Opcode::Store;
        st.type = in.type;
        st.operands = {inc.value, Operand::value(d.slot, IrType::Addr)};
        stores_at_end[inc.pred].push_back(st);
      }
      demoted.push_back(std::move(d));
    }
  }

  std::vector<bool> is_demotion;
  for (size_t b = 0; b < f.blocks.size(); ++b) {
    auto &instrs = out.blocks[b].instrs;
    auto mark = [&](bool demo) { is_demotion.push_back(demo); };
    if (b == 0) {
      for (const auto &d : demoted) {
        Instruction al;
        al.result = d.slot;
        al.op = Opcode::Alloca;
        al.type = d.type;
        instrs.push_back(al);
        mark(true);
      }
    }
    for (const auto &in : f.blocks[b].instrs) {
      if (in.op == Opcode::Phi) {
        Instruction ld;
        ld.result = in.result;
        ld.op = Opcode::Load;
        ld.type = in.type;
        for (const auto &d : demoted)
          if (d.phi.result == in.result)
            ld.operands = {Operand::value(d.slot, IrType::Addr)};
        instrs.push_back(ld);
        mark(true);
        continue;
      }
      if (in.is_term()) {
        auto it = stores_at_end.find(f.blocks[b].label);
        if (it != stores_at_end.end())
          for (const auto &st : it->second) {
            instrs.push_back(st);
            mark(true);
          }
      }
      instrs.push_back(in);
      mark(false);
    }
  }
  return {std::move(out), std::move(is_demotion)};
}

IrFunction reg2mem(const IrFunction &f) { return reg2mem_tracked(f).fn; }

namespace {

// One promotable slot and its access sites.
struct PromotedVar {
  std::string slot;
  IrType type;
  std::vector<std::pair<int, int>> loads;    // (block, index)
  std::vector<std::pair<int, int>> stores;
};

Operand zero_of(IrType t) {
  if (is_float_type(t)) return Operand::const_float(0.0, t);
  return Operand::const_int(0, t);
}

}  // namespace

Mem2RegResult mem2reg_tracked(const IrFunction &f) {
  Cfg cfg = build_cfg(f);
  std::set<std::string> taken = collect_value_names(f);

  // candidate allocas: entry block only (single execution), no escapes
  std::map<std::string, PromotedVar> vars;
  for (size_t i = 0; i < f.blocks[0].instrs.size(); ++i) {
    const Instruction &in = f.blocks[0].instrs[i];
    if (in.op == Opcode::Alloca && in.has_result())
      vars[in.result] = PromotedVar{in.result, in.type, {}, {}};
  }
  for (size_t b = 0; b < f.blocks.size(); ++b) {
    for (size_t i = 0; i < f.blocks[b].instrs.size(); ++i) {
      const Instruction &in = f.blocks[b].instrs[i];
      auto touches = [&](const Operand &o) {
        return o.kind == Operand::Kind::Value && vars.count(o.name);
      };
      if (!cfg.reachable(static_cast<int>(b))) {
        // renaming never visits unreachable code; leave such slots in memory
        for (const auto &o : in.operands)
          if (touches(o)) vars.erase(o.name);
        continue;
      }
      if (in.op == Opcode::Load && touches(in.operands[0])) {
        if (in.type == vars[in.operands[0].name].type)
          vars[in.operands[0].name].loads.push_back({static_cast<int>(b), static_cast<int>(i)});
        else
          vars.erase(in.operands[0].name);   // type-punned access, leave in memory
        continue;
      }
      if (in.op == Opcode::Store && touches(in.operands[1])) {
        if (in.type == vars[in.operands[1].name].type) {
          vars[in.operands[1].name].stores.push_back({static_cast<int>(b), static_cast<int>(i)});
          continue;
        }
        vars.erase(in.operands[1].name);
        continue;
      }
      // any other appearance of the slot address is an escape
      for (const auto &o : in.operands)
        if (touches(o)) vars.erase(o.name);
      for (const auto &inc : in.incomings)
        if (touches(inc.value)) vars.erase(inc.value.name);
    }
  }

  Mem2RegResult res;
  res.fn = f;
  IrFunction &fn = res.fn;

  struct InsertedPhi {
    Instruction phi;
    int block;
    std::string var;
  };
  std::vector<InsertedPhi> inserted;

  // pruned phi placement: IDF of the store blocks, filtered by liveness
  for (auto &[slot, v] : vars) {
    std::vector<int> def_blocks{0};  // zero-initialized at the alloca
    for (auto &[b, i] : v.stores) def_blocks.push_back(b);

    // backward liveness of the slot value
    int nb = static_cast<int>(fn.blocks.size());
    std::vector<int> first_load(nb, -1), first_store(nb, -1);
    for (auto &[b, i] : v.loads)
      if (first_load[b] < 0 || i < first_load[b]) first_load[b] = i;
    for (auto &[b, i] : v.stores)
      if (first_store[b] < 0 || i < first_store[b]) first_store[b] = i;
    std::vector<bool> live_in(nb, false);
    std::vector<int> work;
    for (int b = 0; b < nb; ++b) {
      bool upexposed = first_load[b] >= 0 && (first_store[b] < 0 || first_load[b] < first_store[b]);
      if (upexposed && !live_in[b]) {
        live_in[b] = true;
        work.push_back(b);
      }
    }
    while (!work.empty()) {
      int b = work.back();
      work.pop_back();
      for (int p : cfg.preds[b]) {
        if (live_in[p] || first_store[p] >= 0) continue;  // killed in p
        if (first_load[p] >= 0) continue;                 // already handled as upexposed
        live_in[p] = true;
        work.push_back(p);
      }
    }

    for (int b : iterated_frontier(cfg, def_blocks)) {
      if (!live_in[b]) continue;
      Instruction phi;
      phi.result = fresh_name(taken, slot + ".v");
      phi.op = Opcode::Phi;
      phi.type = v.type;
      inserted.push_back({phi, b, slot});
    }
  }

  if (vars.empty()) {
    // nothing promotable: identity mapping
    res.old_to_new.resize(f.instr_count());
    for (size_t i = 0; i < res.old_to_new.size(); ++i) res.old_to_new[i] = static_cast<int>(i);
    return res;
  }

  // renaming over the dominator tree
  std::map<std::string, std::vector<Operand>> stacks;          // slot -> defs
  std::map<std::string, Operand> replace;                      // load result -> value
  std::set<const Instruction *> delete_set;
  std::map<int, std::vector<Instruction *>> phis_in_block;     // inserted only

  for (auto &ip : inserted) phis_in_block[ip.block].push_back(&ip.phi);
  std::map<const Instruction *, std::string> phi_var;
  for (auto &ip : inserted) phi_var[&ip.phi] = ip.var;

  auto resolve = [&](Operand o) {
    while (o.kind == Operand::Kind::Value) {
      auto it = replace.find(o.name);
      if (it == replace.end()) break;
      o = it->second;
    }
    return o;
  };
  auto current_def = [&](const std::string &slot, IrType t) -> Operand {
    auto &st = stacks[slot];
    return st.empty() ? zero_of(t) : st.back();
  };

  // explicit recursion over dom-tree children
  auto rename_block = [&](auto &&self, int b) -> void {
    std::map<std::string, size_t> depth_before;
    for (auto &[slot, st] : stacks) depth_before[slot] = st.size();

    for (Instruction *phi : phis_in_block[b])
      stacks[phi_var[phi]].push_back(Operand::value(phi->result, phi->type));

    for (auto &in : fn.blocks[b].instrs) {
      if (in.op == Opcode::Load && in.operands[0].kind == Operand::Kind::Value &&
          vars.count(in.operands[0].name)) {
        replace[in.result] = current_def(in.operands[0].name, in.type);
        delete_set.insert(&in);
        continue;
      }
      if (in.op == Opcode::Store && in.operands[1].kind == Operand::Kind::Value &&
          vars.count(in.operands[1].name)) {
        stacks[in.operands[1].name].push_back(resolve(in.operands[0]));
        delete_set.insert(&in);
        continue;
      }
      if (in.op == Opcode::Alloca && in.has_result() && vars.count(in.result)) {
        delete_set.insert(&in);
        continue;
      }
    }

    for (int s : cfg.succs[b])
      for (Instruction *phi : phis_in_block[s]) {
        const std::string &slot = phi_var[phi];
        PhiIncoming inc;
        inc.value = current_def(slot, phi->type);
        inc.pred = fn.blocks[b].label;
        phi->incomings.push_back(inc);
      }

    for (int c : cfg.dom_children[b]) self(self, c);

    for (auto &[slot, st] : stacks) {
      size_t want = depth_before.count(slot) ? depth_before[slot] : 0;
      while (st.size() > want) st.pop_back();
    }
  };
  rename_block(rename_block, 0);

  // rebuild the function: drop dead ops, rewrite operands, prepend phis
  std::vector<int> old_to_new;
  int old_flat = -1, new_flat = 0;
  old_to_new.assign(f.instr_count(), -1);
  IrFunction rebuilt;
  rebuilt.name = fn.name;
  rebuilt.params = fn.params;
  rebuilt.ret_type = fn.ret_type;
  rebuilt.blocks.resize(fn.blocks.size());

  auto rewrite_operands = [&](Instruction &in) {
    for (auto &o : in.operands) o = resolve(o);
    for (auto &inc : in.incomings) inc.value = resolve(inc.value);
  };

  // phi incoming order follows block layout for deterministic output
  for (auto &ip : inserted) {
    std::sort(ip.phi.incomings.begin(), ip.phi.incomings.end(),
              [&](const PhiIncoming &x, const PhiIncoming &y) {
                return fn.block_index(x.pred) < fn.block_index(y.pred);
              });
  }

  std::vector<int> inserted_flat;
  for (size_t b = 0; b < fn.blocks.size(); ++b) {
    rebuilt.blocks[b].label = fn.blocks[b].label;
    for (auto &ip : inserted)
      if (ip.block == static_cast<int>(b)) {
        Instruction phi = ip.phi;
        rewrite_operands(phi);
        rebuilt.blocks[b].instrs.push_back(std::move(phi));
        inserted_flat.push_back(new_flat++);
      }
    for (auto &in : fn.blocks[b].instrs) {
      ++old_flat;
      if (delete_set.count(&in)) continue;
      Instruction copy = in;
      rewrite_operands(copy);
      rebuilt.blocks[b].instrs.push_back(std::move(copy));
      old_to_new[static_cast<size_t>(old_flat)] = new_flat++;
    }
  }

  res.fn = std::move(rebuilt);
  res.old_to_new = std::move(old_to_new);
  res.inserted_phis = std::move(inserted_flat);
  return res;
}

IrFunction mem2reg(const IrFunction &f) { return mem2reg_tracked(f).fn; }

}  // namespace irmerge
