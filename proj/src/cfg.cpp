#include "irmerge/cfg.hpp"

#include <algorithm>
#include <set>

namespace irmerge {

bool Cfg::dominates(int a, int b) const {
  if (!reachable(a) || !reachable(b)) return false;
  while (dom_depth[b] > dom_depth[a]) b = idom[b];
  return a == b;
}

Cfg build_cfg(const IrFunction &f) {
  Cfg cfg;
  cfg.num_blocks = static_cast<int>(f.blocks.size());
  cfg.succs.resize(cfg.num_blocks);
  cfg.preds.resize(cfg.num_blocks);
  cfg.rpo_index.assign(cfg.num_blocks, -1);
  cfg.idom.assign(cfg.num_blocks, -1);
  cfg.dom_depth.assign(cfg.num_blocks, 0);
  cfg.dom_children.resize(cfg.num_blocks);
  cfg.frontier.resize(cfg.num_blocks);
  if (cfg.num_blocks == 0) return cfg;

  for (int b = 0; b < cfg.num_blocks; ++b) {
    if (f.blocks[b].instrs.empty()) continue;
    const Instruction &term = f.blocks[b].instrs.back();
    if (!term.is_term()) continue;
    std::set<int> seen;  // dedupe edges (condbr with equal targets)
    for (const auto &label : term.labels) {
      int t = f.block_index(label);
      if (t >= 0 && seen.insert(t).second) {
        cfg.succs[b].push_back(t);
        cfg.preds[t].push_back(b);
      }
    }
  }

  // iterative postorder from the entry block
  std::vector<int> post;
  std::vector<int> state(cfg.num_blocks, 0);
  std::vector<std::pair<int, size_t>> stack;
  stack.push_back({0, 0});
  state[0] = 1;
  while (!stack.empty()) {
    auto &[b, i] = stack.back();
    if (i < cfg.succs[b].size()) {
      int s = cfg.succs[b][i++];
      if (state[s] == 0) {
        state[s] = 1;
        stack.push_back({s, 0});
      }
    } else {
      post.push_back(b);
      stack.pop_back();
    }
  }
  cfg.rpo.assign(post.rbegin(), post.rend());
  for (size_t i = 0; i < cfg.rpo.size(); ++i) cfg.rpo_index[cfg.rpo[i]] = static_cast<int>(i);

  // Cooper-Harvey-Kennedy iterative dominators
  auto intersect = [&](int a, int b) {
    while (a != b) {
      while (cfg.rpo_index[a] > cfg.rpo_index[b]) a = cfg.idom[a];
      while (cfg.rpo_index[b] > cfg.rpo_index[a]) b = cfg.idom[b];
    }
    return a;
  };
  cfg.idom[0] = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int b : cfg.rpo) {
      if (b == 0) continue;
      int new_idom = -1;
      for (int p : cfg.preds[b]) {
        if (!cfg.reachable(p) || cfg.idom[p] < 0) continue;
        new_idom = (new_idom < 0) ? p : intersect(p, new_idom);
      }
      if (new_idom >= 0 && cfg.idom[b] != new_idom) {
        cfg.idom[b] = new_idom;
        changed = true;
      }
    }
  }
  for (int b : cfg.rpo) {
    if (b == 0) continue;
    cfg.dom_children[cfg.idom[b]].push_back(b);
    cfg.dom_depth[b] = cfg.dom_depth[cfg.idom[b]] + 1;
  }

  // dominance frontiers
  for (int b : cfg.rpo) {
    if (cfg.preds[b].size() < 2) continue;
    for (int p : cfg.preds[b]) {
      if (!cfg.reachable(p)) continue;
      int runner = p;
      while (runner != cfg.idom[b]) {
        if (std::find(cfg.frontier[runner].begin(), cfg.frontier[runner].end(), b) ==
            cfg.frontier[runner].end())
          cfg.frontier[runner].push_back(b);
        runner = cfg.idom[runner];
      }
    }
  }
  return cfg;
}

std::vector<int> iterated_frontier(const Cfg &cfg, const std::vector<int> &def_blocks) {
  std::vector<bool> in_result(cfg.num_blocks, false);
  std::vector<bool> queued(cfg.num_blocks, false);
  std::vector<int> work;
  for (int b : def_blocks)
    if (b >= 0 && cfg.reachable(b) && !queued[b]) {
      queued[b] = true;
      work.push_back(b);
    }
  std::vector<int> result;
  while (!work.empty()) {
    int b = work.back();
    work.pop_back();
    for (int d : cfg.frontier[b]) {
      if (!in_result[d]) {
        in_result[d] = true;
        result.push_back(d);
        if (!queued[d]) {
          queued[d] = true;
          work.push_back(d);
        }
      }
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace irmerge
