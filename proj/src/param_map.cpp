#include "irmerge/param_map.hpp"

#include <set>
#include <string>

namespace irmerge {

size_t ParamMap::shared_count() const {
  std::set<int> f1(f1_slot.begin(), f1_slot.end());
  size_t n = 0;
  for (int s : f2_slot)
    if (f1.count(s)) ++n;
  return n;
}

ParamMap merge_parameters(const IrFunction &f1, const IrFunction &f2) {
  ParamMap pm;
  pm.merged_params.push_back({"fid", IrType::I1});

  std::set<std::string> used_names{"fid"};
  auto fresh_name = [&](std::string base) {
    std::string name = base;
    int suffix = 2;
    while (!used_names.insert(name).second) name = base + "." + std::to_string(suffix++);
    return name;
  };

  for (const auto &p : f1.params) {
    pm.f1_slot.push_back(static_cast<int>(pm.merged_params.size()));
    pm.merged_params.push_back({fresh_name(p.name), p.type});
  }

  std::vector<bool> claimed(pm.merged_params.size(), false);
  claimed[0] = true;
  for (const auto &p : f2.params) {
    int slot = -1;
    for (size_t s = 1; s < pm.merged_params.size(); ++s) {
      bool from_f1 = false;
      for (int f1s : pm.f1_slot)
        if (f1s == static_cast<int>(s)) from_f1 = true;
      if (from_f1 && !claimed[s] && pm.merged_params[s].type == p.type) {
        slot = static_cast<int>(s);
        break;
      }
    }
    if (slot < 0) {
      slot = static_cast<int>(pm.merged_params.size());
      pm.merged_params.push_back({fresh_name(p.name), p.type});
      claimed.push_back(false);
    }
    claimed[slot] = true;
    pm.f2_slot.push_back(slot);
  }
  return pm;
}

}  // namespace irmerge
