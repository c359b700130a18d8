#include "irmerge/ensemble.hpp"

#include <stdexcept>

namespace irmerge {

constexpr std::array<ModelKind, 3> CandidateSet::kOrder;

CandidateSet generate_candidates(const IrFunction &f1, const IrFunction &f2,
                                 MergeMode mode) {
  if (mode == MergeMode::Concat)
    throw std::invalid_argument("concat mode has no model-driven candidates");
  CandidateSet cs;
  for (size_t k = 0; k < CandidateSet::kOrder.size(); ++k) {
    Candidate &c = cs.candidates[k];
    c.model = AlignmentModel::named(CandidateSet::kOrder[k]);
    c.result = merge_with_model(f1, f2, c.model, mode);
    c.savings = savings_vector(f1, f2, c.result.merged);
  }
  return cs;
}

std::vector<double> savings_features(const SavingsVector &sv) {
  std::vector<double> x;
  x.reserve(sv.delta.size());
  for (int v : sv.delta) x.push_back(static_cast<double>(v));
  return x;
}

int select_with_predictor(const CandidateSet &cs,
                          const std::function<double(const SavingsVector &)> &predict) {
  int best = 0;
  double best_score = predict(cs.candidates[0].savings);
  for (int k = 1; k < 3; ++k) {
    double s = predict(cs.candidates[static_cast<size_t>(k)].savings);
    if (s > best_score) {
      best = k;
      best_score = s;
    }
  }
  return best;
}

int select_ensemble_index(const CandidateSet &cs, const ForestModel &m) {
  return select_with_predictor(
      cs, [&](const SavingsVector &sv) { return m.predict(savings_features(sv)); });
}

const Candidate &select_ensemble(const CandidateSet &cs, const ForestModel &m) {
  return cs.candidates[static_cast<size_t>(select_ensemble_index(cs, m))];
}

ExhaustiveChoice select_exhaustive(const CandidateSet &cs, const ResourceWeights &w,
                                   const EnergyProxyWeights &e) {
  ExhaustiveChoice out;
  for (int k = 0; k < 3; ++k)
    out.estimates[static_cast<size_t>(k)] =
        estimate_resources(cs.candidates[static_cast<size_t>(k)].result.merged, w, e);
  out.index = 0;
  for (int k = 1; k < 3; ++k)
    if (out.estimates[static_cast<size_t>(k)].energy_proxy <
        out.estimates[static_cast<size_t>(out.index)].energy_proxy)
      out.index = k;
  return out;
}

}  // namespace irmerge
