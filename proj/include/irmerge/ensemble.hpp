#pragma once

#include <array>
#include <functional>

#include "irmerge/codegen.hpp"
#include "irmerge/forest.hpp"

namespace irmerge {

struct Candidate {
  AlignmentModel model;
  MergeResult result;
  SavingsVector savings;
};

// The three merged versions produced by the control/memory/arithmetic
// alignment models for one (f1, f2) pair; ties between candidates always
// break in that order.
struct CandidateSet {
  std::array<Candidate, 3> candidates;

  static constexpr std::array<ModelKind, 3> kOrder = {
      ModelKind::Control, ModelKind::Memory, ModelKind::Arithmetic};
};

CandidateSet generate_candidates(const IrFunction &f1, const IrFunction &f2,
                                 MergeMode mode);

std::vector<double> savings_features(const SavingsVector &sv);

// argmax of a savings-vector predictor over the candidate set
int select_with_predictor(const CandidateSet &cs,
                          const std::function<double(const SavingsVector &)> &predict);

// forest-predicted energy savings decide the candidate
int select_ensemble_index(const CandidateSet &cs, const ForestModel &m);
const Candidate &select_ensemble(const CandidateSet &cs, const ForestModel &m);

struct ExhaustiveChoice {
  int index = 0;
  std::array<ResourceEstimate, 3> estimates;
};

// estimator sweep: pick the candidate with the lowest energy proxy
ExhaustiveChoice select_exhaustive(const CandidateSet &cs, const ResourceWeights &w,
                                   const EnergyProxyWeights &e = {});

}  // namespace irmerge
