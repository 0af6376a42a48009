#pragma once

#include "reveal/core_model.hpp"

#include <span>
#include <vector>

namespace reveal {

struct ArrivalSequence {
  std::vector<std::size_t> contexts;

  std::size_t size() const { return contexts.size(); }
  void validate(std::size_t num_contexts) const;
};

struct RevealPlan {
  std::vector<double> probabilities;  // o_t in [0, 1]
  double objective = 0.0;             // sum_t o_t * gap_t
};

// Greedy LP optimum: full reveals on the floor(B) largest positive gaps, the
// fractional remainder on the next one. Ties go to the earliest step.
RevealPlan solve_clairvoyant(std::span<const double> gaps, double budget);

// Exhaustive search over o in {0, grid, ..., 1}^T. Test oracle only: refuses
// T > 8 or grid < 0.25.
RevealPlan brute_force_lp(std::span<const double> gaps, double budget, double grid);

// u*_{s_t} - v* per step on the true scale.
std::vector<double> sequence_gaps(const GroundTruth& truth, const ArrivalSequence& sequence);

// Per-step benchmark values o_t u*_{s_t} + (1 - o_t) v*.
std::vector<double> clairvoyant_step_values(const GroundTruth& truth, const ArrivalSequence& sequence,
                                            const RevealPlan& plan);

double value_clairvoyant(const GroundTruth& truth, const ArrivalSequence& sequence,
                         const RevealPlan& plan);
double value_clairvoyant(const BanditInstance& instance, const ArrivalSequence& sequence,
                         const RevealPlan& plan);

}  // namespace reveal
