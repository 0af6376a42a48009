#include "reveal/clairvoyant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace reveal {

void ArrivalSequence::validate(std::size_t num_contexts) const {
  for (std::size_t t = 0; t < contexts.size(); ++t) {
    if (contexts[t] >= num_contexts) {
      throw InvalidInput("arrival " + std::to_string(t) + " names context " +
                         std::to_string(contexts[t]) + " but K = " + std::to_string(num_contexts));
    }
  }
}

RevealPlan solve_clairvoyant(std::span<const double> gaps, double budget) {
  if (!(budget >= 0.0)) throw InvalidInput("budget must be non-negative");
  RevealPlan plan;
  plan.probabilities.assign(gaps.size(), 0.0);
  std::vector<std::size_t> order;
  for (std::size_t t = 0; t < gaps.size(); ++t) {
    if (gaps[t] > 0.0) order.push_back(t);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return gaps[a] > gaps[b]; });
  double remaining = budget;
  for (std::size_t t : order) {
    if (remaining <= 0.0) break;
    const double o = std::min(1.0, remaining);
    plan.probabilities[t] = o;
    remaining -= o;
  }
  // Summed in time order so the value matches other evaluators bit for bit.
  for (std::size_t t = 0; t < gaps.size(); ++t) plan.objective += plan.probabilities[t] * gaps[t];
  return plan;
}

RevealPlan brute_force_lp(std::span<const double> gaps, double budget, double grid) {
  if (gaps.size() > 8) throw InvalidInput("brute_force_lp is limited to T <= 8");
  if (!(grid >= 0.25) || grid > 1.0) throw InvalidInput("brute_force_lp needs grid in [0.25, 1]");
  if (!(budget >= 0.0)) throw InvalidInput("budget must be non-negative");

  std::vector<double> levels;
  for (int j = 0; j * grid <= 1.0 + 1e-12; ++j) levels.push_back(std::min(1.0, j * grid));
  if (levels.back() < 1.0) levels.push_back(1.0);

  const std::size_t T = gaps.size();
  std::vector<std::size_t> idx(T, 0);
  RevealPlan best;
  best.probabilities.assign(T, 0.0);
  best.objective = 0.0;
  while (true) {
    double used = 0.0;
    double objective = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      used += levels[idx[t]];
      objective += levels[idx[t]] * gaps[t];
    }
    if (used <= budget + kFeasibilityTol && objective > best.objective) {
      best.objective = objective;
      for (std::size_t t = 0; t < T; ++t) best.probabilities[t] = levels[idx[t]];
    }
    std::size_t pos = 0;
    while (pos < T && ++idx[pos] == levels.size()) idx[pos++] = 0;
    if (pos == T) break;
  }
  return best;
}

std::vector<double> sequence_gaps(const GroundTruth& truth, const ArrivalSequence& sequence) {
  sequence.validate(static_cast<std::size_t>(truth.u_star.size()));
  std::vector<double> gaps;
  gaps.reserve(sequence.size());
  for (std::size_t k : sequence.contexts) {
    gaps.push_back(truth.u_star[static_cast<Eigen::Index>(k)] - truth.v_star);
  }
  return gaps;
}

std::vector<double> clairvoyant_step_values(const GroundTruth& truth, const ArrivalSequence& sequence,
                                            const RevealPlan& plan) {
  if (plan.probabilities.size() != sequence.size()) {
    throw InvalidInput("plan length differs from the arrival sequence length");
  }
  sequence.validate(static_cast<std::size_t>(truth.u_star.size()));
  std::vector<double> values;
  values.reserve(sequence.size());
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    const double o = plan.probabilities[t];
    values.push_back(o * truth.u_star[static_cast<Eigen::Index>(sequence.contexts[t])] +
                     (1.0 - o) * truth.v_star);
  }
  return values;
}

double value_clairvoyant(const GroundTruth& truth, const ArrivalSequence& sequence,
                         const RevealPlan& plan) {
  const auto values = clairvoyant_step_values(truth, sequence, plan);
  return std::accumulate(values.begin(), values.end(), 0.0);
}

double value_clairvoyant(const BanditInstance& instance, const ArrivalSequence& sequence,
                         const RevealPlan& plan) {
  return value_clairvoyant(ground_truth(instance), sequence, plan);
}

}  // namespace reveal
