#pragma once

#include "reveal/types.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace reveal {

// c = (1 + 1/B)^B.
double growth_constant(double budget);

struct RevealerState {
  double budget = 0.0;
  double dual_y = 0.0;
  double spent = 0.0;
  double c_const = 1.0;
  std::vector<double> beta_schedule;  // initial beta_t per step; needed by pd2 only
  std::size_t t = 0;                  // steps taken so far

  static RevealerState create(double budget, std::vector<double> beta_schedule = {});
  double remaining() const { return budget - spent; }
};

struct StepInput {
  double u_gap = 0.0;  // normalized gap, in [-1, 1]
  std::size_t tilde_action = 0;
  std::size_t hat_action = 0;
  double phi_bar_distance = 0.0;

  bool actions_differ() const { return tilde_action != hat_action; }
};

struct StepOutput {
  double o = 0.0;
  double z = 0.0;
  double e = 0.0;
  double beta_used = 0.0;  // +inf for pd1, which has no learning constraint
  double dual_increment = 0.0;
  double primal_increment = 0.0;
  double u_gap = 0.0;
  double y_before = 0.0;
  double y_after = 0.0;
  double spent_before = 0.0;
  double spent_after = 0.0;
};

StepOutput pd1_step(RevealerState& state, double u_gap);
StepOutput pd2_step(RevealerState& state, const StepInput& input);

// Constant reveal probability min(B/T, 1).
double naive_step(double budget, std::size_t horizon);

// beta_t = scale * 1.2 * delta_min * ln(10) * sqrt(10) / (sqrt(t) * ln(B)), t = 1..T.
std::vector<double> default_beta_schedule(double delta_min, double budget, std::size_t horizon,
                                          double scale = 1.0);

struct AuditVerdict {
  bool ok = true;
  std::vector<std::string> failures;

  void fail(std::string message);
  void merge(const AuditVerdict& other, const std::string& prefix = {});
};

// The per-step proof obligations: dual and primal feasibility and the
// dual/primal increment ratio bound (1 + 1/(c - 1)) / eta_min.
AuditVerdict audit_step(const RevealerState& before, const StepInput& input, const StepOutput& output,
                        double eta_min);

// y after each revealing step must dominate (c^{sum o / B} - 1)/(c - 1), and
// y must never decrease.
AuditVerdict induction_bound_check(std::span<const StepOutput> trace, double budget);

}  // namespace reveal
