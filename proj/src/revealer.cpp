#include "reveal/revealer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace reveal {

double growth_constant(double budget) {
  if (!(budget > 0.0)) return 1.0;
  return std::pow(1.0 + 1.0 / budget, budget);
}

RevealerState RevealerState::create(double budget, std::vector<double> beta_schedule) {
  if (!std::isfinite(budget)) throw InvalidConfig("budget must be finite");
  RevealerState s;
  s.budget = budget;
  s.c_const = growth_constant(budget);
  s.beta_schedule = std::move(beta_schedule);
  return s;
}

namespace {

// Shared tail of both primal-dual variants once the reveal branch fires.
void apply_reveal(RevealerState& state, StepOutput& out, double target) {
  out.o = std::max(0.0, std::min({target, state.remaining(), 1.0}));
  if (out.o > 0.0) {
    const double B = state.budget;
    state.dual_y = state.dual_y * (1.0 + out.o / B) + out.o / ((state.c_const - 1.0) * B);
    state.spent += out.o;
  }
}

void finish(RevealerState& state, StepOutput& out, double distance_term) {
  out.y_after = state.dual_y;
  out.spent_after = state.spent;
  out.dual_increment = state.budget * (out.y_after - out.y_before) + out.z;
  // pd1 carries beta = inf with e = 0; skip the term rather than form inf * 0.
  if (out.e > 0.0) out.dual_increment += (out.beta_used - distance_term) * out.e;
  out.primal_increment = out.o * out.u_gap;
  ++state.t;
}

StepOutput begin(const RevealerState& state, double u_gap) {
  if (!std::isfinite(u_gap)) throw InvalidInput("u_gap must be finite");
  StepOutput out;
  out.u_gap = u_gap;
  out.y_before = state.dual_y;
  out.spent_before = state.spent;
  return out;
}

}  // namespace

StepOutput pd1_step(RevealerState& state, double u_gap) {
  StepOutput out = begin(state, u_gap);
  out.beta_used = std::numeric_limits<double>::infinity();
  if (state.dual_y < 1.0 && u_gap - state.dual_y > 0.0) {
    out.z = u_gap - state.dual_y;
    apply_reveal(state, out, u_gap);
  }
  finish(state, out, 0.0);
  return out;
}

StepOutput pd2_step(RevealerState& state, const StepInput& input) {
  if (state.t >= state.beta_schedule.size()) {
    throw InvalidConfig("beta schedule shorter than the number of pd2 steps");
  }
  if (!(input.phi_bar_distance >= 0.0)) throw InvalidInput("phi_bar_distance must be >= 0");
  StepOutput out = begin(state, input.u_gap);
  const double D = input.phi_bar_distance;
  const bool differ = input.actions_differ();
  const double y = state.dual_y;
  double beta = state.beta_schedule[state.t];

  if (differ && beta < D && input.u_gap > 0.0) {
    out.e = 1.0 / D - beta / (D * D);
    if (input.u_gap - y <= 0.0) {
      beta = D;
      out.e = 0.0;
    }
  } else {
    beta = D;
    out.e = 0.0;
  }

  const double distance_term = differ ? D : 0.0;
  const double boosted = input.u_gap + distance_term * out.e;
  if (y < 1.0 && boosted - y > 0.0) {
    beta = std::max(beta, D * (1.0 - state.budget + state.spent));
    out.z = boosted - y;
    apply_reveal(state, out, boosted);
  } else {
    beta = D;
    out.z = 0.0;
  }
  out.beta_used = beta;
  finish(state, out, distance_term);
  return out;
}

double naive_step(double budget, std::size_t horizon) {
  if (horizon == 0) throw InvalidInput("horizon must be positive");
  return std::clamp(budget / static_cast<double>(horizon), 0.0, 1.0);
}

std::vector<double> default_beta_schedule(double delta_min, double budget, std::size_t horizon,
                                          double scale) {
  if (!(budget >= 2.0)) throw InvalidConfig("beta schedule needs B >= 2 so that ln(B) > 0");
  if (!(delta_min > 0.0) || !std::isfinite(delta_min)) {
    throw InvalidConfig("beta schedule needs a finite delta_min > 0");
  }
  const double numerator = scale * 1.2 * delta_min * std::numbers::ln10 * std::sqrt(10.0);
  const double log_b = std::log(budget);
  std::vector<double> beta(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) {
    beta[t - 1] = numerator / (std::sqrt(static_cast<double>(t)) * log_b);
  }
  return beta;
}

void AuditVerdict::fail(std::string message) {
  ok = false;
  failures.push_back(std::move(message));
}

void AuditVerdict::merge(const AuditVerdict& other, const std::string& prefix) {
  if (!other.ok) ok = false;
  for (const auto& f : other.failures) failures.push_back(prefix + f);
}

namespace {

std::string describe(const char* what, double lhs, const char* op, double rhs) {
  std::ostringstream os;
  os.precision(12);
  os << what << ": " << lhs << ' ' << op << ' ' << rhs;
  return os.str();
}

}  // namespace

AuditVerdict audit_step(const RevealerState& before, const StepInput& input, const StepOutput& output,
                        double eta_min) {
  AuditVerdict v;
  const double tol = kFeasibilityTol;
  const double D = input.actions_differ() ? input.phi_bar_distance : 0.0;

  if (before.dual_y < -tol) v.fail(describe("y negative", before.dual_y, "<", 0.0));
  if (output.z < -tol) v.fail(describe("z negative", output.z, "<", 0.0));
  if (output.e < -tol) v.fail(describe("e negative", output.e, "<", 0.0));
  if (output.o > 0.0 && before.dual_y + output.z - D * output.e < input.u_gap - tol) {
    v.fail(describe("dual constraint", before.dual_y + output.z - D * output.e, "<", input.u_gap));
  }
  if (output.y_after < before.dual_y - tol) v.fail(describe("y decreased", output.y_after, "<", before.dual_y));

  if (output.o < -tol || output.o > 1.0 + tol) v.fail(describe("o outside [0,1]", output.o, "vs", 1.0));
  if (output.o > before.remaining() + tol) {
    v.fail(describe("budget violation: o exceeds remaining budget", output.o, ">", before.remaining()));
  }
  if (before.spent + output.o > before.budget + tol) {
    v.fail(describe("budget violation: spent", before.spent + output.o, ">", before.budget));
  }
  if (D * (1.0 - output.o) > output.beta_used + tol) {
    v.fail(describe("learning constraint", D * (1.0 - output.o), ">", output.beta_used));
  }
  if (output.o > tol && !(input.u_gap > 0.0)) {
    v.fail(describe("reveal on non-positive gap", input.u_gap, "<=", 0.0));
  }

  if (output.primal_increment > 0.0) {
    const double bound = (1.0 + 1.0 / (before.c_const - 1.0)) / eta_min;
    const double ratio = output.dual_increment / output.primal_increment;
    if (!(ratio <= bound + tol)) v.fail(describe("dual/primal ratio", ratio, ">", bound));
  }
  return v;
}

AuditVerdict induction_bound_check(std::span<const StepOutput> trace, double budget) {
  AuditVerdict v;
  if (!(budget > 0.0)) {
    for (std::size_t t = 0; t < trace.size(); ++t) {
      if (trace[t].o > 0.0) v.fail("step " + std::to_string(t) + ": reveal with zero budget");
    }
    return v;
  }
  const double c = growth_constant(budget);
  double spent = 0.0;
  double y_prev = 0.0;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const auto& s = trace[t];
    spent += s.o;
    if (s.y_after < y_prev - kFeasibilityTol) {
      v.fail("step " + std::to_string(t) + ": " + describe("y decreased", s.y_after, "<", y_prev));
    }
    y_prev = s.y_after;
    if (s.o > 0.0) {
      const double bound = (std::pow(c, spent / budget) - 1.0) / (c - 1.0);
      if (s.y_after < bound - kFeasibilityTol) {
        v.fail("step " + std::to_string(t) + ": " + describe("induction bound", s.y_after, "<", bound));
      }
    }
  }
  return v;
}

}  // namespace reveal
