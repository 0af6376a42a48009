#pragma once

#include "reveal/orchestrator.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace reveal {

struct SummaryRow {
  double budget = 0.0;
  std::string algo;
  std::string metric;  // competitive_ratio | final_regret | avg_regret_curve_point
  std::size_t t = 0;
  double mean = 0.0;
  double stderr_ = 0.0;  // sample std / sqrt(num_samples)
  std::size_t num_samples = 0;

  bool operator==(const SummaryRow&) const = default;
};

// Per-instance final regret averaged over replications (scatter plots).
struct InstanceRow {
  double budget = 0.0;
  std::string algo;
  std::size_t instance_id = 0;
  double mean_final_regret = 0.0;
  double stderr_ = 0.0;
  std::size_t num_samples = 0;
};

struct TraceRow {
  std::size_t instance_id = 0;
  std::size_t replication = 0;
  std::string algo;
  StepRecord step;
};

inline constexpr const char* kTraceHeader =
    "instance_id,replication,t,algo,context,u_gap,o_t,O_t,action,expected_reward,realized_reward,"
    "cum_regret,y,z_t,e_t,beta_used,budget_spent";
inline constexpr const char* kSummaryHeader = "budget,algo,metric,t,mean,stderr,num_samples";
inline constexpr const char* kInstanceHeader =
    "budget,algo,instance_id,mean_final_regret,stderr,num_samples";

std::string trace_csv(std::span<const TraceRow> rows);
std::string summary_csv(std::span<const SummaryRow> rows);
std::string instance_csv(std::span<const InstanceRow> rows);
std::vector<SummaryRow> parse_summary_csv(std::istream& in);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};
MeanStderr mean_stderr(std::span<const double> samples);

struct ExperimentOptions {
  std::size_t contexts = 10;
  std::size_t actions = 5;
  std::size_t horizon = 300;
  std::size_t instances = 50;
  std::size_t replications = 50;
  std::uint64_t seed = 0;
  std::vector<double> budgets{10.0};
  std::vector<RevealerKind> revealers{RevealerKind::pd1, RevealerKind::pd2, RevealerKind::naive};
  LearnerKind learner = LearnerKind::ucb;
  ContextDistMode context_dist = ContextDistMode::known;
  double delta = 0.1;
  double beta_scale = 1.0;
  double noise_std = 0.1;
  bool naive_hard_cap = false;
  unsigned threads = 1;
};

// "pd2-ucb", "naive-ts", ...
std::string algo_label(RevealerKind revealer, LearnerKind learner);

BanditInstance harness_instance(const ExperimentOptions& options, std::size_t instance_id);
RunConfig harness_config(const ExperimentOptions& options, double budget, RevealerKind revealer);

// Full traces for every (instance, replication, revealer) at budgets[0].
std::vector<TraceRow> simulate_experiment(const ExperimentOptions& options);

struct RegretResult {
  std::vector<SummaryRow> summary;  // final_regret per budget and algo
  std::vector<SummaryRow> curve;    // avg_regret_curve_point per budget, algo and t
  std::vector<InstanceRow> instances;
  std::size_t bound_checks = 0;
  std::size_t bound_violations = 0;
};
RegretResult regret_experiment(const ExperimentOptions& options);

// Instance 0, `replications` arrival sequences per budget.
std::vector<SummaryRow> table1_experiment(const ExperimentOptions& options);

struct AuditResult {
  std::size_t trajectories = 0;
  std::size_t steps = 0;
  AuditVerdict verdict;
};
// Audits every pd1/pd2 trajectory; with inject_fault the first audited
// trajectory gets one o_t pushed past the remaining budget.
AuditResult audit_experiment(const ExperimentOptions& options, bool inject_fault = false);

}  // namespace reveal
