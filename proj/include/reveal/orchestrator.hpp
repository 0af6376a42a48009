#pragma once

#include "reveal/clairvoyant.hpp"
#include "reveal/core_model.hpp"
#include "reveal/revealer.hpp"
#include "reveal/rng.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reveal {

enum class RevealerKind { pd1, pd2, naive };
enum class LearnerKind { ucb, ts, oracle };
enum class ContextDistMode { known, plugin };
// Where the revealer's gap comes from: the optimistic estimate u~ - v~, or
// the true u* - v* (auxiliary runs).
enum class GapSource { learner, ground_truth };
enum class NormalizationSource { exact, configured };
enum class ArrivalOrder { iid, descending, ascending, permutation };

std::string_view to_string(RevealerKind kind);
std::string_view to_string(LearnerKind kind);
std::string_view to_string(ContextDistMode mode);
std::string_view to_string(GapSource source);
std::string_view to_string(ArrivalOrder order);
RevealerKind parse_revealer_kind(std::string_view text);
LearnerKind parse_learner_kind(std::string_view text);
ContextDistMode parse_context_dist_mode(std::string_view text);
GapSource parse_gap_source(std::string_view text);
ArrivalOrder parse_arrival_order(std::string_view text);

struct RunConfig {
  double budget = 10.0;
  std::size_t horizon = 300;
  RevealerKind revealer = RevealerKind::pd2;
  LearnerKind learner = LearnerKind::ucb;
  ContextDistMode context_dist = ContextDistMode::known;
  GapSource gap_source = GapSource::learner;
  double delta = 0.1;
  double beta_scale = 1.0;
  NormalizationSource normalization = NormalizationSource::exact;
  double u_max = 1.0;  // used with NormalizationSource::configured
  double u_min = 0.0;
  std::optional<double> theta_bound;  // W; defaults to the instance's exact ||theta*||
  double ts_prior_precision = 1.0;
  bool naive_hard_cap = false;
  // Feed phi_bar(a) instead of phi(s, a) to the revealer's set on unrevealed steps.
  bool weighted_revealer_updates = false;
  // Test hook: present a zero phi_bar distance to pd2 on every step.
  bool force_zero_distance = false;
  bool record_trace = true;

  void validate() const;
  // The B > 2|A| assumption from the analysis. Reported, not enforced.
  bool budget_assumption_holds(std::size_t num_actions) const;
};

struct StepRecord {
  std::size_t t = 0;  // 1-based
  std::size_t context = 0;
  StepInput input;
  StepOutput output;
  bool revealed = false;
  std::size_t action = 0;
  std::size_t contextual_action = 0;
  double expected_reward = 0.0;  // <theta*, phi(s, a)>
  double realized_reward = 0.0;
  double alg_value = 0.0;        // per-step V^ALG contribution
  double clairvoyant_value = 0.0;
  double cum_regret = 0.0;
};

struct ExperimentReport {
  RevealerKind revealer = RevealerKind::pd2;
  double budget = 0.0;
  std::vector<std::size_t> contexts;
  std::vector<StepRecord> trace;  // empty unless RunConfig::record_trace
  std::vector<double> alg_values;
  std::vector<double> clairvoyant_values;
  std::vector<double> regret_curve;
  double v_alg = 0.0;
  double v_auxiliary = 0.0;      // realized reveals valued with u* and v*
  double aux_objective = 0.0;    // sum_t o_t (u*_{s_t} - v*)
  double v_clairvoyant = 0.0;
  double clair_objective = 0.0;  // LP optimum of sum_t o_t (u*_{s_t} - v*)
  double competitive_ratio = 1.0;
  double budget_spent = 0.0;     // sum_t o_t
  std::size_t reveals = 0;       // sum_t O_t
  double bll = 0.0;              // filled by callers pairing with an auxiliary run
  double eta_min_used = 0.0;     // normalized eta_min fed to the ratio audit
};

ArrivalSequence generate_arrivals(const BanditInstance& instance, const GroundTruth& truth,
                                  std::size_t horizon, ArrivalOrder order, const StreamKey& key,
                                  const std::vector<std::size_t>& permutation = {});

// The full reveal/recommend loop on one arrival sequence. Randomness comes
// from streams derived from key: "reveal" (one uniform per step), "noise"
// (one normal per step) and, for Thompson sampling, per-agent sampling streams.
ExperimentReport run_trajectory(const BanditInstance& instance, const GroundTruth& truth,
                                const ArrivalSequence& sequence, const RunConfig& config,
                                const StreamKey& key);
ExperimentReport run_trajectory(const BanditInstance& instance, const ArrivalSequence& sequence,
                                const RunConfig& config, const StreamKey& key);

// Cumulative regret: clairvoyant per-step values minus V^ALG per-step values.
std::vector<double> compute_regret(std::span<const double> alg_values,
                                   std::span<const double> clairvoyant_values);
std::vector<double> compute_regret(const ExperimentReport& report);

// V^Auxiliary - V^ALG for one matched pair.
double compute_bll(const ExperimentReport& report_alg, const ExperimentReport& report_aux);
// Mean over matched pairs.
double compute_bll(std::span<const ExperimentReport> reports_alg,
                   std::span<const ExperimentReport> reports_aux);

struct RegretBoundInputs {
  std::size_t horizon = 0;
  std::size_t dim = 0;
  double theta_bound = 1.0;    // W
  double feature_bound = 1.0;  // L
  double gamma = 1.0;
  std::vector<double> beta;
  double ratio = 1.0;          // competitive ratio multiplying V^Clairvoyant
  double clairvoyant_value = 0.0;
};

// sqrt(8 T d gamma^2 ln((d + T W^2 L^2)/d)) + W sum beta_t + (1 - ratio) V^Clairvoyant.
double regret_bound_rhs(const RegretBoundInputs& in);
// The same bound for a configured run, with ratio = eta_min (1 - 1/c).
double regret_bound_rhs(const RunConfig& config, const BanditInstance& instance,
                        const GroundTruth& truth, double clairvoyant_value);

// Full audit of one pd1/pd2 trajectory: every step's proof obligations plus
// the induction bound on y.
AuditVerdict audit_trajectory(const ExperimentReport& report);

struct RatioRow {
  double budget = 0.0;
  RevealerKind revealer = RevealerKind::pd1;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t num_samples = 0;
  double assumption_bound = 0.0;  // eta_min (1 - 1/c) on the normalized scale
};

struct RatioExperimentOptions {
  std::size_t horizon = 300;
  // Agents proposing a~ and a^ to pd2; oracle makes them coincide.
  LearnerKind learner = LearnerKind::ucb;
  double delta = 0.1;
  double beta_scale = 1.0;
  unsigned threads = 1;
};

// Mean V^Auxiliary / V^Clairvoyant (on the reveal objective) of pd1 and pd2
// with ground-truth gaps over num_sequences i.i.d. arrival sequences per budget.
std::vector<RatioRow> competitive_ratio_experiment(const BanditInstance& instance,
                                                   std::size_t num_sequences,
                                                   const std::vector<double>& budgets,
                                                   const StreamKey& key,
                                                   const RatioExperimentOptions& options = {});

}  // namespace reveal
