#include "reveal/orchestrator.hpp"

#include "reveal/learner.hpp"
#include "reveal/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

namespace reveal {

namespace {

template <class Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::pair<std::string_view, Enum> (&table)[N],
                std::string_view what) {
  for (const auto& [name, value] : table) {
    if (name == text) return value;
  }
  std::string options;
  for (const auto& entry : table) options += (options.empty() ? "" : "|") + std::string(entry.first);
  throw InvalidConfig("unknown " + std::string(what) + " '" + std::string(text) + "' (expected " +
                      options + ")");
}

constexpr std::pair<std::string_view, RevealerKind> kRevealers[] = {
    {"pd1", RevealerKind::pd1}, {"pd2", RevealerKind::pd2}, {"naive", RevealerKind::naive}};
constexpr std::pair<std::string_view, LearnerKind> kLearners[] = {
    {"ucb", LearnerKind::ucb}, {"ts", LearnerKind::ts}, {"oracle", LearnerKind::oracle}};
constexpr std::pair<std::string_view, ContextDistMode> kDistModes[] = {
    {"known", ContextDistMode::known}, {"plugin", ContextDistMode::plugin}};
constexpr std::pair<std::string_view, GapSource> kGapSources[] = {
    {"learner", GapSource::learner}, {"ground_truth", GapSource::ground_truth}};
constexpr std::pair<std::string_view, ArrivalOrder> kOrders[] = {
    {"iid", ArrivalOrder::iid},
    {"descending", ArrivalOrder::descending},
    {"ascending", ArrivalOrder::ascending},
    {"permutation", ArrivalOrder::permutation}};

template <class Enum, std::size_t N>
std::string_view name_of(Enum value, const std::pair<std::string_view, Enum> (&table)[N]) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

}  // namespace

std::string_view to_string(RevealerKind kind) { return name_of(kind, kRevealers); }
std::string_view to_string(LearnerKind kind) { return name_of(kind, kLearners); }
std::string_view to_string(ContextDistMode mode) { return name_of(mode, kDistModes); }
std::string_view to_string(GapSource source) { return name_of(source, kGapSources); }
std::string_view to_string(ArrivalOrder order) { return name_of(order, kOrders); }
RevealerKind parse_revealer_kind(std::string_view t) { return parse_enum(t, kRevealers, "revealer"); }
LearnerKind parse_learner_kind(std::string_view t) { return parse_enum(t, kLearners, "learner"); }
ContextDistMode parse_context_dist_mode(std::string_view t) {
  return parse_enum(t, kDistModes, "context-dist mode");
}
GapSource parse_gap_source(std::string_view t) { return parse_enum(t, kGapSources, "gap source"); }
ArrivalOrder parse_arrival_order(std::string_view t) { return parse_enum(t, kOrders, "arrival order"); }

void RunConfig::validate() const {
  if (!(budget >= 0.0) || !std::isfinite(budget)) throw InvalidConfig("budget must be finite and >= 0");
  if (horizon < 1) throw InvalidConfig("horizon must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidConfig("delta must lie in (0, 1)");
  if (!(beta_scale >= 0.0) || !std::isfinite(beta_scale)) throw InvalidConfig("beta scale must be >= 0");
  if (revealer == RevealerKind::pd2 && budget < 2.0) {
    throw InvalidConfig("pd2 needs B >= 2 for its beta schedule");
  }
  if (normalization == NormalizationSource::configured && !(u_max > u_min)) {
    throw InvalidConfig("configured normalization needs u_max > u_min");
  }
  if (theta_bound && !(*theta_bound > 0.0)) throw InvalidConfig("theta bound W must be positive");
  if (!(ts_prior_precision > 0.0)) throw InvalidConfig("TS prior precision must be positive");
}

bool RunConfig::budget_assumption_holds(std::size_t num_actions) const {
  return budget > 2.0 * static_cast<double>(num_actions);
}

ArrivalSequence generate_arrivals(const BanditInstance& instance, const GroundTruth& truth,
                                  std::size_t horizon, ArrivalOrder order, const StreamKey& key,
                                  const std::vector<std::size_t>& permutation) {
  Rng rng = make_stream(key, "arrivals");
  ArrivalSequence seq;
  seq.contexts.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) seq.contexts.push_back(sample_context(instance, rng));
  auto gap = [&](std::size_t k) { return truth.u_star[static_cast<Eigen::Index>(k)]; };
  switch (order) {
    case ArrivalOrder::iid:
      break;
    case ArrivalOrder::descending:
      std::stable_sort(seq.contexts.begin(), seq.contexts.end(),
                       [&](std::size_t a, std::size_t b) { return gap(a) > gap(b); });
      break;
    case ArrivalOrder::ascending:
      std::stable_sort(seq.contexts.begin(), seq.contexts.end(),
                       [&](std::size_t a, std::size_t b) { return gap(a) < gap(b); });
      break;
    case ArrivalOrder::permutation: {
      if (permutation.size() != horizon) throw InvalidConfig("permutation length must equal the horizon");
      std::vector<bool> seen(horizon, false);
      ArrivalSequence permuted;
      permuted.contexts.reserve(horizon);
      for (std::size_t i : permutation) {
        if (i >= horizon || seen[i]) throw InvalidConfig("arrival permutation is not a permutation");
        seen[i] = true;
        permuted.contexts.push_back(seq.contexts[i]);
      }
      seq = std::move(permuted);
      break;
    }
  }
  return seq;
}

namespace {

struct Proposal {
  std::size_t tilde_action = 0;  // argmax over the revealer's beliefs of phi_bar
  double v_tilde = 0.0;
  std::size_t hat_action = 0;    // same for the recommender
  std::size_t contextual_action = 0;
  double u_tilde = 0.0;
};

// The revealer's and recommender's beliefs about theta*.
class Agents {
 public:
  virtual ~Agents() = default;
  virtual Proposal propose(std::size_t context, const std::vector<Vector>& tilde_weighted,
                           const std::vector<Vector>& hat_weighted) = 0;
  virtual void sync(std::size_t t) = 0;
  virtual void observe(const Vector& phi, double reward) = 0;
};

class UcbAgents final : public Agents {
 public:
  UcbAgents(const FeatureMap& features, ConfidenceSet initial)
      : features_(features), tilde_(initial), hat_(std::move(initial)) {}

  Proposal propose(std::size_t context, const std::vector<Vector>& tw,
                   const std::vector<Vector>& hw) override {
    const auto tilde = optimistic_weighted(tilde_, tw);
    const auto hat = optimistic_weighted(hat_, hw);
    const auto ctx = optimistic_contextual(tilde_, features_, context);
    return {tilde.action, tilde.value, hat.action, ctx.action, ctx.value};
  }
  void sync(std::size_t t) override { hat_ = sync_on_reveal(tilde_, t); }
  void observe(const Vector& phi, double reward) override { tilde_.update(phi, reward); }

 private:
  const FeatureMap& features_;
  ConfidenceSet tilde_;
  ConfidenceSet hat_;
};

std::size_t argmax_dot(const Vector& theta, const std::vector<Vector>& phis, double* value) {
  std::size_t best = 0;
  double best_value = phis[0].dot(theta);
  for (std::size_t a = 1; a < phis.size(); ++a) {
    const double v = phis[a].dot(theta);
    if (v > best_value) {
      best = a;
      best_value = v;
    }
  }
  if (value) *value = best_value;
  return best;
}

class FixedThetaAgents final : public Agents {
 public:
  FixedThetaAgents(const FeatureMap& features, Vector theta)
      : features_(features), theta_(std::move(theta)) {}

  Proposal propose(std::size_t context, const std::vector<Vector>& tw,
                   const std::vector<Vector>& hw) override {
    Proposal p;
    p.tilde_action = argmax_dot(theta_, tw, &p.v_tilde);
    p.hat_action = argmax_dot(theta_, hw, nullptr);
    p.u_tilde = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < features_.num_actions(); ++a) {
      const double v = features_.feature(context, a).dot(theta_);
      if (v > p.u_tilde) {
        p.u_tilde = v;
        p.contextual_action = a;
      }
    }
    return p;
  }
  void sync(std::size_t) override {}
  void observe(const Vector&, double) override {}

 private:
  const FeatureMap& features_;
  Vector theta_;
};

class ThompsonAgents final : public Agents {
 public:
  ThompsonAgents(const FeatureMap& features, GaussianPosterior prior, const StreamKey& key)
      : features_(features),
        tilde_(prior),
        hat_(std::move(prior)),
        tilde_rng_(make_stream(key, "ts-revealer")),
        hat_rng_(make_stream(key, "ts-recommender")) {}

  Proposal propose(std::size_t context, const std::vector<Vector>& tw,
                   const std::vector<Vector>& hw) override {
    const Vector theta_tilde = tilde_.sample(tilde_rng_);
    const Vector theta_hat = hat_.sample(hat_rng_);
    Proposal p;
    p.tilde_action = argmax_dot(theta_tilde, tw, &p.v_tilde);
    p.hat_action = argmax_dot(theta_hat, hw, nullptr);
    p.u_tilde = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < features_.num_actions(); ++a) {
      const double v = features_.feature(context, a).dot(theta_tilde);
      if (v > p.u_tilde) {
        p.u_tilde = v;
        p.contextual_action = a;
      }
    }
    return p;
  }
  void sync(std::size_t) override { hat_ = tilde_; }
  void observe(const Vector& phi, double reward) override { tilde_.update(phi, reward); }

 private:
  const FeatureMap& features_;
  GaussianPosterior tilde_;
  GaussianPosterior hat_;
  Rng tilde_rng_;
  Rng hat_rng_;
};

double effective_theta_bound(const RunConfig& config, const BanditInstance& instance) {
  const double w = config.theta_bound.value_or(instance.theta_star.norm());
  if (!(w > 0.0)) throw InvalidConfig("theta bound W must be positive");
  return w;
}

std::unique_ptr<Agents> make_agents(const BanditInstance& instance, const RunConfig& config,
                                    const StreamKey& key) {
  const std::size_t d = instance.features.dim();
  switch (config.learner) {
    case LearnerKind::ucb: {
      const double w = effective_theta_bound(config, instance);
      const double gamma =
          radius_gamma(config.delta, d, config.horizon, w, instance.features.max_norm());
      return std::make_unique<UcbAgents>(instance.features, ConfidenceSet(d, 1.0 / (w * w), gamma));
    }
    case LearnerKind::ts:
      return std::make_unique<ThompsonAgents>(
          instance.features, GaussianPosterior(d, config.ts_prior_precision), key);
    case LearnerKind::oracle:
      return std::make_unique<FixedThetaAgents>(instance.features, instance.theta_star);
  }
  throw InvalidConfig("unknown learner");
}

}  // namespace

ExperimentReport run_trajectory(const BanditInstance& instance, const GroundTruth& truth,
                                const ArrivalSequence& sequence, const RunConfig& config,
                                const StreamKey& key) {
  config.validate();
  const auto& features = instance.features;
  sequence.validate(features.num_contexts());
  if (sequence.size() != config.horizon) {
    throw InvalidConfig("arrival sequence length differs from the horizon");
  }
  const std::size_t T = config.horizon;
  const GapNormalizer normalizer = config.normalization == NormalizationSource::exact
                                       ? GapNormalizer(truth.u_max, truth.u_min)
                                       : GapNormalizer(config.u_max, config.u_min);

  RevealerState state = RevealerState::create(
      config.budget, config.revealer == RevealerKind::pd2
                         ? default_beta_schedule(truth.delta_min, config.budget, T, config.beta_scale)
                         : std::vector<double>{});
  const double naive_o = naive_step(config.budget, T);

  auto agents = make_agents(instance, config, key);
  Rng reveal_rng = make_stream(key, "reveal");
  Rng noise_rng = make_stream(key, "noise");

  const bool plugin = config.context_dist == ContextDistMode::plugin;
  ContextEstimate estimate(features.num_contexts());
  std::vector<Vector> tilde_weighted = truth.weighted_features;
  std::vector<Vector> hat_weighted = truth.weighted_features;
  if (plugin) {
    const std::size_t d = features.dim();
    hat_weighted.assign(features.num_actions(), Vector::Zero(static_cast<Eigen::Index>(d)));
  }

  const auto raw_gaps = sequence_gaps(truth, sequence);
  const RevealPlan plan = solve_clairvoyant(raw_gaps, config.budget);

  ExperimentReport report;
  report.revealer = config.revealer;
  report.budget = config.budget;
  report.contexts = sequence.contexts;
  report.clairvoyant_values = clairvoyant_step_values(truth, sequence, plan);
  report.clair_objective = plan.objective;
  report.alg_values.reserve(T);
  if (config.record_trace) report.trace.reserve(T);
  double min_fed_gap = std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < T; ++i) {
    const std::size_t k = sequence.contexts[i];
    if (plugin) {
      update_context_counts(estimate, k);
      tilde_weighted = weighted_features(features, estimate.p_hat());
    }
    const Proposal prop = agents->propose(k, tilde_weighted, hat_weighted);

    StepInput input;
    input.tilde_action = prop.tilde_action;
    input.hat_action = prop.hat_action;
    input.u_gap = config.gap_source == GapSource::ground_truth ? normalizer.gap(raw_gaps[i])
                                                               : normalizer.gap(prop.u_tilde - prop.v_tilde);
    input.phi_bar_distance =
        config.force_zero_distance
            ? 0.0
            : (tilde_weighted[prop.tilde_action] - tilde_weighted[prop.hat_action]).norm();

    StepOutput out;
    switch (config.revealer) {
      case RevealerKind::pd1:
        out = pd1_step(state, input.u_gap);
        break;
      case RevealerKind::pd2:
        out = pd2_step(state, input);
        break;
      case RevealerKind::naive: {
        out.u_gap = input.u_gap;
        out.y_before = out.y_after = state.dual_y;
        out.spent_before = state.spent;
        out.beta_used = std::numeric_limits<double>::infinity();
        const bool capped =
            config.naive_hard_cap && static_cast<double>(report.reveals) + 1.0 > config.budget;
        out.o = capped ? 0.0 : naive_o;
        state.spent += out.o;
        out.spent_after = state.spent;
        out.primal_increment = out.o * out.u_gap;
        ++state.t;
        break;
      }
    }
    if (out.o > 0.0 && input.u_gap > 0.0) min_fed_gap = std::min(min_fed_gap, input.u_gap);

    const double draw = uniform01(reveal_rng);
    const bool revealed = draw < out.o;
    std::size_t action = prop.hat_action;
    if (revealed) {
      agents->sync(i + 1);
      if (plugin) hat_weighted = tilde_weighted;
      action = prop.contextual_action;
      ++report.reveals;
    }

    const double mean = expected_reward(instance, k, action);
    const double reward = mean + instance.noise_std * standard_normal(noise_rng);
    const bool weighted_update = config.weighted_revealer_updates && !revealed;
    agents->observe(weighted_update ? Vector(tilde_weighted[action])
                                    : Vector(features.feature(k, action)),
                    reward);

    const double alg_value =
        revealed ? mean : truth.weighted_features[action].dot(instance.theta_star);
    report.alg_values.push_back(alg_value);
    report.v_alg += alg_value;
    report.v_auxiliary += revealed ? truth.u_star[static_cast<Eigen::Index>(k)] : truth.v_star;
    report.aux_objective += out.o * raw_gaps[i];

    if (config.record_trace) {
      StepRecord rec;
      rec.t = i + 1;
      rec.context = k;
      rec.input = input;
      rec.output = out;
      rec.revealed = revealed;
      rec.action = action;
      rec.contextual_action = prop.contextual_action;
      rec.expected_reward = mean;
      rec.realized_reward = reward;
      rec.alg_value = alg_value;
      rec.clairvoyant_value = report.clairvoyant_values[i];
      report.trace.push_back(rec);
    }
  }

  report.budget_spent = state.spent;
  report.v_clairvoyant =
      std::accumulate(report.clairvoyant_values.begin(), report.clairvoyant_values.end(), 0.0);
  report.competitive_ratio =
      report.clair_objective > 0.0 ? report.aux_objective / report.clair_objective : 1.0;
  report.regret_curve = compute_regret(report);
  for (std::size_t i = 0; i < report.trace.size(); ++i) report.trace[i].cum_regret = report.regret_curve[i];
  report.eta_min_used = config.gap_source == GapSource::ground_truth ? truth.eta_min / normalizer.scale()
                                                                     : min_fed_gap;
  return report;
}

ExperimentReport run_trajectory(const BanditInstance& instance, const ArrivalSequence& sequence,
                                const RunConfig& config, const StreamKey& key) {
  return run_trajectory(instance, ground_truth(instance), sequence, config, key);
}

std::vector<double> compute_regret(std::span<const double> alg_values,
                                   std::span<const double> clairvoyant_values) {
  if (alg_values.size() != clairvoyant_values.size()) {
    throw InvalidInput("regret needs equal-length value sequences (" + std::to_string(alg_values.size()) +
                       " vs " + std::to_string(clairvoyant_values.size()) + ")");
  }
  std::vector<double> curve(alg_values.size());
  double cum = 0.0;
  for (std::size_t t = 0; t < curve.size(); ++t) {
    cum += clairvoyant_values[t] - alg_values[t];
    curve[t] = cum;
  }
  return curve;
}

std::vector<double> compute_regret(const ExperimentReport& report) {
  return compute_regret(report.alg_values, report.clairvoyant_values);
}

double compute_bll(const ExperimentReport& report_alg, const ExperimentReport& report_aux) {
  if (report_alg.contexts != report_aux.contexts) {
    throw InvalidInput("BLL pairs must share the arrival sequence");
  }
  if (report_alg.budget != report_aux.budget) throw InvalidInput("BLL pairs must share the budget");
  return report_aux.v_auxiliary - report_alg.v_alg;
}

double compute_bll(std::span<const ExperimentReport> reports_alg,
                   std::span<const ExperimentReport> reports_aux) {
  if (reports_alg.size() != reports_aux.size() || reports_alg.empty()) {
    throw InvalidInput("BLL needs the same non-zero number of algorithm and auxiliary runs");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < reports_alg.size(); ++i) sum += compute_bll(reports_alg[i], reports_aux[i]);
  return sum / static_cast<double>(reports_alg.size());
}

double regret_bound_rhs(const RegretBoundInputs& in) {
  const double T = static_cast<double>(in.horizon);
  const double d = static_cast<double>(in.dim);
  const double wl = in.theta_bound * in.theta_bound * in.feature_bound * in.feature_bound;
  const double learning = std::sqrt(8.0 * T * d * in.gamma * in.gamma * std::log((d + T * wl) / d));
  const double slack = in.theta_bound * std::accumulate(in.beta.begin(), in.beta.end(), 0.0);
  return learning + slack + (1.0 - in.ratio) * in.clairvoyant_value;
}

double regret_bound_rhs(const RunConfig& config, const BanditInstance& instance,
                        const GroundTruth& truth, double clairvoyant_value) {
  if (!std::isfinite(truth.eta_min)) throw InvalidInput("regret bound needs a finite eta_min");
  RegretBoundInputs in;
  in.horizon = config.horizon;
  in.dim = instance.features.dim();
  in.theta_bound = effective_theta_bound(config, instance);
  in.feature_bound = instance.features.max_norm();
  in.gamma = radius_gamma(config.delta, in.dim, in.horizon, in.theta_bound, in.feature_bound);
  if (config.revealer == RevealerKind::pd2) {
    in.beta = default_beta_schedule(truth.delta_min, config.budget, config.horizon, config.beta_scale);
  }
  const double eta = truth.eta_min / GapNormalizer(truth.u_max, truth.u_min).scale();
  in.ratio = std::min(1.0, eta * (1.0 - 1.0 / growth_constant(config.budget)));
  in.clairvoyant_value = clairvoyant_value;
  return regret_bound_rhs(in);
}

AuditVerdict audit_trajectory(const ExperimentReport& report) {
  AuditVerdict verdict;
  if (report.revealer == RevealerKind::naive) return verdict;
  if (report.trace.empty() && !report.alg_values.empty()) {
    verdict.fail("trajectory was run without a trace");
    return verdict;
  }
  std::vector<StepOutput> outputs;
  outputs.reserve(report.trace.size());
  for (const auto& rec : report.trace) {
    RevealerState before = RevealerState::create(report.budget);
    before.dual_y = rec.output.y_before;
    before.spent = rec.output.spent_before;
    before.t = rec.t - 1;
    verdict.merge(audit_step(before, rec.input, rec.output, report.eta_min_used),
                  "t=" + std::to_string(rec.t) + ": ");
    outputs.push_back(rec.output);
  }
  verdict.merge(induction_bound_check(outputs, report.budget));
  return verdict;
}

std::vector<RatioRow> competitive_ratio_experiment(const BanditInstance& instance,
                                                   std::size_t num_sequences,
                                                   const std::vector<double>& budgets,
                                                   const StreamKey& key,
                                                   const RatioExperimentOptions& options) {
  if (num_sequences == 0) throw InvalidConfig("need at least one arrival sequence");
  const GroundTruth truth = ground_truth(instance);
  const double eta = truth.eta_min / GapNormalizer(truth.u_max, truth.u_min).scale();
  const RevealerKind kinds[] = {RevealerKind::pd1, RevealerKind::pd2};

  std::vector<ArrivalSequence> sequences(num_sequences);
  for (std::size_t s = 0; s < num_sequences; ++s) {
    StreamKey sk = key;
    sk.replication = s;
    sequences[s] = generate_arrivals(instance, truth, options.horizon, ArrivalOrder::iid, sk);
  }

  const std::size_t jobs_per_budget = 2 * num_sequences;
  std::vector<double> ratios(budgets.size() * jobs_per_budget);
  parallel_for(ratios.size(), options.threads, [&](std::size_t job) {
    const std::size_t b = job / jobs_per_budget;
    const std::size_t kind = (job % jobs_per_budget) / num_sequences;
    const std::size_t s = job % num_sequences;
    RunConfig config;
    config.budget = budgets[b];
    config.horizon = options.horizon;
    config.revealer = kinds[kind];
    config.learner = options.learner;
    config.gap_source = GapSource::ground_truth;
    config.delta = options.delta;
    config.beta_scale = options.beta_scale;
    config.record_trace = false;
    StreamKey sk = key;
    sk.replication = s;
    ratios[job] = run_trajectory(instance, truth, sequences[s], config, sk).competitive_ratio;
  });

  std::vector<RatioRow> rows;
  for (std::size_t b = 0; b < budgets.size(); ++b) {
    for (std::size_t kind = 0; kind < 2; ++kind) {
      const auto first = ratios.begin() + static_cast<std::ptrdiff_t>(b * jobs_per_budget + kind * num_sequences);
      const auto last = first + static_cast<std::ptrdiff_t>(num_sequences);
      const double n = static_cast<double>(num_sequences);
      const double mean = std::accumulate(first, last, 0.0) / n;
      double ss = 0.0;
      for (auto it = first; it != last; ++it) ss += (*it - mean) * (*it - mean);
      RatioRow row;
      row.budget = budgets[b];
      row.revealer = kinds[kind];
      row.mean = mean;
      row.stderr_ = num_sequences > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
      row.num_samples = num_sequences;
      row.assumption_bound = std::isfinite(eta) ? eta * (1.0 - 1.0 / growth_constant(budgets[b])) : 1.0;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace reveal
