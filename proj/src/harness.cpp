#include "reveal/harness.hpp"

#include "reveal/csv.hpp"
#include "reveal/kv_text.hpp"
#include "reveal/parallel.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>

namespace reveal {

std::string trace_csv(std::span<const TraceRow> rows) {
  std::string out = std::string(kTraceHeader) + '\n';
  for (const auto& r : rows) {
    const auto& s = r.step;
    out += csv_line({std::to_string(r.instance_id), std::to_string(r.replication), std::to_string(s.t),
                     r.algo, std::to_string(s.context), csv_number(s.input.u_gap), csv_number(s.output.o),
                     s.revealed ? "1" : "0", std::to_string(s.action), csv_number(s.expected_reward),
                     csv_number(s.realized_reward), csv_number(s.cum_regret), csv_number(s.output.y_after),
                     csv_number(s.output.z), csv_number(s.output.e), csv_number(s.output.beta_used),
                     csv_number(s.output.spent_after)});
  }
  return out;
}

std::string summary_csv(std::span<const SummaryRow> rows) {
  std::string out = std::string(kSummaryHeader) + '\n';
  for (const auto& r : rows) {
    out += csv_line({csv_number(r.budget), r.algo, r.metric, std::to_string(r.t), csv_number(r.mean),
                     csv_number(r.stderr_), std::to_string(r.num_samples)});
  }
  return out;
}

std::string instance_csv(std::span<const InstanceRow> rows) {
  std::string out = std::string(kInstanceHeader) + '\n';
  for (const auto& r : rows) {
    out += csv_line({csv_number(r.budget), r.algo, std::to_string(r.instance_id),
                     csv_number(r.mean_final_regret), csv_number(r.stderr_), std::to_string(r.num_samples)});
  }
  return out;
}

namespace {

std::size_t parse_count(const std::string& text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidInput("expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

}  // namespace

std::vector<SummaryRow> parse_summary_csv(std::istream& in) {
  const CsvTable table = parse_csv(in);
  const std::size_t budget = table.column("budget"), algo = table.column("algo"),
                    metric = table.column("metric"), t = table.column("t"), mean = table.column("mean"),
                    se = table.column("stderr"), n = table.column("num_samples");
  std::vector<SummaryRow> rows;
  for (const auto& f : table.rows) {
    rows.push_back({parse_double(f[budget]), f[algo], f[metric], parse_count(f[t]), parse_double(f[mean]),
                    parse_double(f[se]), parse_count(f[n])});
  }
  return rows;
}

MeanStderr mean_stderr(std::span<const double> samples) {
  MeanStderr out;
  out.n = samples.size();
  if (samples.empty()) return out;
  const double n = static_cast<double>(samples.size());
  out.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - out.mean) * (x - out.mean);
    out.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

std::string algo_label(RevealerKind revealer, LearnerKind learner) {
  return std::string(to_string(revealer)) + "-" + std::string(to_string(learner));
}

BanditInstance harness_instance(const ExperimentOptions& options, std::size_t instance_id) {
  Rng rng = make_stream({options.seed, instance_id, 0}, "instance");
  return generate_synthetic_instance(options.contexts, options.actions, rng,
                                     SyntheticOptions{options.noise_std});
}

RunConfig harness_config(const ExperimentOptions& options, double budget, RevealerKind revealer) {
  RunConfig config;
  config.budget = budget;
  config.horizon = options.horizon;
  config.revealer = revealer;
  config.learner = options.learner;
  config.context_dist = options.context_dist;
  config.delta = options.delta;
  config.beta_scale = options.beta_scale;
  config.naive_hard_cap = options.naive_hard_cap;
  config.validate();
  return config;
}

namespace {

struct PreparedInstance {
  BanditInstance instance;
  GroundTruth truth;
};

std::vector<PreparedInstance> prepare_instances(const ExperimentOptions& options) {
  std::vector<PreparedInstance> out(options.instances);
  parallel_for(options.instances, options.threads, [&](std::size_t i) {
    out[i].instance = harness_instance(options, i);
    out[i].truth = ground_truth(out[i].instance);
  });
  return out;
}

void require_runs(const ExperimentOptions& options) {
  if (options.instances == 0 || options.replications == 0) {
    throw InvalidConfig("instances and replications must be positive");
  }
  if (options.budgets.empty()) throw InvalidConfig("at least one budget is required");
  if (options.revealers.empty()) throw InvalidConfig("at least one revealer is required");
}

}  // namespace

std::vector<TraceRow> simulate_experiment(const ExperimentOptions& options) {
  require_runs(options);
  const auto prepared = prepare_instances(options);
  const std::size_t R = options.replications, A = options.revealers.size();
  std::vector<std::vector<TraceRow>> per_job(options.instances * R * A);
  for (auto kind : options.revealers) harness_config(options, options.budgets.front(), kind);
  parallel_for(per_job.size(), options.threads, [&](std::size_t job) {
    const std::size_t i = job / (R * A), r = (job / A) % R, a = job % A;
    const auto& p = prepared[i];
    const StreamKey key{options.seed, i, r};
    const auto seq = generate_arrivals(p.instance, p.truth, options.horizon, ArrivalOrder::iid, key);
    const auto config = harness_config(options, options.budgets.front(), options.revealers[a]);
    const auto report = run_trajectory(p.instance, p.truth, seq, config, key);
    const std::string label = algo_label(options.revealers[a], options.learner);
    auto& rows = per_job[job];
    rows.reserve(report.trace.size());
    for (const auto& step : report.trace) rows.push_back({i, r, label, step});
  });
  std::vector<TraceRow> rows;
  for (auto& chunk : per_job) rows.insert(rows.end(), chunk.begin(), chunk.end());
  return rows;
}

RegretResult regret_experiment(const ExperimentOptions& options) {
  require_runs(options);
  const auto prepared = prepare_instances(options);
  const std::size_t I = options.instances, R = options.replications, A = options.revealers.size();
  const std::size_t T = options.horizon;
  RegretResult result;

  for (double budget : options.budgets) {
    std::vector<RunConfig> configs;
    for (auto kind : options.revealers) {
      configs.push_back(harness_config(options, budget, kind));
      configs.back().record_trace = false;
    }
    // curves[(a * I + i) * R + r] holds one cumulative regret curve.
    std::vector<std::vector<double>> curves(A * I * R);
    std::vector<unsigned char> violated(A * I * R, 0);
    parallel_for(I * R, options.threads, [&](std::size_t job) {
      const std::size_t i = job / R, r = job % R;
      const auto& p = prepared[i];
      const StreamKey key{options.seed, i, r};
      const auto seq = generate_arrivals(p.instance, p.truth, T, ArrivalOrder::iid, key);
      for (std::size_t a = 0; a < A; ++a) {
        auto report = run_trajectory(p.instance, p.truth, seq, configs[a], key);
        const std::size_t slot = (a * I + i) * R + r;
        if (p.truth.has_positive_gap && configs[a].learner == LearnerKind::ucb) {
          const double rhs = regret_bound_rhs(configs[a], p.instance, p.truth, report.v_clairvoyant);
          violated[slot] = report.regret_curve.back() > rhs ? 1 : 2;
        }
        curves[slot] = std::move(report.regret_curve);
      }
    });

    for (std::size_t a = 0; a < A; ++a) {
      const std::string label = algo_label(options.revealers[a], options.learner);
      std::vector<double> finals(I * R);
      for (std::size_t s = 0; s < I * R; ++s) finals[s] = curves[a * I * R + s].back();
      const auto stats = mean_stderr(finals);
      result.summary.push_back({budget, label, "final_regret", T, stats.mean, stats.stderr_, stats.n});
      std::vector<double> column(I * R);
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t s = 0; s < I * R; ++s) column[s] = curves[a * I * R + s][t];
        const auto cs = mean_stderr(column);
        result.curve.push_back({budget, label, "avg_regret_curve_point", t + 1, cs.mean, cs.stderr_, cs.n});
      }
      for (std::size_t i = 0; i < I; ++i) {
        const auto is = mean_stderr(std::span<const double>(finals).subspan(i * R, R));
        result.instances.push_back({budget, label, i, is.mean, is.stderr_, is.n});
      }
    }
    for (unsigned char v : violated) {
      if (v) ++result.bound_checks;
      if (v == 1) ++result.bound_violations;
    }
  }
  return result;
}

std::vector<SummaryRow> table1_experiment(const ExperimentOptions& options) {
  require_runs(options);
  const BanditInstance instance = harness_instance(options, 0);
  RatioExperimentOptions ro;
  ro.horizon = options.horizon;
  ro.learner = options.learner;
  ro.delta = options.delta;
  ro.beta_scale = options.beta_scale;
  ro.threads = options.threads;
  const auto table = competitive_ratio_experiment(instance, options.replications, options.budgets,
                                                  {options.seed, 0, 0}, ro);
  std::vector<SummaryRow> rows;
  for (const auto& row : table) {
    rows.push_back({row.budget, algo_label(row.revealer, options.learner), "competitive_ratio",
                    options.horizon, row.mean, row.stderr_, row.num_samples});
  }
  return rows;
}

AuditResult audit_experiment(const ExperimentOptions& options, bool inject_fault) {
  require_runs(options);
  const auto prepared = prepare_instances(options);
  std::vector<RevealerKind> kinds;
  for (auto k : options.revealers) {
    if (k != RevealerKind::naive) kinds.push_back(k);
  }
  if (kinds.empty()) throw InvalidConfig("audit needs pd1 or pd2 among the revealers");
  const std::size_t R = options.replications, A = kinds.size(), B = options.budgets.size();
  const std::size_t jobs = options.instances * R * A * B;
  std::vector<AuditVerdict> verdicts(jobs);
  std::vector<std::size_t> steps(jobs, 0);
  parallel_for(jobs, options.threads, [&](std::size_t job) {
    const std::size_t b = job % B, a = (job / B) % A, r = (job / (A * B)) % R, i = job / (R * A * B);
    const auto& p = prepared[i];
    const StreamKey key{options.seed, i, r};
    const auto seq = generate_arrivals(p.instance, p.truth, options.horizon, ArrivalOrder::iid, key);
    auto report = run_trajectory(p.instance, p.truth, seq, harness_config(options, options.budgets[b], kinds[a]), key);
    if (inject_fault && job == 0 && !report.trace.empty()) {
      auto& out = report.trace.front().output;
      out.o = out.spent_before > report.budget ? 1.0 : report.budget - out.spent_before + 0.5;
    }
    steps[job] = report.trace.size();
    const std::string where = "instance " + std::to_string(i) + " replication " + std::to_string(r) + " " +
                              algo_label(kinds[a], options.learner) + " B=" + csv_number(options.budgets[b]) +
                              " ";
    verdicts[job].merge(audit_trajectory(report), where);
  });
  AuditResult result;
  result.trajectories = jobs;
  for (std::size_t j = 0; j < jobs; ++j) {
    result.steps += steps[j];
    result.verdict.merge(verdicts[j]);
  }
  return result;
}

}  // namespace reveal
