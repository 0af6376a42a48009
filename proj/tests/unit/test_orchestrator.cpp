#include "reveal/learner.hpp"
#include "reveal/orchestrator.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

using namespace reveal;

namespace {

struct Fixture {
  BanditInstance instance;
  GroundTruth truth;
  ArrivalSequence sequence;
};

Fixture make_fixture(std::uint64_t seed, std::size_t K = 10, std::size_t A = 5, std::size_t T = 300) {
  Fixture f;
  Rng rng = make_stream({seed, 0, 0}, "instance");
  f.instance = generate_synthetic_instance(K, A, rng);
  f.truth = ground_truth(f.instance);
  f.sequence = generate_arrivals(f.instance, f.truth, T, ArrivalOrder::iid, {seed, 0, 0});
  return f;
}

RunConfig config_for(RevealerKind revealer, LearnerKind learner, double budget = 10, std::size_t T = 300) {
  RunConfig c;
  c.revealer = revealer;
  c.learner = learner;
  c.budget = budget;
  c.horizon = T;
  return c;
}

// The per-step dual/primal certificate bounds z_t by o_t - y, which needs o_t to
// equal its target u_gap + D e_t. When the cap at 1 or the remaining budget clips
// o_t, the ratio can exceed (1 + 1/(c-1))/eta_min. Every other audit obligation
// must hold on every step, and the ratio must hold on every unclipped step.
void check_audit_failures_are_clipped(const ExperimentReport& r) {
  for (const auto& rec : r.trace) {
    RevealerState before = RevealerState::create(r.budget);
    before.dual_y = rec.output.y_before;
    before.spent = rec.output.spent_before;
    const auto v = audit_step(before, rec.input, rec.output, r.eta_min_used);
    if (v.ok) continue;
    const double D = rec.input.actions_differ() ? rec.input.phi_bar_distance : 0.0;
    const bool clipped = rec.output.o < rec.input.u_gap + D * rec.output.e - 1e-12;
    CHECK_MESSAGE(clipped, "t=" << rec.t << ": " << v.failures.front());
    for (const auto& f : v.failures) CHECK_MESSAGE(f.rfind("dual/primal ratio", 0) == 0, f);
  }
  std::vector<StepOutput> outs;
  for (const auto& rec : r.trace) outs.push_back(rec.output);
  CHECK(induction_bound_check(outs, r.budget).ok);
}

}  // namespace

TEST_CASE("enum names round-trip") {
  for (auto k : {RevealerKind::pd1, RevealerKind::pd2, RevealerKind::naive}) {
    CHECK(parse_revealer_kind(to_string(k)) == k);
  }
  for (auto k : {LearnerKind::ucb, LearnerKind::ts, LearnerKind::oracle}) CHECK(parse_learner_kind(to_string(k)) == k);
  for (auto k : {ContextDistMode::known, ContextDistMode::plugin}) CHECK(parse_context_dist_mode(to_string(k)) == k);
  for (auto k : {GapSource::learner, GapSource::ground_truth}) CHECK(parse_gap_source(to_string(k)) == k);
  CHECK_THROWS_AS(parse_revealer_kind("pd3"), InvalidConfig);
}

TEST_CASE("run config validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.horizon = 0;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = RunConfig{};
  c.revealer = RevealerKind::pd2;
  c.budget = 1;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c.revealer = RevealerKind::pd1;
  CHECK_NOTHROW(c.validate());
  c.budget = -1;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = RunConfig{};
  c.delta = 1.0;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = RunConfig{};
  CHECK_FALSE(c.budget_assumption_holds(5));
  c.budget = 11;
  CHECK(c.budget_assumption_holds(5));
}

TEST_CASE("arrival orderings") {
  const auto f = make_fixture(2, 10, 5, 50);
  const auto desc = generate_arrivals(f.instance, f.truth, 50, ArrivalOrder::descending, {2, 0, 0});
  const auto asc = generate_arrivals(f.instance, f.truth, 50, ArrivalOrder::ascending, {2, 0, 0});
  auto sorted = f.sequence.contexts;
  std::sort(sorted.begin(), sorted.end());
  auto d = desc.contexts;
  std::sort(d.begin(), d.end());
  CHECK(d == sorted);
  for (std::size_t t = 1; t < 50; ++t) {
    CHECK(f.truth.u_star[static_cast<Eigen::Index>(desc.contexts[t - 1])] >=
          f.truth.u_star[static_cast<Eigen::Index>(desc.contexts[t])]);
    CHECK(f.truth.u_star[static_cast<Eigen::Index>(asc.contexts[t - 1])] <=
          f.truth.u_star[static_cast<Eigen::Index>(asc.contexts[t])]);
  }
  std::vector<std::size_t> rev(50);
  std::iota(rev.rbegin(), rev.rend(), 0);
  const auto p = generate_arrivals(f.instance, f.truth, 50, ArrivalOrder::permutation, {2, 0, 0}, rev);
  for (std::size_t t = 0; t < 50; ++t) CHECK(p.contexts[t] == f.sequence.contexts[49 - t]);
  std::vector<std::size_t> bad(50, 0);
  CHECK_THROWS_AS(generate_arrivals(f.instance, f.truth, 50, ArrivalOrder::permutation, {2, 0, 0}, bad),
                  InvalidConfig);
}

TEST_CASE("oracle learner has zero bandit learning loss") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = make_fixture(seed);
    for (auto kind : {RevealerKind::pd1, RevealerKind::pd2, RevealerKind::naive}) {
      const auto r = run_trajectory(f.instance, f.truth, f.sequence, config_for(kind, LearnerKind::oracle), {seed, 0, 0});
      CHECK(r.v_alg == doctest::Approx(r.v_auxiliary).epsilon(1e-12));
      CHECK(compute_bll(r, r) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("never revealing with the oracle earns T v*") {
  const auto f = make_fixture(4);
  for (auto kind : {RevealerKind::pd1, RevealerKind::naive}) {
    const auto r = run_trajectory(f.instance, f.truth, f.sequence, config_for(kind, LearnerKind::oracle, 0), {4, 0, 0});
    CHECK(r.reveals == 0);
    CHECK(r.budget_spent == 0.0);
    CHECK(r.v_alg == doctest::Approx(300 * f.truth.v_star));

    // Against a B = 3 clairvoyant the loss is the sum of the three largest positive gaps.
    auto gaps = sequence_gaps(f.truth, f.sequence);
    const auto plan = solve_clairvoyant(gaps, 3);
    const auto curve =
        compute_regret(r.alg_values, clairvoyant_step_values(f.truth, f.sequence, plan));
    std::sort(gaps.begin(), gaps.end(), std::greater<>());
    double top = 0;
    for (int i = 0; i < 3; ++i) top += std::max(0.0, gaps[static_cast<std::size_t>(i)]);
    CHECK(curve.back() == doctest::Approx(top));
  }
}

TEST_CASE("replaying the clairvoyant's plan gives zero regret") {
  const auto f = make_fixture(6, 4, 3, 20);
  const auto plan = solve_clairvoyant(sequence_gaps(f.truth, f.sequence), 3);
  const auto values = clairvoyant_step_values(f.truth, f.sequence, plan);
  for (double r : compute_regret(values, values)) CHECK(r == 0.0);
}

TEST_CASE("regret curve telescopes") {
  const std::vector<double> alg{1.0, 0.5, 2.0};
  const std::vector<double> clair{1.5, 0.5, 2.25};
  const auto curve = compute_regret(alg, clair);
  CHECK(curve == std::vector<double>{0.5, 0.5, 0.75});
  CHECK_THROWS_AS(compute_regret(alg, std::vector<double>{1.0}), InvalidInput);

  const auto f = make_fixture(1);
  const auto r = run_trajectory(f.instance, f.truth, f.sequence, config_for(RevealerKind::pd2, LearnerKind::ucb), {1, 0, 0});
  REQUIRE(r.regret_curve.size() == 300);
  for (std::size_t t = 0; t < 300; ++t) {
    const double prev = t == 0 ? 0.0 : r.regret_curve[t - 1];
    CHECK(r.regret_curve[t] - prev == doctest::Approx(r.clairvoyant_values[t] - r.alg_values[t]));
    CHECK(r.trace[t].cum_regret == r.regret_curve[t]);
  }
}

TEST_CASE("runs are deterministic") {
  const auto f = make_fixture(9);
  for (auto learner : {LearnerKind::ucb, LearnerKind::ts}) {
    const auto cfg = config_for(RevealerKind::pd2, learner);
    const auto a = run_trajectory(f.instance, f.truth, f.sequence, cfg, {9, 0, 3});
    const auto b = run_trajectory(f.instance, f.truth, f.sequence, cfg, {9, 0, 3});
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t t = 0; t < a.trace.size(); ++t) {
      CHECK(a.trace[t].action == b.trace[t].action);
      CHECK(a.trace[t].revealed == b.trace[t].revealed);
      CHECK(a.trace[t].realized_reward == b.trace[t].realized_reward);
      CHECK(a.trace[t].output.o == b.trace[t].output.o);
      CHECK(a.trace[t].output.y_after == b.trace[t].output.y_after);
    }
    CHECK(a.v_alg == b.v_alg);
    const auto c = run_trajectory(f.instance, f.truth, f.sequence, cfg, {9, 0, 4});
    bool differs = false;
    for (std::size_t t = 0; t < a.trace.size(); ++t) differs |= a.trace[t].realized_reward != c.trace[t].realized_reward;
    CHECK(differs);
  }
}

TEST_CASE("trajectory invariants") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = make_fixture(seed);
    for (auto kind : {RevealerKind::pd1, RevealerKind::pd2, RevealerKind::naive}) {
      for (auto learner : {LearnerKind::ucb, LearnerKind::ts}) {
        for (auto mode : {ContextDistMode::known, ContextDistMode::plugin}) {
          auto cfg = config_for(kind, learner);
          cfg.context_dist = mode;
          const auto r = run_trajectory(f.instance, f.truth, f.sequence, cfg, {seed, 0, 0});
          double spent = 0;
          std::size_t reveals = 0;
          for (const auto& rec : r.trace) {
            spent += rec.output.o;
            reveals += rec.revealed;
            CHECK(rec.output.o >= 0.0);
            CHECK(rec.output.o <= 1.0);
            if (rec.revealed) {
              CHECK(rec.action == rec.contextual_action);
              CHECK(rec.output.o > 0.0);
            }
          }
          CHECK(spent == doctest::Approx(r.budget_spent));
          CHECK(r.budget_spent <= cfg.budget + 1e-9);
          CHECK(reveals == r.reveals);
          // Decomposition of the regret into learning and reveal losses.
          const double regret = r.v_clairvoyant - r.v_alg;
          CHECK(r.regret_curve.back() == doctest::Approx(regret));
          CHECK(regret == doctest::Approx((r.v_auxiliary - r.v_alg) + (r.v_clairvoyant - r.v_auxiliary)));
          if (kind != RevealerKind::naive) check_audit_failures_are_clipped(r);
        }
      }
    }
  }
}

TEST_CASE("naive hard cap stops after B realized reveals") {
  const auto f = make_fixture(3);
  auto cfg = config_for(RevealerKind::naive, LearnerKind::ucb, 10);
  const auto soft = run_trajectory(f.instance, f.truth, f.sequence, cfg, {3, 0, 0});
  for (const auto& rec : soft.trace) CHECK(rec.output.o == doctest::Approx(10.0 / 300));
  CHECK(soft.budget_spent == doctest::Approx(10.0));
  cfg.naive_hard_cap = true;
  cfg.budget = 2;
  const auto hard = run_trajectory(f.instance, f.truth, f.sequence, cfg, {3, 0, 0});
  CHECK(hard.reveals <= 2);
}

TEST_CASE("oracle runs meet the competitive-ratio lower bound") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = make_fixture(seed);
    if (!f.truth.has_positive_gap) continue;
    for (auto kind : {RevealerKind::pd1, RevealerKind::pd2}) {
      for (double B : {2.0, 10.0, 30.0}) {
        const auto r =
            run_trajectory(f.instance, f.truth, f.sequence, config_for(kind, LearnerKind::oracle, B), {seed, 0, 0});
        const double bound = r.eta_min_used * (1.0 - 1.0 / growth_constant(B));
        CHECK(r.competitive_ratio >= bound - 1e-6);
        CHECK(r.competitive_ratio <= 1.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("zero distance makes pd2 replay pd1") {
  const auto f = make_fixture(5);
  auto c1 = config_for(RevealerKind::pd1, LearnerKind::ucb);
  auto c2 = config_for(RevealerKind::pd2, LearnerKind::ucb);
  c2.force_zero_distance = true;
  const auto a = run_trajectory(f.instance, f.truth, f.sequence, c1, {5, 0, 0});
  const auto b = run_trajectory(f.instance, f.truth, f.sequence, c2, {5, 0, 0});
  for (std::size_t t = 0; t < 300; ++t) {
    CHECK(a.trace[t].output.o == b.trace[t].output.o);
    CHECK(a.trace[t].action == b.trace[t].action);
  }
  CHECK(a.v_alg == b.v_alg);
}

TEST_CASE("bandit learning loss") {
  const auto f = make_fixture(8);
  auto alg = config_for(RevealerKind::pd2, LearnerKind::ucb);
  auto aux = config_for(RevealerKind::pd2, LearnerKind::oracle);
  aux.gap_source = GapSource::ground_truth;
  const auto ra = run_trajectory(f.instance, f.truth, f.sequence, alg, {8, 0, 0});
  const auto rx = run_trajectory(f.instance, f.truth, f.sequence, aux, {8, 0, 0});
  CHECK(compute_bll(ra, rx) == doctest::Approx(rx.v_auxiliary - ra.v_alg));
  const std::vector<ExperimentReport> as{ra, ra}, xs{rx, rx};
  CHECK(compute_bll(as, xs) == doctest::Approx(compute_bll(ra, rx)));

  auto other = ra;
  other.contexts[0] = (other.contexts[0] + 1) % 10;
  CHECK_THROWS_AS(compute_bll(other, rx), InvalidInput);
  auto budget = ra;
  budget.budget = 20;
  CHECK_THROWS_AS(compute_bll(budget, rx), InvalidInput);
  CHECK_THROWS_AS(compute_bll(std::vector<ExperimentReport>{ra}, std::vector<ExperimentReport>{}), InvalidInput);

  // One step: the loss is at most the largest per-step value difference.
  const auto g = make_fixture(8, 10, 5, 1);
  auto one = config_for(RevealerKind::pd1, LearnerKind::ucb, 10, 1);
  auto one_aux = config_for(RevealerKind::pd1, LearnerKind::oracle, 10, 1);
  const auto s1 = run_trajectory(g.instance, g.truth, g.sequence, one, {8, 0, 0});
  const auto s2 = run_trajectory(g.instance, g.truth, g.sequence, one_aux, {8, 0, 0});
  const double span = f.truth.u_max - std::min(g.truth.u_min, 0.0);
  CHECK(compute_bll(s1, s2) <= span + 1e-12);
}

TEST_CASE("regret bound right-hand side") {
  const double gamma = radius_gamma(0.1, 9, 100, 1, 1);
  RegretBoundInputs in;
  in.horizon = 100;
  in.dim = 9;
  in.gamma = gamma;
  in.ratio = 1.0;
  in.clairvoyant_value = 123.0;
  CHECK(regret_bound_rhs(in) == doctest::Approx(std::sqrt(8.0 * 100 * 9 * gamma * gamma * std::log(109.0 / 9))));
  const double base = regret_bound_rhs(in);
  in.beta = {0.5, 0.25, 0.25};
  in.theta_bound = 1.0;
  const double with_beta = regret_bound_rhs(in);
  CHECK(with_beta == doctest::Approx(base + 1.0));
  for (double& b : in.beta) b *= 2;
  CHECK(regret_bound_rhs(in) - with_beta == doctest::Approx(1.0));
  in.beta.clear();
  in.ratio = 0.25;
  CHECK(regret_bound_rhs(in) == doctest::Approx(base + 0.75 * 123.0));

  const auto f = make_fixture(1);
  const auto cfg = config_for(RevealerKind::pd2, LearnerKind::ucb);
  const auto r = run_trajectory(f.instance, f.truth, f.sequence, cfg, {1, 0, 0});
  CHECK(r.regret_curve.back() <= regret_bound_rhs(cfg, f.instance, f.truth, r.v_clairvoyant));
}

TEST_CASE("competitive ratio experiment") {
  const auto f = make_fixture(11);
  RatioExperimentOptions opt;
  opt.horizon = 60;
  const auto rows = competitive_ratio_experiment(f.instance, 8, {2, 4}, {11, 0, 0}, opt);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].budget == 2);
  CHECK(rows[0].revealer == RevealerKind::pd1);
  CHECK(rows[1].revealer == RevealerKind::pd2);
  for (const auto& row : rows) {
    CHECK(row.num_samples == 8);
    CHECK(row.mean <= 1.0 + 1e-9);
    CHECK(row.mean >= row.assumption_bound - 1e-6);
    CHECK(row.stderr_ >= 0.0);
  }
  opt.threads = 3;
  const auto again = competitive_ratio_experiment(f.instance, 8, {2, 4}, {11, 0, 0}, opt);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].mean == again[i].mean);

  // With B = T every positive gap can be revealed in full.
  opt.horizon = 4;
  opt.learner = LearnerKind::oracle;
  const auto all = competitive_ratio_experiment(f.instance, 5, {4}, {11, 0, 0}, opt);
  CHECK(all[0].assumption_bound <= all[0].mean + 1e-6);
}
