#include "reveal/csv.hpp"
#include "reveal/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

using namespace reveal;

namespace {

ExperimentOptions small_options() {
  ExperimentOptions o;
  o.contexts = 4;
  o.actions = 3;
  o.horizon = 40;
  o.instances = 3;
  o.replications = 4;
  o.seed = 5;
  return o;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("empty tables are header-only") {
  CHECK(trace_csv({}) == std::string(kTraceHeader) + "\n");
  CHECK(summary_csv({}) == std::string(kSummaryHeader) + "\n");
  CHECK(instance_csv({}) == std::string(kInstanceHeader) + "\n");
}

TEST_CASE("csv numbers") {
  CHECK(csv_number(0.5) == "0.5");
  CHECK(csv_number(-2.0) == "-2");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(csv_number(x)) == x);
  CHECK(csv_line({"a", "1", "2.5"}) == "a,1,2.5\n");
}

TEST_CASE("summary round-trip is exact") {
  std::vector<SummaryRow> rows{
      {10, "pd2-ucb", "final_regret", 300, 56.391234567891234, 0.98123456789, 2500},
      {2, "pd1-oracle", "competitive_ratio", 300, 1.0 / 3.0, 1e-17, 200},
      {30, "naive-ts", "avg_regret_curve_point", 7, -0.0001234, 0.0, 1},
  };
  std::istringstream in(summary_csv(rows));
  CHECK(parse_summary_csv(in) == rows);

  std::istringstream bad("budget,algo\n1,x\n");
  CHECK_THROWS_AS(parse_summary_csv(bad), InvalidInput);
}

TEST_CASE("generic csv parsing") {
  std::istringstream in("a,b\n1,2\n3,4\n");
  const auto t = parse_csv(in);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  CHECK(t.rows.size() == 2);
  CHECK(t.column("b") == 1);
  CHECK(t.rows[1][t.column("a")] == "3");
  CHECK_THROWS_AS(t.column("c"), InvalidInput);
  std::istringstream ragged("a,b\n1\n");
  CHECK_THROWS_AS(parse_csv(ragged), InvalidInput);
}

TEST_CASE("write failures name the path") {
  try {
    write_text_file("/nonexistent-dir/x.csv", "a\n");
    FAIL("expected a throw");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("/nonexistent-dir/x.csv") != std::string::npos);
  }
}

TEST_CASE("mean and standard error") {
  const std::vector<double> xs{1, 2, 3};
  const auto m = mean_stderr(xs);
  CHECK(m.mean == doctest::Approx(2.0));
  CHECK(m.stderr_ == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(m.n == 3);
  const std::vector<double> one{4};
  CHECK(mean_stderr(one).stderr_ == 0.0);
}

TEST_CASE("algo labels") {
  CHECK(algo_label(RevealerKind::pd2, LearnerKind::ucb) == "pd2-ucb");
  CHECK(algo_label(RevealerKind::naive, LearnerKind::ts) == "naive-ts");
}

TEST_CASE("simulate emits ordered traces") {
  auto o = small_options();
  o.instances = 2;
  o.replications = 2;
  const auto rows = simulate_experiment(o);
  CHECK(rows.size() == 2 * 2 * 3 * 40);
  std::map<std::tuple<std::size_t, std::size_t, std::string>, std::size_t> last;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(r.instance_id, r.replication, r.algo);
    auto it = last.find(key);
    if (it != last.end()) CHECK(r.step.t == it->second + 1);
    else CHECK(r.step.t == 1);
    last[key] = r.step.t;
  }
  const std::string csv = trace_csv(rows);
  CHECK(count_lines(csv) == rows.size() + 1);
  std::istringstream in(csv);
  const auto table = parse_csv(in);
  const auto col = table.column("O_t");
  for (const auto& row : table.rows) CHECK((row[col] == "0" || row[col] == "1"));
}

TEST_CASE("regret experiment shape and thread independence") {
  auto o = small_options();
  const auto a = regret_experiment(o);
  CHECK(a.summary.size() == 3);
  CHECK(a.curve.size() == 3 * 40);
  CHECK(a.instances.size() == 3 * 3);
  for (const auto& row : a.summary) {
    CHECK(row.metric == "final_regret");
    CHECK(row.num_samples == 12);
    CHECK(row.t == 40);
  }
  CHECK(a.bound_checks > 0);
  CHECK(a.bound_violations == 0);
  o.threads = 4;
  const auto b = regret_experiment(o);
  CHECK(summary_csv(a.summary) == summary_csv(b.summary));
  CHECK(summary_csv(a.curve) == summary_csv(b.curve));
  CHECK(instance_csv(a.instances) == instance_csv(b.instances));

  o.budgets = {10, 20, 30};
  CHECK(regret_experiment(o).summary.size() == 9);
}

TEST_CASE("table1 shape") {
  auto o = small_options();
  o.budgets = {2, 4, 8, 16, 32, 64};
  o.replications = 5;
  const auto rows = table1_experiment(o);
  CHECK(rows.size() == 12);
  for (const auto& r : rows) {
    CHECK(r.metric == "competitive_ratio");
    CHECK(r.num_samples == 5);
    CHECK(r.mean <= 1.0 + 1e-9);
  }
  o.threads = 3;
  CHECK(summary_csv(rows) == summary_csv(table1_experiment(o)));
}

TEST_CASE("audit fault injection") {
  auto o = small_options();
  o.revealers = {RevealerKind::pd1};
  const auto clean = audit_experiment(o);
  CHECK(clean.trajectories == 3 * 4);
  CHECK(clean.steps == 3 * 4 * 40);
  const auto faulty = audit_experiment(o, true);
  CHECK_FALSE(faulty.verdict.ok);
  bool budget = false;
  for (const auto& f : faulty.verdict.failures) budget |= f.find("budget") != std::string::npos;
  CHECK(budget);
  o.revealers = {RevealerKind::naive};
  CHECK_THROWS_AS(audit_experiment(o), InvalidConfig);
}
