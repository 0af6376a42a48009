#include "cli.hpp"

#include "reveal/csv.hpp"
#include "reveal/harness.hpp"
#include "reveal/kv_text.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>

namespace reveal::cli {

namespace {

struct Flags {
  std::vector<double> budgets;
  std::size_t horizon = 300;
  std::size_t contexts = 10;
  std::size_t actions = 5;
  std::optional<std::size_t> instances;
  std::optional<std::size_t> replications;
  std::uint64_t seed = 0;
  std::vector<std::string> revealers;
  std::string learner = "ucb";
  std::string context_dist = "known";
  double delta = 0.1;
  double beta_scale = 1.0;
  double noise_std = 0.1;
  bool naive_hard_cap = false;
  bool inject_fault = false;
  std::string out;
  unsigned threads = 1;
  std::string config;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--budget", f.budgets, "Reveal budget B (repeatable)");
  cmd->add_option("--horizon", f.horizon, "Horizon T")->check(CLI::PositiveNumber);
  cmd->add_option("--contexts", f.contexts, "Number of contexts K")->check(CLI::PositiveNumber);
  cmd->add_option("--actions", f.actions, "Number of actions |A|")->check(CLI::Range(2, 1000));
  cmd->add_option("--instances", f.instances, "Number of generated instances");
  cmd->add_option("--replications", f.replications, "Replications (arrival sequences) per instance");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--revealer", f.revealers, "pd1 | pd2 | naive (repeatable)");
  cmd->add_option("--learner", f.learner, "ucb | ts | oracle");
  cmd->add_option("--context-dist", f.context_dist, "known | plugin");
  cmd->add_option("--delta", f.delta, "Confidence level delta");
  cmd->add_option("--beta-scale", f.beta_scale, "Multiplier on the default beta schedule");
  cmd->add_option("--noise-std", f.noise_std, "Reward noise standard deviation");
  cmd->add_flag("--naive-hard-cap", f.naive_hard_cap, "Stop naive reveals once B reveals happened");
  cmd->add_option("--out", f.out, "Output directory (file for gen-instance); stdout when omitted");
  cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--config", f.config, "key: value file with flag defaults");
}

ExperimentOptions to_options(const Flags& f, std::vector<double> default_budgets, std::size_t instances,
                             std::size_t replications, std::vector<RevealerKind> default_revealers) {
  ExperimentOptions o;
  o.contexts = f.contexts;
  o.actions = f.actions;
  o.horizon = f.horizon;
  o.instances = f.instances.value_or(instances);
  o.replications = f.replications.value_or(replications);
  o.seed = f.seed;
  o.budgets = f.budgets.empty() ? std::move(default_budgets) : f.budgets;
  o.revealers.clear();
  for (const auto& r : f.revealers) o.revealers.push_back(parse_revealer_kind(r));
  if (o.revealers.empty()) o.revealers = std::move(default_revealers);
  o.learner = parse_learner_kind(f.learner);
  o.context_dist = parse_context_dist_mode(f.context_dist);
  o.delta = f.delta;
  o.beta_scale = f.beta_scale;
  o.noise_std = f.noise_std;
  o.naive_hard_cap = f.naive_hard_cap;
  o.threads = f.threads;
  if (o.instances == 0 || o.replications == 0) throw InvalidConfig("instances and replications must be positive");
  for (double b : o.budgets) {
    if (!(b >= 0.0)) throw InvalidConfig("budgets must be non-negative");
  }
  return o;
}

std::filesystem::path output_dir(const std::string& out) {
  std::filesystem::path dir(out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create output directory '" + out + "': " + ec.message());
  return dir;
}

void emit(const std::string& out_dir, const std::string& file, const std::string& content, std::ostream& out) {
  if (out_dir.empty()) {
    out << content;
  } else {
    write_text_file((output_dir(out_dir) / file).string(), content);
  }
}

std::string flag_name(const std::string& arg) {
  if (arg.rfind("--", 0) != 0) return {};
  return arg.substr(2, arg.find('=') - 2);
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> config_paths;
  std::set<std::string> explicit_keys;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string name = flag_name(args[i]);
    if (name.empty()) continue;
    explicit_keys.insert(name);
    if (name == "config") {
      const auto eq = args[i].find('=');
      if (eq != std::string::npos) {
        config_paths.push_back(args[i].substr(eq + 1));
      } else if (i + 1 < args.size()) {
        config_paths.push_back(args[i + 1]);
      }
    }
  }
  if (config_paths.empty() || args.empty()) return args;

  std::vector<std::string> injected;
  for (const auto& path : config_paths) {
    const auto doc = KeyValueDocument::load(path);
    for (const auto& key : doc.keys()) {
      if (key == "config" || explicit_keys.count(key)) continue;
      const std::string& value = doc.get(key);
      if (value == "true" || value == "false") {
        if (value == "true") injected.push_back("--" + key);
        continue;
      }
      std::size_t pos = 0;
      while (pos < value.size()) {
        const auto start = value.find_first_not_of(" \t", pos);
        if (start == std::string::npos) break;
        auto end = value.find_first_of(" \t", start);
        if (end == std::string::npos) end = value.size();
        injected.push_back("--" + key);
        injected.push_back(value.substr(start, end - start));
        pos = end;
      }
    }
  }
  // Subcommand name first, then config-derived flags, then explicit flags.
  std::vector<std::string> out{args.front()};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

int cli_main(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Budgeted information revealing for linear contextual bandits"};
  app.require_subcommand(1);
  Flags f;
  auto* simulate = app.add_subcommand("simulate", "Run one configuration and emit the per-step trace");
  auto* table1 = app.add_subcommand("table1", "Competitive-ratio sweep over budgets");
  auto* regret = app.add_subcommand("regret", "Regret comparison of pd1, pd2 and naive");
  auto* audit = app.add_subcommand("audit", "Feasibility, ratio and induction audits");
  auto* gen = app.add_subcommand("gen-instance", "Emit a serialized synthetic instance");
  for (auto* cmd : {simulate, table1, regret, audit, gen}) add_common(cmd, f);
  audit->add_flag("--inject-fault", f.inject_fault, "Corrupt one o_t to check that the audit fails");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (simulate->parsed()) {
      auto o = to_options(f, {10.0}, 1, 1, {RevealerKind::pd2});
      if (o.budgets.size() != 1) throw InvalidConfig("simulate takes a single --budget");
      emit(f.out, "trace.csv", trace_csv(simulate_experiment(o)), out);
    } else if (table1->parsed()) {
      auto o = to_options(f, {2, 4, 8, 16, 32, 64}, 1, 200, {RevealerKind::pd1, RevealerKind::pd2});
      emit(f.out, "table1.csv", summary_csv(table1_experiment(o)), out);
    } else if (regret->parsed()) {
      auto o = to_options(f, {10, 20, 30}, 50, 50,
                          {RevealerKind::pd1, RevealerKind::pd2, RevealerKind::naive});
      const auto result = regret_experiment(o);
      emit(f.out, "regret_summary.csv", summary_csv(result.summary), out);
      if (!f.out.empty()) {
        emit(f.out, "regret_curve.csv", summary_csv(result.curve), out);
        emit(f.out, "regret_instances.csv", instance_csv(result.instances), out);
      }
      err << "regret bound checks: " << result.bound_checks << ", violations: " << result.bound_violations
          << '\n';
    } else if (audit->parsed()) {
      auto o = to_options(f, {10.0}, 1, 100, {RevealerKind::pd1, RevealerKind::pd2});
      const auto result = audit_experiment(o, f.inject_fault);
      out << "audited " << result.trajectories << " trajectories, " << result.steps << " steps: "
          << (result.verdict.ok ? "ok" : "FAILED") << '\n';
      const std::size_t shown = std::min<std::size_t>(result.verdict.failures.size(), 20);
      for (std::size_t i = 0; i < shown; ++i) out << "  " << result.verdict.failures[i] << '\n';
      if (result.verdict.failures.size() > shown) {
        out << "  ... " << result.verdict.failures.size() - shown << " more\n";
      }
      return result.verdict.ok ? 0 : 1;
    } else if (gen->parsed()) {
      auto o = to_options(f, {10.0}, 1, 1, {RevealerKind::pd2});
      const auto instance = harness_instance(o, 0);
      if (f.out.empty()) {
        save_instance(instance, out);
      } else {
        save_instance(instance, f.out);
      }
    }
  } catch (const InvalidConfig& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace reveal::cli
