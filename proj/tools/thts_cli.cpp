// thts: plan, bench and bandit-sim front end.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "thts/bandit_sim.hpp"
#include "thts/bench.hpp"
#include "thts/pddl.hpp"
#include "thts/search.hpp"
#include "thts/simd.hpp"

namespace {

struct PlanOptions {
  std::string domain;
  std::string problem;
  std::string search = "guct-uniform";
  std::string heuristic = "ff";
  std::uint64_t evals = 10000;
  std::uint64_t seed = 0;
  bool po = false;
  double c = 1.0;
  std::string uniform = "scaled";
  std::string plan_file;
  bool verbose = false;
  bool action_costs = false;
  bool no_auer = false;
};

int run_plan(const PlanOptions& o) {
  thts::pddl::GroundingOptions grounding;
  grounding.unit_costs = !o.action_costs;
  const thts::GroundTask task = thts::pddl::load_task(o.domain, o.problem, grounding);

  thts::SearchConfig config;
  config.algorithm = thts::parse_algorithm(o.search);
  config.heuristic = thts::parse_heuristic_kind(o.heuristic);
  config.policy.c = o.c;
  config.policy.uniform = thts::bandit::parse_uniform_exploration(o.uniform);
  config.policy.auer_side_condition = !o.no_auer;
  config.evaluation_budget = o.evals;
  config.seed = o.seed;
  config.preferred = o.po ? thts::PreferredOperators::kBoost : thts::PreferredOperators::kOff;
  if (o.verbose) config.trial_log = &std::cerr;

  const thts::SearchResult result = thts::run_search(task, config);
  std::ostream& info = o.plan_file.empty() ? std::cerr : std::cout;
  info << "; facts " << task.num_facts() << " actions " << task.num_actions() << '\n'
       << "; outcome " << thts::outcome_name(result.outcome) << '\n'
       << "; evaluations " << result.evaluations << " expansions " << result.expansions << '\n'
       << "; frac_h_above_init " << thts::bench::format_number(result.frac_h_above_init) << '\n';
  if (!result.plan) return 1;
  if (o.plan_file.empty()) {
    thts::write_plan(std::cout, task, *result.plan);
  } else {
    std::ofstream out(o.plan_file);
    if (!out) throw std::runtime_error("cannot write " + o.plan_file);
    thts::write_plan(out, task, *result.plan);
  }
  return 0;
}

struct SimOptions {
  std::string policy = "ucb1";
  std::string arms;
  std::uint64_t horizon = 10000;
  std::uint64_t seeds = 1;
  bool minimize = false;
  double c = 1.0;
  std::string uniform = "scaled";
  std::string output;
  bool no_auer = false;
};

int run_bandit_sim(const SimOptions& o) {
  const auto arms = thts::bandit::parse_arms(o.arms);
  thts::bandit::PolicyConfig policy;
  policy.kind = thts::bandit::parse_policy_kind(o.policy);
  policy.direction =
      o.minimize ? thts::bandit::Direction::kMinimize : thts::bandit::Direction::kMaximize;
  policy.c = o.c;
  policy.uniform = thts::bandit::parse_uniform_exploration(o.uniform);
  policy.auer_side_condition = !o.no_auer;

  std::string label(thts::bandit::policy_name(policy.kind));
  if (policy.kind == thts::bandit::PolicyKind::kUcb1Uniform) {
    label += "/" + std::string(thts::bandit::uniform_exploration_name(policy.uniform));
  }
  std::ofstream file;
  if (!o.output.empty()) {
    file.open(o.output);
    if (!file) throw std::runtime_error("cannot write " + o.output);
  }
  std::ostream& out = o.output.empty() ? std::cout : file;
  for (std::uint64_t seed = 0; seed < o.seeds; ++seed) {
    const auto trace = thts::bandit::simulate(arms, policy, o.horizon, seed);
    thts::bandit::write_regret_csv(out, label, arms, seed, trace, seed == 0);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandit-guided tree search for classical planning"};
  app.require_subcommand(1);

  PlanOptions plan;
  auto* plan_cmd = app.add_subcommand("plan", "Solve one PDDL problem");
  plan_cmd->add_option("domain", plan.domain, "Domain file")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("problem", plan.problem, "Problem file")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--search", plan.search,
                       "gbfs|guct|guct-star|guct-normal|guct-star-normal|guct-normal2|"
                       "guct-star-normal2|guct-plus-normal2|guct-uniform")
      ->capture_default_str();
  plan_cmd->add_option("--heuristic", plan.heuristic, "ff|add|hmax|gc")->capture_default_str();
  plan_cmd->add_option("--evals", plan.evals, "Node evaluation budget")->capture_default_str();
  plan_cmd->add_option("--seed", plan.seed, "Random seed")->capture_default_str();
  plan_cmd->add_flag("--po", plan.po, "Prefer children reached by preferred operators");
  plan_cmd->add_option("--c", plan.c, "UCB1 exploration rate")->capture_default_str();
  plan_cmd->add_option("--uniform-exploration", plan.uniform, "scaled|shrinking")
      ->capture_default_str();
  plan_cmd->add_option("-o,--plan-file", plan.plan_file, "Write the plan here instead of stdout");
  plan_cmd->add_flag("-v,--verbose", plan.verbose, "Per-trial log on stderr");
  plan_cmd->add_flag("--use-action-costs", plan.action_costs, "Keep PDDL action costs");
  plan_cmd->add_flag("--no-auer", plan.no_auer, "Disable the UCB1-Normal side condition");

  std::string suite_path;
  std::string suite_output;
  unsigned jobs = 0;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark suite");
  bench_cmd->add_option("--config", suite_path, "Suite file (JSON)")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--output", suite_output, "Override the CSV output path");
  bench_cmd->add_option("--jobs", jobs, "Override the number of worker threads");

  SimOptions sim;
  auto* sim_cmd = app.add_subcommand("bandit-sim", "Simulate a stationary bandit");
  sim_cmd->add_option("--policy", sim.policy, "ucb1|ucb1-normal|ucb1-normal2|ucb1-uniform")
      ->capture_default_str();
  sim_cmd->add_option("--arms", sim.arms, "e.g. bernoulli:0.9,bernoulli:0.1")->required();
  sim_cmd->add_option("--horizon", sim.horizon, "Number of pulls")->capture_default_str();
  sim_cmd->add_option("--seeds", sim.seeds, "Number of seeds")->capture_default_str();
  sim_cmd->add_flag("--minimize", sim.minimize, "Treat rewards as costs");
  sim_cmd->add_option("--c", sim.c, "UCB1 exploration rate")->capture_default_str();
  sim_cmd->add_option("--uniform-exploration", sim.uniform, "scaled|shrinking")
      ->capture_default_str();
  sim_cmd->add_option("--output", sim.output, "CSV file (default stdout)");
  sim_cmd->add_flag("--no-auer", sim.no_auer, "Disable the UCB1-Normal side condition");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan_cmd) return run_plan(plan);
    if (*bench_cmd) {
      auto config = thts::bench::load_suite(suite_path);
      if (!suite_output.empty()) config.output = suite_output;
      if (jobs > 0) config.jobs = jobs;
      const auto result = thts::bench::run_suite(config);
      if (config.output.empty()) thts::bench::write_csv(std::cout, result);
      std::cerr << "simd kernels: " << thts::simd::kernels().name << '\n';
      return 0;
    }
    if (*sim_cmd) return run_bandit_sim(sim);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
