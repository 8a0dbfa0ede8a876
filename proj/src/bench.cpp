#include "thts/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "thts/pddl.hpp"

namespace thts::bench {

namespace fs = std::filesystem;

void SuiteConfig::validate() const {
  if (problems.empty()) throw std::invalid_argument("suite has no problems");
  if (algorithms.empty()) throw std::invalid_argument("suite has no algorithms");
  if (heuristics.empty()) throw std::invalid_argument("suite has no heuristics");
  if (seeds.empty()) throw std::invalid_argument("suite has no seeds");
  if (evaluation_budget == 0) throw std::invalid_argument("evaluation budget must be > 0");
  if (!(wall_limit_s > 1.0)) throw std::invalid_argument("wall limit must exceed 1 second");
}

SuiteConfig load_suite(const std::string& path) {
  const nlohmann::json j = nlohmann::json::parse(pddl::read_file(path));
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    const fs::path fp(p);
    return (fp.is_absolute() ? fp : base / fp).lexically_normal().string();
  };

  SuiteConfig c;
  for (const auto& entry : j.at("problems")) {
    const std::string domain = entry.at("domain").get<std::string>();
    if (entry.contains("problems")) {
      for (const auto& p : entry.at("problems")) {
        c.problems.push_back({resolve(domain), resolve(p.get<std::string>())});
      }
    } else {
      c.problems.push_back({resolve(domain), resolve(entry.at("problem").get<std::string>())});
    }
  }
  for (const auto& a : j.at("algorithms")) c.algorithms.push_back(parse_algorithm(a.get<std::string>()));
  for (const auto& h : j.at("heuristics")) {
    c.heuristics.push_back(parse_heuristic_kind(h.get<std::string>()));
  }
  for (const auto& s : j.at("seeds")) c.seeds.push_back(s.get<std::uint64_t>());
  c.evaluation_budget = j.value("evaluation_budget", c.evaluation_budget);
  c.wall_limit_s = j.value("wall_limit_s", c.wall_limit_s);
  if (j.contains("output")) c.output = resolve(j.at("output").get<std::string>());
  if (j.contains("plan_dir")) c.plan_dir = resolve(j.at("plan_dir").get<std::string>());
  c.jobs = j.value("jobs", c.jobs);
  c.record_wall_time = j.value("record_wall_time", c.record_wall_time);
  if (j.value("preferred_operators", false)) c.preferred = PreferredOperators::kBoost;
  c.exploration_rate = j.value("c", c.exploration_rate);
  if (j.contains("uniform_exploration")) {
    c.uniform = bandit::parse_uniform_exploration(j.at("uniform_exploration").get<std::string>());
  }
  c.use_action_costs = j.value("use_action_costs", c.use_action_costs);
  c.validate();
  return c;
}

double ipc_score(std::span<const double> times, double limit) {
  const double log_limit = std::log(limit);
  double score = 0.0;
  for (double t : times) {
    if (t < 0.0) throw std::invalid_argument("negative solve time");
    if (t > limit) continue;
    // t = 0 has log t = -inf and scores the full 1.
    score += std::max(0.0, std::min(1.0, 1.0 - std::log(t) / log_limit));
  }
  return score;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

namespace {

struct LoadedProblem {
  std::unique_ptr<GroundTask> task;
  std::string domain_name;
  std::string problem_name;
  std::string error;
};

LoadedProblem load(const ProblemEntry& entry, const SuiteConfig& config) {
  LoadedProblem out;
  out.problem_name = fs::path(entry.problem_file).stem().string();
  out.domain_name = fs::path(entry.domain_file).parent_path().filename().string();
  try {
    const auto domain = pddl::parse_domain(pddl::read_file(entry.domain_file));
    const auto problem = pddl::parse_problem(pddl::read_file(entry.problem_file), domain);
    out.domain_name = domain.name;
    out.problem_name = problem.name;
    pddl::GroundingOptions options;
    options.unit_costs = !config.use_action_costs;
    out.task = std::make_unique<GroundTask>(pddl::ground(domain, problem, options));
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

struct Job {
  std::size_t problem;
  Algorithm algorithm;
  HeuristicKind heuristic;
  std::uint64_t seed;
};

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return s;
}

RunRecord execute(const Job& job, const LoadedProblem& problem, const SuiteConfig& config) {
  RunRecord r;
  r.domain = problem.domain_name;
  r.problem = problem.problem_name;
  r.algorithm = std::string(algorithm_name(job.algorithm));
  r.heuristic = std::string(heuristic_name(job.heuristic));
  r.seed = job.seed;
  if (!problem.task) {
    r.error = problem.error;
    return r;
  }
  SearchConfig sc;
  sc.algorithm = job.algorithm;
  sc.heuristic = job.heuristic;
  sc.policy.c = config.exploration_rate;
  sc.policy.uniform = config.uniform;
  sc.evaluation_budget = config.evaluation_budget;
  sc.seed = job.seed;
  sc.preferred = config.preferred;

  const auto start = std::chrono::steady_clock::now();
  const SearchResult result = run_search(*problem.task, sc);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  r.solved = result.outcome == Outcome::kSolved;
  r.evaluations = result.evaluations;
  r.expansions = result.expansions;
  r.frac_h_above_init = result.frac_h_above_init;
  r.wall_time_s = config.record_wall_time ? elapsed.count() : 0.0;
  if (result.plan) {
    r.plan_length = static_cast<std::int64_t>(result.plan->steps.size());
    r.plan_cost = result.plan->cost;
    if (!config.plan_dir.empty()) {
      fs::create_directories(config.plan_dir);
      const std::string name = sanitize(r.domain) + "-" + sanitize(r.problem) + "-" +
                               r.algorithm + "-" + r.heuristic + "-" + std::to_string(r.seed) +
                               ".plan";
      r.plan_file = (fs::path(config.plan_dir) / name).string();
      std::ofstream out(r.plan_file);
      write_plan(out, *problem.task, *result.plan);
    }
  }
  return r;
}

}  // namespace

std::vector<SummaryRow> summarize(const SuiteConfig& config, std::span<const RunRecord> rows) {
  std::vector<SummaryRow> summary;
  const double seeds = static_cast<double>(config.seeds.size());
  for (Algorithm a : config.algorithms) {
    for (HeuristicKind h : config.heuristics) {
      SummaryRow s;
      s.algorithm = std::string(algorithm_name(a));
      s.heuristic = std::string(heuristic_name(h));
      s.seeds = config.seeds.size();
      double solved = 0.0;
      double evaluations = 0.0;
      double frac = 0.0;
      double ipc = 0.0;
      for (std::uint64_t seed : config.seeds) {
        std::vector<double> times;
        for (const auto& r : rows) {
          if (r.algorithm != s.algorithm || r.heuristic != s.heuristic || r.seed != seed) continue;
          if (r.solved) times.push_back(r.wall_time_s);
        }
        ipc += ipc_score(times, config.wall_limit_s);
      }
      for (const auto& r : rows) {
        if (r.algorithm != s.algorithm || r.heuristic != s.heuristic) continue;
        ++s.runs;
        solved += r.solved ? 1.0 : 0.0;
        evaluations += static_cast<double>(r.evaluations);
        frac += r.frac_h_above_init;
      }
      const double runs = s.runs == 0 ? 1.0 : static_cast<double>(s.runs);
      s.mean_solved = solved / seeds;
      s.mean_evaluations = evaluations / runs;
      s.mean_frac_h_above_init = frac / runs;
      s.mean_ipc_score = ipc / seeds;
      summary.push_back(s);
    }
  }
  return summary;
}

SuiteResult run_suite(const SuiteConfig& config) {
  config.validate();
  std::vector<LoadedProblem> problems;
  problems.reserve(config.problems.size());
  for (const auto& entry : config.problems) problems.push_back(load(entry, config));

  std::vector<Job> jobs;
  for (std::size_t p = 0; p < problems.size(); ++p) {
    for (Algorithm a : config.algorithms) {
      for (HeuristicKind h : config.heuristics) {
        for (std::uint64_t seed : config.seeds) jobs.push_back({p, a, h, seed});
      }
    }
  }

  SuiteResult result;
  result.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      result.rows[i] = execute(jobs[i], problems[jobs[i].problem], config);
    }
  };
  const unsigned threads = std::max(1U, std::min<unsigned>(config.jobs, jobs.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (const auto& r : result.rows) {
    if (!r.error.empty()) {
      std::cerr << "error: " << r.domain << "/" << r.problem << ": " << r.error << '\n';
    }
  }
  result.summary = summarize(config, result.rows);

  if (!config.output.empty()) {
    std::ofstream out(config.output);
    if (!out) throw std::runtime_error("cannot write " + config.output);
    write_csv(out, result);
  }
  return result;
}

void write_csv(std::ostream& out, const SuiteResult& result) {
  out << kCsvHeader << '\n';
  for (const auto& r : result.rows) {
    out << r.domain << ',' << r.problem << ',' << r.algorithm << ',' << r.heuristic << ','
        << r.seed << ',' << (r.solved ? 1 : 0) << ',' << r.evaluations << ',' << r.expansions
        << ',' << r.plan_length << ',' << r.plan_cost << ',' << format_number(r.wall_time_s)
        << ',' << format_number(r.frac_h_above_init) << '\n';
  }
  out << "\n# summary\n";
  out << "algorithm,heuristic,runs,seeds,mean_solved,mean_evaluations,mean_frac_h_above_init,"
         "mean_ipc_score\n";
  for (const auto& s : result.summary) {
    out << s.algorithm << ',' << s.heuristic << ',' << s.runs << ',' << s.seeds << ','
        << format_number(s.mean_solved) << ',' << format_number(s.mean_evaluations) << ','
        << format_number(s.mean_frac_h_above_init) << ',' << format_number(s.mean_ipc_score)
        << '\n';
  }
}

}  // namespace thts::bench
