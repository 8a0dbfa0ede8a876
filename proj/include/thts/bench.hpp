#pragma once

// Benchmark harness: algorithm x heuristic x seed grids over PDDL problems
// under node-evaluation budgets.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thts/bandit.hpp"
#include "thts/heuristics.hpp"
#include "thts/search.hpp"

namespace thts::bench {

inline constexpr const char* kCsvHeader =
    "domain,problem,algorithm,heuristic,seed,solved,evaluations,expansions,plan_length,"
    "plan_cost,wall_time_s,frac_h_above_init";

struct ProblemEntry {
  std::string domain_file;
  std::string problem_file;
};

struct SuiteConfig {
  std::vector<ProblemEntry> problems;
  std::vector<Algorithm> algorithms;
  std::vector<HeuristicKind> heuristics;
  std::vector<std::uint64_t> seeds;
  std::uint64_t evaluation_budget = 10000;
  /// IPC score time limit; runs are not interrupted.
  double wall_limit_s = 300.0;
  std::string output;
  /// When set, every solved run writes its plan file here.
  std::string plan_dir;
  unsigned jobs = 1;
  /// false writes wall_time_s = 0 so reruns are byte-identical.
  bool record_wall_time = true;
  PreferredOperators preferred = PreferredOperators::kOff;
  double exploration_rate = 1.0;
  bandit::UniformExploration uniform = bandit::UniformExploration::kScaled;
  bool use_action_costs = false;

  void validate() const;
};

/// Reads the JSON suite file; relative paths resolve against its directory.
SuiteConfig load_suite(const std::string& path);

struct RunRecord {
  std::string domain;
  std::string problem;
  std::string algorithm;
  std::string heuristic;
  std::uint64_t seed = 0;
  bool solved = false;
  std::uint64_t evaluations = 0;
  std::uint64_t expansions = 0;
  /// -1 when no plan was found.
  std::int64_t plan_length = -1;
  std::int64_t plan_cost = -1;
  double wall_time_s = 0.0;
  double frac_h_above_init = 0.0;
  /// Parse/ground failure; such rows are never solved.
  std::string error;
  /// Written plan file, if any.
  std::string plan_file;
};

struct SummaryRow {
  std::string algorithm;
  std::string heuristic;
  std::size_t runs = 0;
  std::size_t seeds = 0;
  double mean_solved = 0.0;
  double mean_evaluations = 0.0;
  double mean_frac_h_above_init = 0.0;
  double mean_ipc_score = 0.0;
};

struct SuiteResult {
  std::vector<RunRecord> rows;
  std::vector<SummaryRow> summary;
};

SuiteResult run_suite(const SuiteConfig& config);

/// Sum over solved instances of min(1, 1 - log t / log limit), clamped at 0.
double ipc_score(std::span<const double> times, double limit = 300.0);

std::vector<SummaryRow> summarize(const SuiteConfig& config, std::span<const RunRecord> rows);

/// Six significant digits.
std::string format_number(double v);
void write_csv(std::ostream& out, const SuiteResult& result);

}  // namespace thts::bench
