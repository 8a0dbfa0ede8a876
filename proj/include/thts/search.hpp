#pragma once

// Forward heuristic search: GBFS with a priority-queue open list, and
// trial-based heuristic tree search with bandit-driven selection.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "thts/bandit.hpp"
#include "thts/heuristics.hpp"
#include "thts/task.hpp"
#include "thts/tree.hpp"

namespace thts {

enum class Algorithm : std::uint8_t {
  kGbfs,
  kGuct,
  kGuctStar,
  kGuctNormal,
  kGuctStarNormal,
  kGuctNormal2,
  kGuctStarNormal2,
  kGuctPlusNormal2,
  kGuctUniform,
};

Algorithm parse_algorithm(std::string_view name);
std::string_view algorithm_name(Algorithm a);
/// Every algorithm of the experiment matrix, GBFS first.
const std::vector<Algorithm>& all_algorithms();

/// Bandit policy and backup rule an algorithm is wired to.
struct AlgorithmWiring {
  bandit::PolicyKind policy;
  Backup backup;
};
AlgorithmWiring wiring_of(Algorithm a);

enum class PreferredOperators : std::uint8_t { kOff, kBoost };

struct SearchConfig {
  Algorithm algorithm = Algorithm::kGuctUniform;
  HeuristicKind heuristic = HeuristicKind::kFF;
  /// Exploration rate (UCB1), uniform exploration variant and the
  /// UCB1-Normal side condition are read from here; kind and direction
  /// come from the algorithm.
  bandit::PolicyConfig policy;
  std::uint64_t evaluation_budget = 10000;
  std::optional<std::uint64_t> expansion_budget;
  std::uint64_t seed = 0;
  PreferredOperators preferred = PreferredOperators::kOff;
  bool duplicate_detection = true;
  /// Tree search only: visit successors in a seed-dependent order.
  bool shuffle_successors = true;
  /// Keep every evaluated heuristic value in SearchResult::evaluation_log.
  bool record_evaluations = false;
  /// Per-trial log sink (tree search) or per-expansion (GBFS).
  std::ostream* trial_log = nullptr;
};

enum class Outcome : std::uint8_t { kSolved, kExhausted, kBudgetReached };
std::string_view outcome_name(Outcome o);

struct SearchResult {
  Outcome outcome = Outcome::kExhausted;
  std::optional<Plan> plan;
  std::uint64_t evaluations = 0;
  std::uint64_t expansions = 0;
  std::uint64_t trials = 0;
  HValue init_h;
  /// Fraction of evaluated states with h(s) > h(I); infinity counts as above.
  double frac_h_above_init = 0.0;
  std::vector<HValue> evaluation_log;

  bool operator==(const SearchResult&) const = default;
};

SearchResult gbfs(const GroundTask& task, Heuristic& heuristic, const SearchConfig& config);
SearchResult thts(const GroundTask& task, Heuristic& heuristic, const SearchConfig& config);

/// Builds the configured heuristic and dispatches on the algorithm.
SearchResult run_search(const GroundTask& task, const SearchConfig& config);

}  // namespace thts
