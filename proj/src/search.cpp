#include "thts/search.hpp"

#include <algorithm>
#include <ostream>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "thts/error.hpp"

namespace thts {

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : all_algorithms()) {
    if (algorithm_name(a) == name) return a;
  }
  throw std::invalid_argument("unknown search algorithm '" + std::string(name) + "'");
}

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kGbfs: return "gbfs";
    case Algorithm::kGuct: return "guct";
    case Algorithm::kGuctStar: return "guct-star";
    case Algorithm::kGuctNormal: return "guct-normal";
    case Algorithm::kGuctStarNormal: return "guct-star-normal";
    case Algorithm::kGuctNormal2: return "guct-normal2";
    case Algorithm::kGuctStarNormal2: return "guct-star-normal2";
    case Algorithm::kGuctPlusNormal2: return "guct-plus-normal2";
    case Algorithm::kGuctUniform: return "guct-uniform";
  }
  return "?";
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all = {
      Algorithm::kGbfs,           Algorithm::kGuct,            Algorithm::kGuctStar,
      Algorithm::kGuctNormal,     Algorithm::kGuctStarNormal,  Algorithm::kGuctNormal2,
      Algorithm::kGuctStarNormal2, Algorithm::kGuctPlusNormal2, Algorithm::kGuctUniform};
  return all;
}

AlgorithmWiring wiring_of(Algorithm a) {
  using bandit::PolicyKind;
  switch (a) {
    case Algorithm::kGuct: return {PolicyKind::kUcb1, Backup::kMonteCarlo};
    case Algorithm::kGuctStar: return {PolicyKind::kUcb1, Backup::kFullBellman};
    case Algorithm::kGuctNormal: return {PolicyKind::kUcb1Normal, Backup::kMonteCarlo};
    case Algorithm::kGuctStarNormal: return {PolicyKind::kUcb1Normal, Backup::kFullBellman};
    case Algorithm::kGuctNormal2: return {PolicyKind::kUcb1Normal2, Backup::kMonteCarlo};
    case Algorithm::kGuctStarNormal2: return {PolicyKind::kUcb1Normal2, Backup::kFullBellman};
    case Algorithm::kGuctPlusNormal2: return {PolicyKind::kUcb1Normal2, Backup::kClark};
    case Algorithm::kGuctUniform: return {PolicyKind::kUcb1Uniform, Backup::kUniformBounds};
    case Algorithm::kGbfs: break;
  }
  throw std::invalid_argument("gbfs has no bandit wiring");
}

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kSolved: return "solved";
    case Outcome::kExhausted: return "exhausted";
    case Outcome::kBudgetReached: return "budget-reached";
  }
  return "?";
}

namespace {

constexpr std::uint32_t kNoState = std::numeric_limits<std::uint32_t>::max();

/// Generated states, their predecessors and preferred operators.
class StateStore {
 public:
  explicit StateStore(bool dedupe) : dedupe_(dedupe) {}

  /// Returns kNoState when duplicate detection rejects `s`.
  std::uint32_t insert(State s, std::uint32_t parent, ActionId action) {
    if (dedupe_) {
      auto [it, inserted] = index_.try_emplace(s, static_cast<std::uint32_t>(states_.size()));
      if (!inserted) return kNoState;
    }
    states_.push_back(std::move(s));
    parent_.push_back(parent);
    action_.push_back(action);
    preferred_.emplace_back();
    return static_cast<std::uint32_t>(states_.size() - 1);
  }

  const State& state(std::uint32_t id) const { return states_[id]; }
  std::vector<ActionId>& preferred(std::uint32_t id) { return preferred_[id]; }

  std::vector<ActionId> trace(std::uint32_t id) const {
    std::vector<ActionId> steps;
    for (std::uint32_t s = id; parent_[s] != kNoState; s = parent_[s]) steps.push_back(action_[s]);
    std::reverse(steps.begin(), steps.end());
    return steps;
  }

 private:
  bool dedupe_;
  std::vector<State> states_;
  std::vector<std::uint32_t> parent_;
  std::vector<ActionId> action_;
  std::vector<std::vector<ActionId>> preferred_;
  std::unordered_map<State, std::uint32_t, StateHash> index_;
};

/// Counts evaluations, enforces the budget and tracks h > h(I).
class EvaluationCounter {
 public:
  EvaluationCounter(Heuristic& h, const SearchConfig& config, SearchResult& result)
      : heuristic_(h), config_(config), result_(result) {}

  bool exhausted() const { return result_.evaluations >= config_.evaluation_budget; }

  Evaluation evaluate(const State& s) {
    Evaluation e = heuristic_.evaluate(s);
    ++result_.evaluations;
    if (result_.evaluations == 1) result_.init_h = e.value;
    if (e.value > result_.init_h) ++above_init_;
    if (config_.record_evaluations) result_.evaluation_log.push_back(e.value);
    return e;
  }

  void finish() {
    result_.frac_h_above_init =
        result_.evaluations == 0
            ? 0.0
            : static_cast<double>(above_init_) / static_cast<double>(result_.evaluations);
  }

 private:
  Heuristic& heuristic_;
  const SearchConfig& config_;
  SearchResult& result_;
  std::uint64_t above_init_ = 0;
};

bool expansion_budget_hit(const SearchConfig& config, const SearchResult& result) {
  return config.expansion_budget && result.expansions >= *config.expansion_budget;
}

void solved(const GroundTask& task, SearchResult& result, std::vector<ActionId> steps) {
  result.outcome = Outcome::kSolved;
  result.plan = make_plan(task, std::move(steps));
}

bool contains(const std::vector<ActionId>& sorted, ActionId a) {
  return std::binary_search(sorted.begin(), sorted.end(), a);
}

}  // namespace

SearchResult gbfs(const GroundTask& task, Heuristic& heuristic, const SearchConfig& config) {
  if (config.evaluation_budget == 0) throw std::invalid_argument("evaluation budget must be > 0");
  SearchResult result;
  EvaluationCounter counter(heuristic, config, result);
  StateStore store(config.duplicate_detection);
  const bool use_po = config.preferred == PreferredOperators::kBoost;

  const std::uint32_t root = store.insert(task.init(), kNoState, kNoAction);
  if (is_goal(task, task.init())) {
    solved(task, result, {});
    return result;
  }
  const Evaluation init_eval = counter.evaluate(task.init());
  if (init_eval.value.is_infinite()) {
    result.outcome = Outcome::kExhausted;
    counter.finish();
    return result;
  }
  store.preferred(root) = init_eval.preferred;

  // (h, non-preferred, FIFO sequence, state)
  using Entry = std::tuple<double, int, std::uint64_t, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::uint64_t sequence = 0;
  open.emplace(init_eval.value.value(), 0, sequence++, root);

  result.outcome = Outcome::kExhausted;
  while (!open.empty()) {
    if (counter.exhausted() || expansion_budget_hit(config, result)) {
      result.outcome = Outcome::kBudgetReached;
      break;
    }
    const std::uint32_t id = std::get<3>(open.top());
    open.pop();
    ++result.expansions;
    const State current = store.state(id);
    const std::vector<ActionId> preferred = store.preferred(id);
    bool stop = false;
    for (ActionId a : applicable_actions(task, current)) {
      State next = apply(task, current, a);
      const bool goal = is_goal(task, next);
      if (!goal && counter.exhausted()) {
        result.outcome = Outcome::kBudgetReached;
        stop = true;
        break;
      }
      const std::uint32_t child = store.insert(std::move(next), id, a);
      if (child == kNoState) continue;
      if (goal) {
        solved(task, result, store.trace(child));
        stop = true;
        break;
      }
      Evaluation e = counter.evaluate(store.state(child));
      if (e.value.is_infinite()) continue;
      const int rank = use_po && contains(preferred, a) ? 0 : 1;
      if (use_po) store.preferred(child) = std::move(e.preferred);
      open.emplace(e.value.value(), rank, sequence++, child);
    }
    if (config.trial_log) {
      *config.trial_log << "expansion " << result.expansions << " open " << open.size()
                        << " evaluations " << result.evaluations << '\n';
    }
    if (stop) break;
  }
  counter.finish();
  return result;
}

SearchResult thts(const GroundTask& task, Heuristic& heuristic, const SearchConfig& config) {
  if (config.algorithm == Algorithm::kGbfs) {
    throw std::invalid_argument("thts called with gbfs; use gbfs()");
  }
  if (config.evaluation_budget == 0) throw std::invalid_argument("evaluation budget must be > 0");

  const AlgorithmWiring wiring = wiring_of(config.algorithm);
  SelectionRule rule;
  rule.policy = config.policy;
  rule.policy.kind = wiring.policy;
  rule.policy.direction = bandit::Direction::kMinimize;
  rule.backup = wiring.backup;
  rule.preferred_first = config.preferred == PreferredOperators::kBoost;

  SearchResult result;
  EvaluationCounter counter(heuristic, config, result);
  StateStore store(config.duplicate_detection);
  std::mt19937_64 rng(config.seed);

  const std::uint32_t root_state = store.insert(task.init(), kNoState, kNoAction);
  if (is_goal(task, task.init())) {
    solved(task, result, {});
    return result;
  }
  const Evaluation init_eval = counter.evaluate(task.init());
  store.preferred(root_state) = init_eval.preferred;

  SearchTree tree;
  tree.add_root(init_eval.value, root_state);
  std::vector<ChildSpec> children;

  result.outcome = Outcome::kExhausted;
  while (!tree.root_dead()) {
    if (counter.exhausted() || expansion_budget_hit(config, result)) {
      result.outcome = Outcome::kBudgetReached;
      break;
    }
    const std::vector<NodeId> path = select_path(tree, rule);
    const NodeId leaf = path.back();
    const std::uint32_t leaf_state = tree.node(leaf).state;
    const State current = store.state(leaf_state);
    const std::vector<ActionId> preferred = store.preferred(leaf_state);

    std::vector<ActionId> actions = applicable_actions(task, current);
    if (config.shuffle_successors) std::shuffle(actions.begin(), actions.end(), rng);

    children.clear();
    bool goal_found = false;
    bool budget_hit = false;
    for (ActionId a : actions) {
      State next = apply(task, current, a);
      const bool goal = is_goal(task, next);
      if (!goal && counter.exhausted()) {
        budget_hit = true;
        break;
      }
      const std::uint32_t child = store.insert(std::move(next), leaf_state, a);
      if (child == kNoState) continue;
      if (goal) {
        solved(task, result, store.trace(child));
        goal_found = true;
        break;
      }
      Evaluation e = counter.evaluate(store.state(child));
      const bool is_preferred = contains(preferred, a);
      if (rule.preferred_first) store.preferred(child) = std::move(e.preferred);
      children.push_back({e.value, child, a, is_preferred});
    }
    ++result.expansions;
    ++result.trials;
    if (goal_found) break;
    tree.expand(leaf, children);
    if (config.trial_log) {
      *config.trial_log << "trial " << result.trials << " path_length " << path.size() - 1
                        << " evaluations " << result.evaluations << '\n';
    }
    if (budget_hit) {
      result.outcome = Outcome::kBudgetReached;
      break;
    }
  }
  counter.finish();
  return result;
}

SearchResult run_search(const GroundTask& task, const SearchConfig& config) {
  auto heuristic = make_heuristic(config.heuristic, task);
  if (config.algorithm == Algorithm::kGbfs) return gbfs(task, *heuristic, config);
  return thts(task, *heuristic, config);
}

}  // namespace thts
