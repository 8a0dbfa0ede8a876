#include "thts/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>

#include "thts/error.hpp"

namespace thts {

HValue::HValue(double v) : value_(v) {
  if (!(v >= 0.0) || std::isinf(v)) {
    throw ContractViolation("finite heuristic values must be >= 0, got " + std::to_string(v));
  }
}

double HValue::value() const {
  if (infinite_) throw ContractViolation("value() called on an infinite heuristic value");
  return value_;
}

std::string to_string(const HValue& h) {
  if (h.is_infinite()) return "inf";
  std::string s = std::to_string(h.value());
  s.erase(s.find_last_not_of('0') + 1);
  if (s.back() == '.') s.pop_back();
  return s;
}

HeuristicKind parse_heuristic_kind(std::string_view name) {
  if (name == "ff") return HeuristicKind::kFF;
  if (name == "add") return HeuristicKind::kAdd;
  if (name == "hmax" || name == "max") return HeuristicKind::kMax;
  if (name == "gc" || name == "goalcount") return HeuristicKind::kGoalCount;
  throw std::invalid_argument("unknown heuristic '" + std::string(name) + "'");
}

std::string_view heuristic_name(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::kFF: return "ff";
    case HeuristicKind::kAdd: return "add";
    case HeuristicKind::kMax: return "hmax";
    case HeuristicKind::kGoalCount: return "gc";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr ActionId kNoSupporter = std::numeric_limits<ActionId>::max();

enum class Aggregate { kMax, kSum };

/// Dijkstra-style fixpoint over facts for the delete relaxation.
class RelaxedExploration {
 public:
  explicit RelaxedExploration(const GroundTask& task)
      : task_(task),
        pre_of_(task.num_facts()),
        fact_cost_(task.num_facts()),
        supporter_(task.num_facts()),
        unsatisfied_(task.num_actions()),
        action_acc_(task.num_actions()) {
    for (ActionId a = 0; a < task.num_actions(); ++a) {
      for (FactId f : task.action(a).pre) pre_of_[f].push_back(a);
    }
  }

  /// Fills fact costs and supporters; returns the goal aggregate.
  double explore(const State& s, Aggregate agg) {
    std::fill(fact_cost_.begin(), fact_cost_.end(), kInf);
    std::fill(supporter_.begin(), supporter_.end(), kNoSupporter);
    using Entry = std::pair<double, FactId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;

    for (FactId f : s.facts().to_vector()) {
      fact_cost_[f] = 0.0;
      queue.emplace(0.0, f);
    }
    for (ActionId a = 0; a < task_.num_actions(); ++a) {
      unsatisfied_[a] = task_.action(a).pre.size();
      action_acc_[a] = 0.0;
      if (unsatisfied_[a] == 0) fire(a, queue);
    }
    while (!queue.empty()) {
      const auto [cost, f] = queue.top();
      queue.pop();
      if (cost > fact_cost_[f]) continue;
      for (ActionId a : pre_of_[f]) {
        action_acc_[a] = agg == Aggregate::kMax ? std::max(action_acc_[a], cost)
                                                : action_acc_[a] + cost;
        if (--unsatisfied_[a] == 0) fire(a, queue);
      }
    }

    double total = 0.0;
    for (FactId g : task_.goal()) {
      const double c = fact_cost_[g];
      if (std::isinf(c)) return kInf;
      total = agg == Aggregate::kMax ? std::max(total, c) : total + c;
    }
    return total;
  }

  double fact_cost(FactId f) const { return fact_cost_[f]; }
  ActionId supporter(FactId f) const { return supporter_[f]; }

 private:
  template <typename Queue>
  void fire(ActionId a, Queue& queue) {
    const double c = action_acc_[a] + static_cast<double>(task_.action(a).cost);
    for (FactId g : task_.action(a).add) {
      if (c < fact_cost_[g]) {
        fact_cost_[g] = c;
        supporter_[g] = a;
        queue.emplace(c, g);
      } else if (c == fact_cost_[g] && supporter_[g] != kNoSupporter && a < supporter_[g]) {
        supporter_[g] = a;
      }
    }
  }

  const GroundTask& task_;
  std::vector<std::vector<ActionId>> pre_of_;
  std::vector<double> fact_cost_;
  std::vector<ActionId> supporter_;
  std::vector<std::size_t> unsatisfied_;
  std::vector<double> action_acc_;
};

HValue to_hvalue(double v) { return std::isinf(v) ? HValue::infinity() : HValue(v); }

class MaxHeuristic final : public Heuristic {
 public:
  explicit MaxHeuristic(const GroundTask& task) : exploration_(task) {}
  Evaluation evaluate(const State& s) override {
    return {to_hvalue(exploration_.explore(s, Aggregate::kMax)), {}};
  }
  std::string_view name() const override { return "hmax"; }

 private:
  RelaxedExploration exploration_;
};

class AddHeuristic final : public Heuristic {
 public:
  explicit AddHeuristic(const GroundTask& task) : exploration_(task) {}
  Evaluation evaluate(const State& s) override {
    return {to_hvalue(exploration_.explore(s, Aggregate::kSum)), {}};
  }
  std::string_view name() const override { return "add"; }

 private:
  RelaxedExploration exploration_;
};

class FFHeuristic final : public Heuristic {
 public:
  explicit FFHeuristic(const GroundTask& task)
      : task_(task),
        exploration_(task),
        in_plan_(task.num_actions()),
        fact_done_(task.num_facts()) {}

  Evaluation evaluate(const State& s) override {
    if (std::isinf(exploration_.explore(s, Aggregate::kSum))) return {HValue::infinity(), {}};

    std::fill(in_plan_.begin(), in_plan_.end(), false);
    std::fill(fact_done_.begin(), fact_done_.end(), false);
    std::vector<FactId> open;
    for (FactId g : task_.goal()) {
      if (!s.contains(g)) open.push_back(g);
    }
    double cost = 0.0;
    while (!open.empty()) {
      const FactId f = open.back();
      open.pop_back();
      if (fact_done_[f]) continue;
      fact_done_[f] = true;
      const ActionId a = exploration_.supporter(f);
      if (a == kNoSupporter || in_plan_[a]) continue;
      in_plan_[a] = true;
      cost += static_cast<double>(task_.action(a).cost);
      for (FactId p : task_.action(a).pre) {
        if (!s.contains(p) && !fact_done_[p]) open.push_back(p);
      }
    }

    Evaluation e{HValue(cost), {}};
    for (ActionId a = 0; a < task_.num_actions(); ++a) {
      if (in_plan_[a] && is_applicable(task_, s, a)) e.preferred.push_back(a);
    }
    return e;
  }
  std::string_view name() const override { return "ff"; }

 private:
  const GroundTask& task_;
  RelaxedExploration exploration_;
  std::vector<bool> in_plan_;
  std::vector<bool> fact_done_;
};

class GoalCountHeuristic final : public Heuristic {
 public:
  explicit GoalCountHeuristic(const GroundTask& task) : task_(task) {}
  Evaluation evaluate(const State& s) override {
    const std::size_t missing = simd::kernels().count_missing(
        task_.goal_mask().data(), s.facts().data(), s.facts().num_words());
    return {HValue(static_cast<double>(missing)), {}};
  }
  std::string_view name() const override { return "gc"; }

 private:
  const GroundTask& task_;
};

}  // namespace

std::unique_ptr<Heuristic> make_heuristic(HeuristicKind kind, const GroundTask& task) {
  switch (kind) {
    case HeuristicKind::kFF: return std::make_unique<FFHeuristic>(task);
    case HeuristicKind::kAdd: return std::make_unique<AddHeuristic>(task);
    case HeuristicKind::kMax: return std::make_unique<MaxHeuristic>(task);
    case HeuristicKind::kGoalCount: return std::make_unique<GoalCountHeuristic>(task);
  }
  throw std::invalid_argument("unknown heuristic kind");
}

HValue h_max(const GroundTask& task, const State& s) {
  return MaxHeuristic(task).evaluate(s).value;
}

HValue h_add(const GroundTask& task, const State& s) {
  return AddHeuristic(task).evaluate(s).value;
}

Evaluation h_ff(const GroundTask& task, const State& s) { return FFHeuristic(task).evaluate(s); }

HValue h_goal_count(const GroundTask& task, const State& s) {
  return GoalCountHeuristic(task).evaluate(s).value;
}

}  // namespace thts
