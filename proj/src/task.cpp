#include "thts/task.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "thts/error.hpp"

namespace thts {

namespace {

std::vector<FactId> sorted_unique(std::vector<FactId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void check_bounds(const std::vector<FactId>& facts, std::size_t universe,
                  const std::string& where) {
  for (FactId f : facts) {
    if (f >= universe) {
      throw std::invalid_argument(where + " references fact " + std::to_string(f) +
                                  " outside a universe of " + std::to_string(universe));
    }
  }
}

}  // namespace

FactSet::FactSet(std::size_t num_facts, std::span<const FactId> facts)
    : FactSet(num_facts) {
  for (FactId f : facts) insert(f);
}

bool FactSet::is_subset_of(const FactSet& other) const {
  return simd::kernels().is_subset(data(), other.data(), num_words());
}

std::size_t FactSet::size() const {
  std::size_t n = 0;
  for (Word w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<FactId> FactSet::to_vector() const {
  std::vector<FactId> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    Word bits = words_[w];
    while (bits != 0) {
      const int bit = std::countr_zero(bits);
      out.push_back(static_cast<FactId>(w * kWordBits + static_cast<std::size_t>(bit)));
      bits &= bits - 1;
    }
  }
  return out;
}

State::State(FactSet facts) : facts_(std::move(facts)) {
  // FNV-1a over the words, mixed per word.
  std::size_t h = 1469598103934665603ULL;
  for (Word w : facts_.words()) {
    w ^= w >> 33;
    w *= 0xff51afd7ed558ccdULL;
    w ^= w >> 33;
    h = (h ^ static_cast<std::size_t>(w)) * 1099511628211ULL;
  }
  hash_ = h;
}

std::string GroundAction::signature() const {
  std::string s = "(" + name;
  for (const auto& arg : args) s += " " + arg;
  return s + ")";
}

GroundTask::GroundTask(std::vector<std::string> facts,
                       std::vector<GroundAction> actions,
                       std::vector<FactId> init, std::vector<FactId> goal)
    : facts_(std::move(facts)), actions_(std::move(actions)) {
  const std::size_t n = facts_.size();
  check_bounds(init, n, "init");
  check_bounds(goal, n, "goal");

  std::unordered_set<std::string> signatures;
  masks_.reserve(actions_.size());
  for (auto& action : actions_) {
    const std::string sig = action.signature();
    if (!signatures.insert(sig).second) {
      throw std::invalid_argument("duplicate action " + sig);
    }
    if (action.cost < 0) throw std::invalid_argument("negative cost on " + sig);
    check_bounds(action.pre, n, sig);
    check_bounds(action.add, n, sig);
    check_bounds(action.del, n, sig);

    action.pre = sorted_unique(std::move(action.pre));
    action.add = sorted_unique(std::move(action.add));
    // Delete-then-add: a fact both deleted and added stays true.
    std::vector<FactId> del;
    for (FactId f : sorted_unique(std::move(action.del))) {
      if (!std::binary_search(action.add.begin(), action.add.end(), f)) del.push_back(f);
    }
    action.del = std::move(del);

    masks_.push_back({FactSet(n, action.pre), FactSet(n, action.add), FactSet(n, action.del)});
  }

  init_ = State(FactSet(n, init));
  goal_ = sorted_unique(std::move(goal));
  goal_mask_ = FactSet(n, goal_);
}

State GroundTask::make_state(std::span<const FactId> facts) const {
  std::vector<FactId> v(facts.begin(), facts.end());
  check_bounds(v, num_facts(), "state");
  return State(FactSet(num_facts(), facts));
}

Plan make_plan(const GroundTask& task, std::vector<ActionId> steps) {
  Plan plan{std::move(steps), 0};
  for (ActionId a : plan.steps) plan.cost += task.action(a).cost;
  return plan;
}

bool is_applicable(const GroundTask& task, const State& s, ActionId a) {
  return task.pre_mask(a).is_subset_of(s.facts());
}

std::vector<ActionId> applicable_actions(const GroundTask& task, const State& s) {
  const auto& k = simd::kernels();
  const std::size_t n = s.facts().num_words();
  std::vector<ActionId> out;
  for (ActionId a = 0; a < task.num_actions(); ++a) {
    if (k.is_subset(task.pre_mask(a).data(), s.facts().data(), n)) out.push_back(a);
  }
  return out;
}

State apply(const GroundTask& task, const State& s, ActionId a) {
  if (!is_applicable(task, s, a)) {
    throw ContractViolation("action " + task.action(a).signature() +
                            " is not applicable");
  }
  FactSet next(task.num_facts());
  simd::kernels().apply(s.facts().data(), task.del_mask(a).data(),
                        task.add_mask(a).data(), next.data(), next.num_words());
  return State(std::move(next));
}

bool is_goal(const GroundTask& task, const State& s) {
  return task.goal_mask().is_subset_of(s.facts());
}

PlanValidation validate_plan(const GroundTask& task, const Plan& plan) {
  PlanValidation result;
  State s = task.init();
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const ActionId a = plan.steps[i];
    if (a >= task.num_actions()) {
      result.failed_step = i;
      result.reason = "unknown action id " + std::to_string(a);
      return result;
    }
    if (!is_applicable(task, s, a)) {
      result.failed_step = i;
      result.reason = task.action(a).signature() + " not applicable";
      return result;
    }
    s = apply(task, s, a);
    result.cost += task.action(a).cost;
  }
  if (!is_goal(task, s)) {
    result.failed_step = plan.steps.size();
    result.reason = "goal not satisfied";
    result.cost = 0;
    return result;
  }
  result.valid = true;
  return result;
}

void write_plan(std::ostream& out, const GroundTask& task, const Plan& plan) {
  for (ActionId a : plan.steps) out << task.action(a).signature() << '\n';
  out << "; cost = " << plan.cost << '\n';
}

std::string format_plan(const GroundTask& task, const Plan& plan) {
  std::ostringstream os;
  write_plan(os, task, plan);
  return os.str();
}

}  // namespace thts
