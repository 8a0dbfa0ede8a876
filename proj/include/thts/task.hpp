#pragma once

// Grounded STRIPS tasks: facts, actions, states, plans.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thts/simd.hpp"

namespace thts {

using FactId = std::uint32_t;
using ActionId = std::uint32_t;
using Word = simd::Word;

inline constexpr std::size_t kWordBits = 64;

inline std::size_t words_for(std::size_t num_facts) {
  return (num_facts + kWordBits - 1) / kWordBits;
}

/// Fixed-universe bitset of facts. Value type; equality and hashing are
/// over the packed words, so two sets over the same universe compare equal
/// iff they contain the same facts.
class FactSet {
 public:
  FactSet() = default;
  explicit FactSet(std::size_t num_facts)
      : num_facts_(num_facts), words_(words_for(num_facts), 0) {}
  FactSet(std::size_t num_facts, std::span<const FactId> facts);

  std::size_t universe_size() const { return num_facts_; }
  std::size_t num_words() const { return words_.size(); }
  const Word* data() const { return words_.data(); }
  Word* data() { return words_.data(); }
  std::span<const Word> words() const { return words_; }

  bool contains(FactId f) const {
    return (words_[f / kWordBits] >> (f % kWordBits)) & 1U;
  }
  void insert(FactId f) { words_[f / kWordBits] |= Word{1} << (f % kWordBits); }
  void erase(FactId f) { words_[f / kWordBits] &= ~(Word{1} << (f % kWordBits)); }

  bool is_subset_of(const FactSet& other) const;
  std::size_t size() const;
  std::vector<FactId> to_vector() const;

  bool operator==(const FactSet& other) const = default;

 private:
  std::size_t num_facts_ = 0;
  std::vector<Word> words_;
};

/// Set of true facts. Immutable once built; the hash is cached.
class State {
 public:
  State() = default;
  explicit State(FactSet facts);

  const FactSet& facts() const { return facts_; }
  bool contains(FactId f) const { return facts_.contains(f); }
  std::size_t hash() const { return hash_; }

  bool operator==(const State& other) const {
    return hash_ == other.hash_ && facts_ == other.facts_;
  }

 private:
  FactSet facts_;
  std::size_t hash_ = 0;
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

struct GroundAction {
  std::string name;
  std::vector<std::string> args;
  std::vector<FactId> pre;
  std::vector<FactId> add;
  std::vector<FactId> del;
  std::int64_t cost = 1;

  /// `(name arg1 arg2 ...)`
  std::string signature() const;
};

/// Grounded STRIPS task. Immutable after construction; the constructor
/// normalizes effects (delete-then-add) and checks index bounds.
class GroundTask {
 public:
  GroundTask(std::vector<std::string> facts, std::vector<GroundAction> actions,
             std::vector<FactId> init, std::vector<FactId> goal);

  std::size_t num_facts() const { return facts_.size(); }
  std::size_t num_actions() const { return actions_.size(); }
  const std::string& fact_name(FactId f) const { return facts_[f]; }
  const std::vector<std::string>& fact_names() const { return facts_; }
  const GroundAction& action(ActionId a) const { return actions_[a]; }
  const std::vector<GroundAction>& actions() const { return actions_; }
  const State& init() const { return init_; }
  const std::vector<FactId>& goal() const { return goal_; }
  const FactSet& goal_mask() const { return goal_mask_; }

  const FactSet& pre_mask(ActionId a) const { return masks_[a].pre; }
  const FactSet& add_mask(ActionId a) const { return masks_[a].add; }
  const FactSet& del_mask(ActionId a) const { return masks_[a].del; }

  State make_state(std::span<const FactId> facts) const;

 private:
  struct Masks {
    FactSet pre;
    FactSet add;
    FactSet del;
  };

  std::vector<std::string> facts_;
  std::vector<GroundAction> actions_;
  std::vector<Masks> masks_;
  State init_;
  std::vector<FactId> goal_;
  FactSet goal_mask_;
};

struct Plan {
  std::vector<ActionId> steps;
  std::int64_t cost = 0;

  bool operator==(const Plan&) const = default;
};

Plan make_plan(const GroundTask& task, std::vector<ActionId> steps);

bool is_applicable(const GroundTask& task, const State& s, ActionId a);

/// Actions whose preconditions hold in `s`, in action index order.
std::vector<ActionId> applicable_actions(const GroundTask& task, const State& s);

/// (s \ del(a)) ∪ add(a). Throws ContractViolation if `a` is not applicable.
State apply(const GroundTask& task, const State& s, ActionId a);

bool is_goal(const GroundTask& task, const State& s);

struct PlanValidation {
  bool valid = false;
  std::int64_t cost = 0;
  /// First failing step; equals plan length when every step applied but
  /// the goal does not hold at the end.
  std::optional<std::size_t> failed_step;
  std::string reason;
};

PlanValidation validate_plan(const GroundTask& task, const Plan& plan);

/// IPC plan format: one `(name args)` line per step, then `; cost = N`.
void write_plan(std::ostream& out, const GroundTask& task, const Plan& plan);
std::string format_plan(const GroundTask& task, const Plan& plan);

}  // namespace thts
