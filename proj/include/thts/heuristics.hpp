#pragma once

// Delete-relaxation and goal-count heuristics with explicit infinity.

#include <compare>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "thts/task.hpp"

namespace thts {

/// Non-negative extended real. Infinity marks a recognized dead-end and is
/// a distinct state, not a large number.
class HValue {
 public:
  constexpr HValue() = default;
  explicit HValue(double v);

  static constexpr HValue infinity() {
    HValue h;
    h.infinite_ = true;
    return h;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }
  /// Finite value. Throws ContractViolation on infinity.
  double value() const;
  /// value() or +inf as a double, for arithmetic in tests and logs.
  double as_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend constexpr bool operator==(const HValue& a, const HValue& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend constexpr std::partial_ordering operator<=>(const HValue& a, const HValue& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
    return a.value_ <=> b.value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

std::string to_string(const HValue& h);

struct Evaluation {
  HValue value;
  /// Preferred operators, applicable in the evaluated state, ascending ids.
  std::vector<ActionId> preferred;
};

enum class HeuristicKind : std::uint8_t { kFF, kAdd, kMax, kGoalCount };

HeuristicKind parse_heuristic_kind(std::string_view name);
std::string_view heuristic_name(HeuristicKind kind);

/// Stateful evaluator bound to one task. Holds scratch buffers, so one
/// instance must not be shared between concurrent searches.
class Heuristic {
 public:
  virtual ~Heuristic() = default;
  virtual Evaluation evaluate(const State& s) = 0;
  virtual std::string_view name() const = 0;
};

std::unique_ptr<Heuristic> make_heuristic(HeuristicKind kind, const GroundTask& task);

HValue h_max(const GroundTask& task, const State& s);
HValue h_add(const GroundTask& task, const State& s);
Evaluation h_ff(const GroundTask& task, const State& s);
HValue h_goal_count(const GroundTask& task, const State& s);

}  // namespace thts
