#pragma once

// STRIPS + typing subset of PDDL: parsing, printing and grounding.
//
// Supported requirements: :strips, :typing, :equality, :action-costs.
// Preconditions and goals are conjunctions of positive atoms; action
// preconditions may additionally contain (= ?a ?b) and (not (= ?a ?b)),
// which are compiled away during grounding. Identifiers are lowercased.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thts/task.hpp"

namespace thts::pddl {

inline constexpr std::string_view kRootType = "object";

struct TypedName {
  std::string name;
  std::string type{kRootType};
  bool operator==(const TypedName&) const = default;
};

/// Predicate applied to terms; a term is a `?variable` or an object name.
struct Atom {
  std::string predicate;
  std::vector<std::string> terms;
  bool operator==(const Atom&) const = default;
};

struct EqualityConstraint {
  std::string lhs;
  std::string rhs;
  bool negated = false;
  bool operator==(const EqualityConstraint&) const = default;
};

struct PredicateSchema {
  std::string name;
  std::vector<TypedName> params;
  bool operator==(const PredicateSchema&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> params;
  std::vector<Atom> pre;
  std::vector<EqualityConstraint> equalities;
  std::vector<Atom> add;
  std::vector<Atom> del;
  /// Constant from `(increase (total-cost) N)`, if present.
  std::optional<std::int64_t> cost;
  bool operator==(const ActionSchema&) const = default;
};

struct DomainAst {
  std::string name;
  std::vector<std::string> requirements;
  /// Each declared type with its parent (`object` at the root).
  std::vector<TypedName> types;
  std::vector<TypedName> constants;
  std::vector<PredicateSchema> predicates;
  bool declares_total_cost = false;
  std::vector<ActionSchema> actions;

  bool operator==(const DomainAst&) const = default;

  const PredicateSchema* find_predicate(std::string_view name) const;
  bool has_type(std::string_view type) const;
  bool uses_action_costs() const;
};

struct ProblemAst {
  std::string name;
  std::string domain;
  std::vector<TypedName> objects;
  std::vector<Atom> init;
  std::vector<Atom> goal;
  bool minimize_total_cost = false;

  bool operator==(const ProblemAst&) const = default;
};

/// Throws ParseError (with line/column), UnsupportedFeature (naming the
/// requirement or construct) or SemanticError.
DomainAst parse_domain(std::string_view text);

/// Objects, predicates and arities are checked against `domain`.
ProblemAst parse_problem(std::string_view text, const DomainAst& domain);

std::string print_domain(const DomainAst& domain);
std::string print_problem(const ProblemAst& problem);

struct GroundingOptions {
  /// Override every action cost with 1.
  bool unit_costs = true;
  /// Keep only facts and actions reachable in the delete relaxation from
  /// the initial state. When false, every type-consistent instantiation
  /// that passes static and equality checks is kept.
  bool relaxed_reachability = true;
};

GroundTask ground(const DomainAst& domain, const ProblemAst& problem,
                  const GroundingOptions& options = {});

/// Convenience: read two files, parse and ground.
GroundTask load_task(const std::string& domain_path, const std::string& problem_path,
                     const GroundingOptions& options = {});

std::string read_file(const std::string& path);

}  // namespace thts::pddl
