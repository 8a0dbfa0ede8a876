#include <sstream>

#include "thts/pddl.hpp"

namespace thts::pddl {

namespace {

void print_typed(std::ostream& os, const std::vector<TypedName>& names) {
  for (const auto& n : names) os << ' ' << n.name << " - " << n.type;
}

void print_atom(std::ostream& os, const Atom& atom) {
  os << '(' << atom.predicate;
  for (const auto& t : atom.terms) os << ' ' << t;
  os << ')';
}

}  // namespace

std::string print_domain(const DomainAst& d) {
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    os << "  (:requirements";
    for (const auto& r : d.requirements) os << ' ' << r;
    os << ")\n";
  }
  if (!d.types.empty()) {
    os << "  (:types";
    print_typed(os, d.types);
    os << ")\n";
  }
  if (!d.constants.empty()) {
    os << "  (:constants";
    print_typed(os, d.constants);
    os << ")\n";
  }
  os << "  (:predicates";
  for (const auto& p : d.predicates) {
    os << " (" << p.name;
    print_typed(os, p.params);
    os << ')';
  }
  os << ")\n";
  if (d.declares_total_cost) os << "  (:functions (total-cost) - number)\n";
  for (const auto& a : d.actions) {
    os << "  (:action " << a.name << "\n    :parameters (";
    for (std::size_t i = 0; i < a.params.size(); ++i) {
      os << (i ? " " : "") << a.params[i].name << " - " << a.params[i].type;
    }
    os << ")\n    :precondition (and";
    for (const auto& p : a.pre) {
      os << ' ';
      print_atom(os, p);
    }
    for (const auto& eq : a.equalities) {
      if (eq.negated) {
        os << " (not (= " << eq.lhs << ' ' << eq.rhs << "))";
      } else {
        os << " (= " << eq.lhs << ' ' << eq.rhs << ')';
      }
    }
    os << ")\n    :effect (and";
    for (const auto& e : a.add) {
      os << ' ';
      print_atom(os, e);
    }
    for (const auto& e : a.del) {
      os << " (not ";
      print_atom(os, e);
      os << ')';
    }
    if (a.cost) os << " (increase (total-cost) " << *a.cost << ')';
    os << "))\n";
  }
  os << ")\n";
  return os.str();
}

std::string print_problem(const ProblemAst& p) {
  std::ostringstream os;
  os << "(define (problem " << p.name << ")\n  (:domain " << p.domain << ")\n";
  os << "  (:objects";
  print_typed(os, p.objects);
  os << ")\n  (:init";
  for (const auto& a : p.init) {
    os << ' ';
    print_atom(os, a);
  }
  os << ")\n  (:goal (and";
  for (const auto& a : p.goal) {
    os << ' ';
    print_atom(os, a);
  }
  os << "))\n";
  if (p.minimize_total_cost) os << "  (:metric minimize (total-cost))\n";
  os << ")\n";
  return os.str();
}

}  // namespace thts::pddl
