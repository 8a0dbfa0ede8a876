#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "thts/error.hpp"
#include "thts/pddl.hpp"

namespace thts::pddl {

namespace {

using ObjectId = std::uint32_t;

std::string fact_name(const std::string& predicate, const std::vector<std::string>& args) {
  std::string s = "(" + predicate;
  for (const auto& a : args) s += " " + a;
  return s + ")";
}

class Grounder {
 public:
  Grounder(const DomainAst& domain, const ProblemAst& problem, const GroundingOptions& options)
      : domain_(domain), problem_(problem), options_(options) {
    if (problem.domain != domain.name) {
      throw SemanticError("problem " + problem.name + " targets domain '" + problem.domain +
                          "', not '" + domain.name + "'");
    }
    for (const auto& c : domain.constants) add_object(c);
    for (const auto& o : problem.objects) add_object(o);
    for (const auto& a : domain.actions) {
      for (const auto& e : a.add) fluent_.insert(e.predicate);
      for (const auto& e : a.del) fluent_.insert(e.predicate);
    }
    for (const auto& atom : problem.init) {
      init_atoms_.insert(fact_name(atom.predicate, atom.terms));
    }
  }

  GroundTask run() {
    for (const auto& schema : domain_.actions) instantiate(schema);

    std::vector<bool> keep(candidates_.size(), true);
    std::set<std::string> universe;
    for (const auto& atom : problem_.init) {
      if (fluent_.contains(atom.predicate)) universe.insert(fact_name(atom.predicate, atom.terms));
    }

    if (options_.relaxed_reachability) {
      // Fixpoint of the delete relaxation from the initial state.
      std::fill(keep.begin(), keep.end(), false);
      bool changed = true;
      while (changed) {
        changed = false;
        for (std::size_t i = 0; i < candidates_.size(); ++i) {
          if (keep[i]) continue;
          const auto& c = candidates_[i];
          const bool ready = std::all_of(c.pre.begin(), c.pre.end(),
                                         [&](const std::string& f) { return universe.contains(f); });
          if (!ready) continue;
          keep[i] = true;
          changed = true;
          for (const auto& f : c.add) universe.insert(f);
        }
      }
    } else {
      for (const auto& c : candidates_) {
        universe.insert(c.pre.begin(), c.pre.end());
        universe.insert(c.add.begin(), c.add.end());
        universe.insert(c.del.begin(), c.del.end());
      }
    }

    std::vector<std::string> goal_names;
    bool static_goal_violated = false;
    for (const auto& atom : problem_.goal) {
      const std::string name = fact_name(atom.predicate, atom.terms);
      if (!fluent_.contains(atom.predicate)) {
        if (!init_atoms_.contains(name)) static_goal_violated = true;
        continue;
      }
      goal_names.push_back(name);
      universe.insert(name);
    }
    // A static goal atom missing from init can never hold; keep it as an
    // unachievable fact so the task stays unsolvable.
    const std::string kFalse = "(false-static-goal)";
    if (static_goal_violated) {
      universe.insert(kFalse);
      goal_names.push_back(kFalse);
    }

    std::vector<std::string> facts(universe.begin(), universe.end());
    std::unordered_map<std::string, FactId> index;
    for (FactId f = 0; f < facts.size(); ++f) index.emplace(facts[f], f);

    auto to_ids = [&](const std::vector<std::string>& names) {
      std::vector<FactId> ids;
      for (const auto& n : names) {
        auto it = index.find(n);
        if (it != index.end()) ids.push_back(it->second);
      }
      return ids;
    };

    std::vector<GroundAction> actions;
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      if (!keep[i]) continue;
      auto& c = candidates_[i];
      GroundAction a;
      a.name = c.name;
      a.args = c.args;
      a.pre = to_ids(c.pre);
      a.add = to_ids(c.add);
      a.del = to_ids(c.del);
      a.cost = c.cost;
      actions.push_back(std::move(a));
    }

    std::vector<FactId> init;
    for (const auto& atom : problem_.init) {
      auto it = index.find(fact_name(atom.predicate, atom.terms));
      if (it != index.end()) init.push_back(it->second);
    }
    return GroundTask(std::move(facts), std::move(actions), std::move(init), to_ids(goal_names));
  }

 private:
  struct Candidate {
    std::string name;
    std::vector<std::string> args;
    std::vector<std::string> pre;
    std::vector<std::string> add;
    std::vector<std::string> del;
    std::int64_t cost = 1;
  };

  void add_object(const TypedName& o) {
    if (object_index_.contains(o.name)) return;
    object_index_.emplace(o.name, static_cast<ObjectId>(objects_.size()));
    objects_.push_back(o);
  }

  bool is_subtype(const std::string& type, const std::string& ancestor) const {
    std::string current = type;
    for (std::size_t guard = 0; guard <= domain_.types.size() + 1; ++guard) {
      if (current == ancestor) return true;
      if (current == kRootType) return false;
      auto it = std::find_if(domain_.types.begin(), domain_.types.end(),
                             [&](const TypedName& t) { return t.name == current; });
      if (it == domain_.types.end()) return ancestor == kRootType;
      current = it->type;
    }
    throw SemanticError("cyclic type hierarchy at '" + type + "'");
  }

  std::vector<ObjectId> objects_of(const std::string& type) const {
    std::vector<ObjectId> out;
    for (ObjectId i = 0; i < objects_.size(); ++i) {
      if (is_subtype(objects_[i].type, type)) out.push_back(i);
    }
    return out;
  }

  struct Binding {
    const ActionSchema* schema;
    std::map<std::string, std::size_t> param_pos;
    std::vector<std::string> values;
    std::vector<std::vector<ObjectId>> domains;
    /// Checks (static atoms, equalities) whose last variable is at each depth.
    std::vector<std::vector<const Atom*>> static_at;
    std::vector<std::vector<const EqualityConstraint*>> eq_at;
    std::vector<const Atom*> ground_statics;
    std::vector<const EqualityConstraint*> ground_eqs;
  };

  std::string resolve(const Binding& b, const std::string& term) const {
    if (term[0] == '?') return b.values[b.param_pos.at(term)];
    return term;
  }

  std::size_t last_position(const Binding& b, const std::vector<std::string>& terms) const {
    std::size_t pos = 0;
    bool any = false;
    for (const auto& t : terms) {
      if (t[0] != '?') continue;
      pos = std::max(pos, b.param_pos.at(t));
      any = true;
    }
    return any ? pos : static_cast<std::size_t>(-1);
  }

  bool static_holds(const Binding& b, const Atom& atom) const {
    std::vector<std::string> args;
    for (const auto& t : atom.terms) args.push_back(resolve(b, t));
    return init_atoms_.contains(fact_name(atom.predicate, args));
  }

  bool equality_holds(const Binding& b, const EqualityConstraint& eq) const {
    return (resolve(b, eq.lhs) == resolve(b, eq.rhs)) != eq.negated;
  }

  void instantiate(const ActionSchema& schema) {
    Binding b;
    b.schema = &schema;
    const std::size_t n = schema.params.size();
    b.values.resize(n);
    b.static_at.resize(n);
    b.eq_at.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      b.param_pos.emplace(schema.params[i].name, i);
      b.domains.push_back(objects_of(schema.params[i].type));
    }
    for (const auto& atom : schema.pre) {
      if (fluent_.contains(atom.predicate)) continue;
      const std::size_t pos = last_position(b, atom.terms);
      if (pos == static_cast<std::size_t>(-1)) {
        b.ground_statics.push_back(&atom);
      } else {
        b.static_at[pos].push_back(&atom);
      }
    }
    for (const auto& eq : schema.equalities) {
      const std::size_t pos = last_position(b, {eq.lhs, eq.rhs});
      if (pos == static_cast<std::size_t>(-1)) {
        b.ground_eqs.push_back(&eq);
      } else {
        b.eq_at[pos].push_back(&eq);
      }
    }
    for (const Atom* a : b.ground_statics) {
      if (!static_holds(b, *a)) return;
    }
    for (const EqualityConstraint* e : b.ground_eqs) {
      if (!equality_holds(b, *e)) return;
    }
    bind(b, 0);
  }

  void bind(Binding& b, std::size_t depth) {
    if (depth == b.values.size()) {
      emit(b);
      return;
    }
    for (ObjectId o : b.domains[depth]) {
      b.values[depth] = objects_[o].name;
      bool ok = true;
      for (const Atom* a : b.static_at[depth]) {
        if (!static_holds(b, *a)) {
          ok = false;
          break;
        }
      }
      for (std::size_t k = 0; ok && k < b.eq_at[depth].size(); ++k) {
        ok = equality_holds(b, *b.eq_at[depth][k]);
      }
      if (ok) bind(b, depth + 1);
    }
  }

  void emit(const Binding& b) {
    const ActionSchema& s = *b.schema;
    Candidate c;
    c.name = s.name;
    c.args = b.values;
    auto ground_atoms = [&](const std::vector<Atom>& atoms, std::vector<std::string>& out) {
      for (const auto& atom : atoms) {
        if (!fluent_.contains(atom.predicate)) continue;
        std::vector<std::string> args;
        for (const auto& t : atom.terms) args.push_back(resolve(b, t));
        out.push_back(fact_name(atom.predicate, args));
      }
    };
    ground_atoms(s.pre, c.pre);
    ground_atoms(s.add, c.add);
    ground_atoms(s.del, c.del);
    if (options_.unit_costs) {
      c.cost = 1;
    } else if (s.cost) {
      c.cost = *s.cost;
    } else {
      c.cost = domain_.uses_action_costs() ? 0 : 1;
    }
    candidates_.push_back(std::move(c));
  }

  const DomainAst& domain_;
  const ProblemAst& problem_;
  GroundingOptions options_;
  std::vector<TypedName> objects_;
  std::unordered_map<std::string, ObjectId> object_index_;
  std::unordered_set<std::string> fluent_;
  std::unordered_set<std::string> init_atoms_;
  std::vector<Candidate> candidates_;
};

}  // namespace

GroundTask ground(const DomainAst& domain, const ProblemAst& problem,
                  const GroundingOptions& options) {
  return Grounder(domain, problem, options).run();
}

}  // namespace thts::pddl
