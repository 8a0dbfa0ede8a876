#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "thts/error.hpp"
#include "thts/pddl.hpp"

namespace thts::pddl {

namespace {

struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is_atom(std::string_view s) const { return !is_list && atom == s; }
  bool is_variable() const { return !is_list && !atom.empty() && atom[0] == '?'; }
  /// Head symbol of a list, or "" for atoms and empty lists.
  std::string_view head() const {
    if (!is_list || items.empty() || items[0].is_list) return {};
    return items[0].atom;
  }
};

[[noreturn]] void fail(const SExpr& at, const std::string& message) {
  throw ParseError(message, at.line, at.column);
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  SExpr read_document() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("empty input", line_, column_);
    SExpr root = read();
    skip_space();
    if (pos_ < text_.size()) {
      throw ParseError("trailing content after top-level expression", line_, column_);
    }
    return root;
  }

 private:
  SExpr read() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, column_);
    SExpr e;
    e.line = line_;
    e.column = column_;
    const char c = text_[pos_];
    if (c == ')') throw ParseError("unexpected ')'", line_, column_);
    if (c == '(') {
      e.is_list = true;
      advance();
      while (true) {
        skip_space();
        if (pos_ >= text_.size()) {
          throw ParseError("unterminated list opened here", e.line, e.column);
        }
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    while (pos_ < text_.size()) {
      const char d = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') break;
      e.atom.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(d))));
      advance();
    }
    return e;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

const SExpr& expect_list(const SExpr& e, const char* what) {
  if (!e.is_list) fail(e, std::string("expected a list for ") + what);
  return e;
}

const std::string& expect_symbol(const SExpr& e, const char* what) {
  if (e.is_list || e.atom.empty()) fail(e, std::string("expected a symbol for ") + what);
  return e.atom;
}

/// `a b - t c - u d` → typed list; untyped names default to `object`.
std::vector<TypedName> parse_typed_list(const std::vector<SExpr>& items, std::size_t begin,
                                        bool variables) {
  std::vector<TypedName> out;
  std::size_t pending = out.size();
  for (std::size_t i = begin; i < items.size(); ++i) {
    const SExpr& item = items[i];
    if (item.is_atom("-")) {
      if (i + 1 >= items.size()) fail(item, "missing type after '-'");
      const SExpr& type = items[i + 1];
      if (type.is_list) {
        if (type.head() == "either") throw UnsupportedFeature("'either' types are not supported");
        fail(type, "expected a type name");
      }
      if (pending == out.size()) fail(item, "type annotation without names");
      for (std::size_t k = pending; k < out.size(); ++k) out[k].type = type.atom;
      pending = out.size();
      ++i;
      continue;
    }
    const std::string& name = expect_symbol(item, "typed list entry");
    if (variables != (name[0] == '?')) {
      fail(item, variables ? "expected a variable" : "unexpected variable");
    }
    out.push_back({name, std::string(kRootType)});
  }
  return out;
}

Atom parse_atom(const SExpr& e) {
  expect_list(e, "atom");
  if (e.items.empty()) fail(e, "empty atom");
  Atom atom;
  atom.predicate = expect_symbol(e.items[0], "predicate name");
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    atom.terms.push_back(expect_symbol(e.items[i], "term"));
  }
  return atom;
}

/// Flattens `(and ...)` into its conjuncts; a single literal is a
/// one-element conjunction.
std::vector<const SExpr*> conjuncts(const SExpr& e) {
  expect_list(e, "formula");
  std::vector<const SExpr*> out;
  if (e.head() == "and") {
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      auto nested = conjuncts(e.items[i]);
      out.insert(out.end(), nested.begin(), nested.end());
    }
  } else if (!e.items.empty()) {
    out.push_back(&e);
  }
  return out;
}

bool is_equality(const SExpr& e) { return e.head() == "="; }

EqualityConstraint parse_equality(const SExpr& e, bool negated) {
  if (e.items.size() != 3) fail(e, "'=' takes exactly two terms");
  return {expect_symbol(e.items[1], "term"), expect_symbol(e.items[2], "term"), negated};
}

void reject_connective(const SExpr& lit, const char* where) {
  const std::string_view head = lit.head();
  if (head == "or" || head == "imply" || head == "forall" || head == "exists" ||
      head == "when" || head == "not") {
    throw UnsupportedFeature("'" + std::string(head) + "' in " + where +
                             " is outside the supported STRIPS fragment");
  }
}

const std::set<std::string, std::less<>> kSupportedRequirements = {
    ":strips", ":typing", ":equality", ":action-costs"};

class DomainChecker {
 public:
  explicit DomainChecker(const DomainAst& d) : d_(d) {}

  void check() const {
    for (const auto& t : d_.types) check_type(t.type, "type " + t.name);
    for (const auto& c : d_.constants) check_type(c.type, "constant " + c.name);
    for (const auto& p : d_.predicates) {
      for (const auto& param : p.params) check_type(param.type, "predicate " + p.name);
    }
    std::set<std::string> names;
    for (const auto& a : d_.actions) {
      if (!names.insert(a.name).second) throw SemanticError("duplicate action schema " + a.name);
      check_action(a);
    }
  }

 private:
  void check_type(const std::string& type, const std::string& where) const {
    if (!d_.has_type(type)) throw SemanticError("undeclared type '" + type + "' in " + where);
  }

  void check_term(const ActionSchema& a, const std::string& term) const {
    if (term[0] == '?') {
      const bool declared = std::any_of(a.params.begin(), a.params.end(),
                                        [&](const TypedName& p) { return p.name == term; });
      if (!declared) {
        throw SemanticError("variable " + term + " not declared in parameters of " + a.name);
      }
      return;
    }
    const bool known = std::any_of(d_.constants.begin(), d_.constants.end(),
                                   [&](const TypedName& c) { return c.name == term; });
    if (!known) throw SemanticError("undeclared constant '" + term + "' in " + a.name);
  }

  void check_atom(const ActionSchema& a, const Atom& atom) const {
    const PredicateSchema* p = d_.find_predicate(atom.predicate);
    if (!p) throw SemanticError("undeclared predicate '" + atom.predicate + "' in " + a.name);
    if (p->params.size() != atom.terms.size()) {
      throw SemanticError("arity mismatch for '" + atom.predicate + "' in " + a.name);
    }
    for (const auto& t : atom.terms) check_term(a, t);
  }

  void check_action(const ActionSchema& a) const {
    for (const auto& p : a.params) check_type(p.type, "action " + a.name);
    for (const auto& atom : a.pre) check_atom(a, atom);
    for (const auto& atom : a.add) check_atom(a, atom);
    for (const auto& atom : a.del) check_atom(a, atom);
    for (const auto& eq : a.equalities) {
      check_term(a, eq.lhs);
      check_term(a, eq.rhs);
    }
  }

  const DomainAst& d_;
};

bool is_total_cost(const SExpr& e) {
  return e.is_list && e.items.size() == 1 && e.items[0].is_atom("total-cost");
}

ActionSchema parse_action(const SExpr& e, DomainAst& domain) {
  ActionSchema action;
  if (e.items.size() < 2) fail(e, "action without a name");
  action.name = expect_symbol(e.items[1], "action name");
  for (std::size_t i = 2; i < e.items.size(); i += 2) {
    const SExpr& key = e.items[i];
    const std::string& k = expect_symbol(key, "action section");
    if (i + 1 >= e.items.size()) fail(key, "missing value for " + k);
    const SExpr& value = e.items[i + 1];
    if (k == ":parameters") {
      action.params = parse_typed_list(expect_list(value, ":parameters").items, 0, true);
    } else if (k == ":precondition") {
      if (value.is_list && value.items.empty()) continue;
      for (const SExpr* lit : conjuncts(value)) {
        if (is_equality(*lit)) {
          action.equalities.push_back(parse_equality(*lit, false));
        } else if (lit->head() == "not" && lit->items.size() == 2 &&
                   is_equality(lit->items[1])) {
          action.equalities.push_back(parse_equality(lit->items[1], true));
        } else if (lit->head() == "not") {
          throw UnsupportedFeature(
              "negative precondition in " + action.name +
              " (requirement :negative-preconditions is not supported)");
        } else {
          reject_connective(*lit, "a precondition");
          action.pre.push_back(parse_atom(*lit));
        }
      }
    } else if (k == ":effect") {
      if (value.is_list && value.items.empty()) continue;
      for (const SExpr* lit : conjuncts(value)) {
        const std::string_view head = lit->head();
        if (head == "not") {
          if (lit->items.size() != 2) fail(*lit, "'not' takes one argument");
          action.del.push_back(parse_atom(lit->items[1]));
        } else if (head == "increase") {
          if (lit->items.size() != 3 || !is_total_cost(lit->items[1])) {
            throw UnsupportedFeature("only (increase (total-cost) N) effects are supported");
          }
          const SExpr& amount = lit->items[2];
          std::int64_t value_n = 0;
          const std::string& text = amount.is_list ? std::string() : amount.atom;
          auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value_n);
          if (amount.is_list || ec != std::errc() || ptr != text.data() + text.size()) {
            throw UnsupportedFeature("action cost in " + action.name +
                                     " must be a non-negative integer constant");
          }
          if (value_n < 0) throw SemanticError("negative action cost in " + action.name);
          action.cost = value_n;
          domain.declares_total_cost = true;
        } else {
          reject_connective(*lit, "an effect");
          action.add.push_back(parse_atom(*lit));
        }
      }
    } else {
      throw UnsupportedFeature("action section " + k + " is not supported");
    }
  }
  return action;
}

}  // namespace

const PredicateSchema* DomainAst::find_predicate(std::string_view n) const {
  for (const auto& p : predicates) {
    if (p.name == n) return &p;
  }
  return nullptr;
}

bool DomainAst::has_type(std::string_view type) const {
  if (type == kRootType) return true;
  // Parents listed only after '-' count as declared.
  return std::any_of(types.begin(), types.end(),
                     [&](const TypedName& t) { return t.name == type || t.type == type; });
}

bool DomainAst::uses_action_costs() const {
  return std::find(requirements.begin(), requirements.end(), ":action-costs") !=
         requirements.end();
}

DomainAst parse_domain(std::string_view text) {
  const SExpr root = Reader(text).read_document();
  if (root.head() != "define") fail(root, "expected (define (domain ...) ...)");
  DomainAst domain;
  bool have_name = false;
  for (std::size_t i = 1; i < root.items.size(); ++i) {
    const SExpr& section = expect_list(root.items[i], "domain section");
    const std::string_view head = section.head();
    if (head == "domain") {
      if (section.items.size() != 2) fail(section, "expected (domain <name>)");
      domain.name = expect_symbol(section.items[1], "domain name");
      have_name = true;
    } else if (head == ":requirements") {
      for (std::size_t k = 1; k < section.items.size(); ++k) {
        const std::string& req = expect_symbol(section.items[k], "requirement");
        if (!kSupportedRequirements.contains(req)) {
          throw UnsupportedFeature("unsupported requirement " + req);
        }
        domain.requirements.push_back(req);
      }
    } else if (head == ":types") {
      domain.types = parse_typed_list(section.items, 1, false);
    } else if (head == ":constants") {
      domain.constants = parse_typed_list(section.items, 1, false);
    } else if (head == ":predicates") {
      for (std::size_t k = 1; k < section.items.size(); ++k) {
        const SExpr& p = expect_list(section.items[k], "predicate declaration");
        if (p.items.empty()) fail(p, "empty predicate declaration");
        PredicateSchema schema;
        schema.name = expect_symbol(p.items[0], "predicate name");
        schema.params = parse_typed_list(p.items, 1, true);
        domain.predicates.push_back(std::move(schema));
      }
    } else if (head == ":functions") {
      for (std::size_t k = 1; k < section.items.size(); ++k) {
        const SExpr& f = section.items[k];
        if (f.is_atom("-") || f.is_atom("number")) continue;
        if (!is_total_cost(f)) throw UnsupportedFeature("only the total-cost function is supported");
        domain.declares_total_cost = true;
      }
    } else if (head == ":action") {
      domain.actions.push_back(parse_action(section, domain));
    } else {
      throw UnsupportedFeature("domain section " + std::string(head) + " is not supported");
    }
  }
  if (!have_name) fail(root, "domain has no name");
  DomainChecker(domain).check();
  return domain;
}

ProblemAst parse_problem(std::string_view text, const DomainAst& domain) {
  const SExpr root = Reader(text).read_document();
  if (root.head() != "define") fail(root, "expected (define (problem ...) ...)");
  ProblemAst problem;
  bool have_goal = false;
  for (std::size_t i = 1; i < root.items.size(); ++i) {
    const SExpr& section = expect_list(root.items[i], "problem section");
    const std::string_view head = section.head();
    if (head == "problem") {
      if (section.items.size() != 2) fail(section, "expected (problem <name>)");
      problem.name = expect_symbol(section.items[1], "problem name");
    } else if (head == ":domain") {
      if (section.items.size() != 2) fail(section, "expected (:domain <name>)");
      problem.domain = expect_symbol(section.items[1], "domain name");
    } else if (head == ":objects") {
      problem.objects = parse_typed_list(section.items, 1, false);
    } else if (head == ":init") {
      for (std::size_t k = 1; k < section.items.size(); ++k) {
        const SExpr& lit = section.items[k];
        if (lit.head() == "=" && lit.items.size() == 3 && is_total_cost(lit.items[1])) continue;
        reject_connective(lit, ":init");
        problem.init.push_back(parse_atom(lit));
      }
    } else if (head == ":goal") {
      if (section.items.size() != 2) fail(section, "expected (:goal <formula>)");
      have_goal = true;
      for (const SExpr* lit : conjuncts(section.items[1])) {
        reject_connective(*lit, "the goal");
        if (is_equality(*lit)) throw UnsupportedFeature("equality in the goal is not supported");
        problem.goal.push_back(parse_atom(*lit));
      }
    } else if (head == ":metric") {
      if (section.items.size() != 3 || !section.items[1].is_atom("minimize") ||
          !is_total_cost(section.items[2])) {
        throw UnsupportedFeature("only (:metric minimize (total-cost)) is supported");
      }
      problem.minimize_total_cost = true;
    } else if (head == ":requirements") {
      for (std::size_t k = 1; k < section.items.size(); ++k) {
        const std::string& req = expect_symbol(section.items[k], "requirement");
        if (!kSupportedRequirements.contains(req)) {
          throw UnsupportedFeature("unsupported requirement " + req);
        }
      }
    } else {
      throw UnsupportedFeature("problem section " + std::string(head) + " is not supported");
    }
  }
  if (!have_goal) fail(root, "problem has no :goal");

  for (const auto& o : problem.objects) {
    if (!domain.has_type(o.type)) {
      throw SemanticError("object " + o.name + " has undeclared type '" + o.type + "'");
    }
  }
  auto known_object = [&](const std::string& name) {
    auto same = [&](const TypedName& t) { return t.name == name; };
    return std::any_of(problem.objects.begin(), problem.objects.end(), same) ||
           std::any_of(domain.constants.begin(), domain.constants.end(), same);
  };
  auto check = [&](const Atom& atom, const char* where) {
    const PredicateSchema* p = domain.find_predicate(atom.predicate);
    if (!p) throw SemanticError(std::string("undeclared predicate '") + atom.predicate + "' in " + where);
    if (p->params.size() != atom.terms.size()) {
      throw SemanticError(std::string("arity mismatch for '") + atom.predicate + "' in " + where);
    }
    for (const auto& t : atom.terms) {
      if (!known_object(t)) throw SemanticError("undeclared object '" + t + "' in " + where);
    }
  };
  for (const auto& a : problem.init) check(a, ":init");
  for (const auto& a : problem.goal) check(a, ":goal");
  return problem;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

GroundTask load_task(const std::string& domain_path, const std::string& problem_path,
                     const GroundingOptions& options) {
  const DomainAst domain = parse_domain(read_file(domain_path));
  const ProblemAst problem = parse_problem(read_file(problem_path), domain);
  return ground(domain, problem, options);
}

}  // namespace thts::pddl
