#ifndef FOLEVAL_FOL_AST_HPP
#define FOLEVAL_FOL_AST_HPP

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "foleval/errors.hpp"
#include "foleval/text.hpp"

namespace foleval::fol {

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

struct Term {
  enum class Kind { Variable, Constant, Function };

  Kind kind = Kind::Variable;
  std::string name;
  std::vector<Term> args;  // Function only

  static Term var(std::string n) { return {Kind::Variable, std::move(n), {}}; }
  static Term constant(std::string n) { return {Kind::Constant, std::move(n), {}}; }
  static Term func(std::string n, std::vector<Term> a) {
    return {Kind::Function, std::move(n), std::move(a)};
  }

  friend bool operator==(const Term& a, const Term& b) {
    return a.kind == b.kind && a.name == b.name && a.args == b.args;
  }
};

// ---------------------------------------------------------------------------
// Formulas (immutable; shared subtrees are fine)
// ---------------------------------------------------------------------------

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Atom, Not, And, Or, Implies, Iff, Forall, Exists };

  Kind kind = Kind::Atom;
  std::string name;         // Atom: predicate; Forall/Exists: bound variable
  std::vector<Term> args;   // Atom only
  FormulaPtr lhs;           // Not/quantifier body lives here
  FormulaPtr rhs;           // binary connectives only

  static FormulaPtr atom(std::string pred, std::vector<Term> a = {}) {
    return std::make_shared<Formula>(
        Formula{Kind::Atom, std::move(pred), std::move(a), nullptr, nullptr});
  }
  static FormulaPtr negation(FormulaPtr f) {
    return std::make_shared<Formula>(Formula{Kind::Not, "", {}, std::move(f), nullptr});
  }
  static FormulaPtr binary(Kind k, FormulaPtr l, FormulaPtr r) {
    return std::make_shared<Formula>(Formula{k, "", {}, std::move(l), std::move(r)});
  }
  static FormulaPtr conjunction(FormulaPtr l, FormulaPtr r) {
    return binary(Kind::And, std::move(l), std::move(r));
  }
  static FormulaPtr disjunction(FormulaPtr l, FormulaPtr r) {
    return binary(Kind::Or, std::move(l), std::move(r));
  }
  static FormulaPtr implies(FormulaPtr l, FormulaPtr r) {
    return binary(Kind::Implies, std::move(l), std::move(r));
  }
  static FormulaPtr iff(FormulaPtr l, FormulaPtr r) {
    return binary(Kind::Iff, std::move(l), std::move(r));
  }
  static FormulaPtr quantifier(Kind k, std::string var, FormulaPtr body) {
    return std::make_shared<Formula>(
        Formula{k, std::move(var), {}, std::move(body), nullptr});
  }
  static FormulaPtr forall(std::string var, FormulaPtr body) {
    return quantifier(Kind::Forall, std::move(var), std::move(body));
  }
  static FormulaPtr exists(std::string var, FormulaPtr body) {
    return quantifier(Kind::Exists, std::move(var), std::move(body));
  }
};

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->name != b->name || a->args != b->args) return false;
  return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
}

// ---------------------------------------------------------------------------
// Free variables
// ---------------------------------------------------------------------------

namespace detail {
inline void term_vars(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Variable) {
    out.insert(t.name);
  } else {
    for (const Term& a : t.args) term_vars(a, out);
  }
}
inline void free_vars_impl(const FormulaPtr& f, std::set<std::string>& bound,
                           std::set<std::string>& out) {
  if (!f) return;
  switch (f->kind) {
    case Formula::Kind::Atom: {
      std::set<std::string> vars;
      for (const Term& t : f->args) term_vars(t, vars);
      for (const auto& v : vars)
        if (!bound.count(v)) out.insert(v);
      break;
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      bool inserted = bound.insert(f->name).second;
      free_vars_impl(f->lhs, bound, out);
      if (inserted) bound.erase(f->name);
      break;
    }
    default:
      free_vars_impl(f->lhs, bound, out);
      free_vars_impl(f->rhs, bound, out);
  }
}
}  // namespace detail

inline std::set<std::string> free_vars(const FormulaPtr& f) {
  std::set<std::string> bound, out;
  detail::free_vars_impl(f, bound, out);
  return out;
}

// ---------------------------------------------------------------------------
// Signature: identifier -> arity, fixed on first sight
// ---------------------------------------------------------------------------

class Signature {
 public:
  void note_predicate(const std::string& name, size_t arity) {
    note(predicates_, name, arity, "predicate");
  }
  void note_function(const std::string& name, size_t arity) {
    note(functions_, name, arity, "function");
  }

  bool check_predicate(const std::string& name, size_t arity) const {
    auto it = predicates_.find(name);
    return it == predicates_.end() || it->second == arity;
  }
  bool check_function(const std::string& name, size_t arity) const {
    auto it = functions_.find(name);
    return it == functions_.end() || it->second == arity;
  }

  const std::map<std::string, size_t>& predicates() const { return predicates_; }
  const std::map<std::string, size_t>& functions() const { return functions_; }

 private:
  static void note(std::map<std::string, size_t>& m, const std::string& name,
                   size_t arity, const char* what) {
    auto [it, inserted] = m.emplace(name, arity);
    if (!inserted && it->second != arity) {
      throw Error(Errc::arity_error,
                  std::string(what) + " '" + name + "' used with arity " +
                      std::to_string(arity) + " but declared with arity " +
                      std::to_string(it->second));
    }
  }

  std::map<std::string, size_t> predicates_;
  std::map<std::string, size_t> functions_;
};

// ---------------------------------------------------------------------------
// FolDocument: predicate definitions with glosses, axioms, and a goal
// ---------------------------------------------------------------------------

struct PredicateDefinition {
  std::string name;
  size_t arity = 0;
  std::string gloss;
  std::string language;  // BCP-47-ish tag, e.g. "en"

  friend bool operator==(const PredicateDefinition&, const PredicateDefinition&) = default;
};

struct FolDocument {
  std::vector<PredicateDefinition> definitions;
  std::vector<FormulaPtr> axioms;
  FormulaPtr goal;
};

inline bool equal(const FolDocument& a, const FolDocument& b) {
  if (a.definitions != b.definitions) return false;
  if (a.axioms.size() != b.axioms.size()) return false;
  for (size_t i = 0; i < a.axioms.size(); ++i)
    if (!equal(a.axioms[i], b.axioms[i])) return false;
  return equal(a.goal, b.goal);
}

}  // namespace foleval::fol

#endif  // FOLEVAL_FOL_AST_HPP
