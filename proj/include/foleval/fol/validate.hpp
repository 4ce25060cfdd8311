#ifndef FOLEVAL_FOL_VALIDATE_HPP
#define FOLEVAL_FOL_VALIDATE_HPP

#include <map>
#include <string>
#include <vector>

#include "foleval/fol/ast.hpp"

namespace foleval::fol {

struct Violation {
  enum class Kind { UndefinedPredicate, ArityConflict, MissingGoal, FreeVariable };

  Kind kind;
  std::string identifier;
  std::string location;  // "axiom 2", "goal", "definitions"

  friend bool operator==(const Violation&, const Violation&) = default;
};

inline const char* violation_name(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::UndefinedPredicate: return "UndefinedPredicate";
    case Violation::Kind::ArityConflict: return "ArityConflict";
    case Violation::Kind::MissingGoal: return "MissingGoal";
    case Violation::Kind::FreeVariable: return "FreeVariable";
  }
  return "?";
}

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

struct ValidatePolicy {
  bool strict_free_vars = false;  // report free variables as violations
};

namespace detail {

struct UseCollector {
  // predicate name -> ordered list of (arity, location)
  std::map<std::string, std::vector<std::pair<size_t, std::string>>> uses;

  void collect(const FormulaPtr& f, const std::string& loc) {
    if (!f) return;
    if (f->kind == Formula::Kind::Atom) {
      uses[f->name].emplace_back(f->args.size(), loc);
      return;
    }
    collect(f->lhs, loc);
    collect(f->rhs, loc);
  }
};

}  // namespace detail

inline ValidationReport validate(const FolDocument& doc, ValidatePolicy policy = {}) {
  ValidationReport report;

  std::map<std::string, size_t> declared;
  for (const auto& def : doc.definitions) {
    auto [it, inserted] = declared.emplace(def.name, def.arity);
    if (!inserted && it->second != def.arity) {
      report.violations.push_back(
          {Violation::Kind::ArityConflict, def.name, "definitions"});
    }
  }

  detail::UseCollector uc;
  for (size_t i = 0; i < doc.axioms.size(); ++i) {
    uc.collect(doc.axioms[i], "axiom " + std::to_string(i + 1));
  }
  if (doc.goal) {
    uc.collect(doc.goal, "goal");
  } else {
    report.violations.push_back({Violation::Kind::MissingGoal, "", "goal"});
  }

  // uses is an ordered map: violation order is stable by identifier
  for (const auto& [name, occurrences] : uc.uses) {
    auto decl = declared.find(name);
    if (decl == declared.end()) {
      report.violations.push_back(
          {Violation::Kind::UndefinedPredicate, name, occurrences.front().second});
      // still check internal arity consistency below
    }
    size_t expected = decl != declared.end() ? decl->second : occurrences.front().first;
    for (const auto& [arity, loc] : occurrences) {
      if (arity != expected) {
        report.violations.push_back({Violation::Kind::ArityConflict, name, loc});
        break;
      }
    }
  }

  if (policy.strict_free_vars) {
    auto check_free = [&](const FormulaPtr& f, const std::string& loc) {
      for (const auto& v : free_vars(f)) {
        report.violations.push_back({Violation::Kind::FreeVariable, v, loc});
      }
    };
    for (size_t i = 0; i < doc.axioms.size(); ++i)
      check_free(doc.axioms[i], "axiom " + std::to_string(i + 1));
    if (doc.goal) check_free(doc.goal, "goal");
  }

  return report;
}

}  // namespace foleval::fol

#endif  // FOLEVAL_FOL_VALIDATE_HPP
