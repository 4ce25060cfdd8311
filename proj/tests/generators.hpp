#ifndef FOLEVAL_TESTS_GENERATORS_HPP
#define FOLEVAL_TESTS_GENERATORS_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "foleval/fol/ast.hpp"

namespace testgen {

// Random well-formed formulas for round-trip properties.
class FormulaGen {
 public:
  explicit FormulaGen(uint64_t seed) : rng_(seed) {}

  foleval::fol::FormulaPtr formula(int max_depth) {
    using foleval::fol::Formula;
    if (max_depth <= 0 || pick(6) == 0) {
      return atom();
    }
    switch (pick(7)) {
      case 0: return Formula::negation(formula(max_depth - 1));
      case 1: return Formula::conjunction(formula(max_depth - 1), formula(max_depth - 1));
      case 2: return Formula::disjunction(formula(max_depth - 1), formula(max_depth - 1));
      case 3: return Formula::implies(formula(max_depth - 1), formula(max_depth - 1));
      case 4: return Formula::iff(formula(max_depth - 1), formula(max_depth - 1));
      case 5: return Formula::forall(var_name(), formula(max_depth - 1));
      default: return Formula::exists(var_name(), formula(max_depth - 1));
    }
  }

 private:
  foleval::fol::FormulaPtr atom() {
    using foleval::fol::Term;
    static const char* preds[] = {"P", "Q", "R", "Harm", "Plan", "Knows"};
    std::vector<Term> args;
    int arity = pick(3);
    for (int i = 0; i < arity; ++i) args.push_back(term(1));
    return foleval::fol::Formula::atom(preds[pick(6)], std::move(args));
  }

  foleval::fol::Term term(int depth) {
    using foleval::fol::Term;
    static const char* consts[] = {"Alice", "Bob", "Dragon", "C1"};
    switch (depth > 0 ? pick(3) : pick(2)) {
      case 0: return Term::var(var_name());
      case 1: return Term::constant(consts[pick(4)]);
      default: {
        std::vector<Term> args;
        int arity = 1 + pick(2);
        for (int i = 0; i < arity; ++i) args.push_back(term(depth - 1));
        return Term::func(pick(2) ? "F" : "G", std::move(args));
      }
    }
  }

  std::string var_name() {
    static const char* vars[] = {"x", "y", "z", "w"};
    return vars[pick(4)];
  }

  int pick(int n) { return static_cast<int>(rng_() % static_cast<uint64_t>(n)); }

  std::mt19937_64 rng_;
};

}  // namespace testgen

#endif  // FOLEVAL_TESTS_GENERATORS_HPP
