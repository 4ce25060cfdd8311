#ifndef FOLEVAL_FOL_RENDER_HPP
#define FOLEVAL_FOL_RENDER_HPP

#include <string>

#include "foleval/fol/ast.hpp"

namespace foleval::fol {

enum class RenderStyle { Unicode, Ascii };

namespace detail {

// precedence: atoms bind tightest, quantifiers weakest (maximal scope)
inline int prec(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Atom: return 6;
    case Formula::Kind::Not: return 5;
    case Formula::Kind::And: return 4;
    case Formula::Kind::Or: return 3;
    case Formula::Kind::Implies: return 2;
    case Formula::Kind::Iff: return 1;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: return 0;
  }
  return 0;
}

inline void render_term(const Term& t, std::string& out) {
  out += t.name;
  if (t.kind == Term::Kind::Function) {
    out += '(';
    for (size_t i = 0; i < t.args.size(); ++i) {
      if (i) out += ", ";
      render_term(t.args[i], out);
    }
    out += ')';
  }
}

inline void render_impl(const Formula& f, RenderStyle style, std::string& out) {
  const bool uni = style == RenderStyle::Unicode;
  auto child = [&](const Formula& c, bool parens) {
    if (parens) out += '(';
    render_impl(c, style, out);
    if (parens) out += ')';
  };
  auto binary = [&](const char* uop, const char* aop, bool right_assoc) {
    int p = prec(f);
    int pl = prec(*f.lhs);
    int pr = prec(*f.rhs);
    bool lparen = right_assoc ? pl <= p : pl < p;
    bool rparen = right_assoc ? pr < p : pr <= p;
    child(*f.lhs, lparen);
    out += ' ';
    out += uni ? uop : aop;
    out += ' ';
    child(*f.rhs, rparen);
  };
  switch (f.kind) {
    case Formula::Kind::Atom:
      out += f.name;
      if (!f.args.empty()) {
        out += '(';
        for (size_t i = 0; i < f.args.size(); ++i) {
          if (i) out += ", ";
          render_term(f.args[i], out);
        }
        out += ')';
      }
      break;
    case Formula::Kind::Not:
      out += uni ? "¬" : "~";
      child(*f.lhs, prec(*f.lhs) < prec(f));
      break;
    case Formula::Kind::And: binary("∧", "&", false); break;
    case Formula::Kind::Or: binary("∨", "|", false); break;
    case Formula::Kind::Implies: binary("→", "->", true); break;
    case Formula::Kind::Iff: binary("↔", "<->", true); break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      if (uni) {
        out += f.kind == Formula::Kind::Forall ? "∀" : "∃";
        out += f.name;
      } else {
        out += f.kind == Formula::Kind::Forall ? "forall " : "exists ";
        out += f.name;
      }
      out += ' ';
      render_impl(*f.lhs, style, out);  // body never needs parens: maximal scope
      break;
    }
  }
}

}  // namespace detail

inline std::string render(const FormulaPtr& f, RenderStyle style = RenderStyle::Unicode) {
  std::string out;
  detail::render_impl(*f, style, out);
  return out;
}

inline std::string render(const Formula& f, RenderStyle style = RenderStyle::Unicode) {
  std::string out;
  detail::render_impl(f, style, out);
  return out;
}

}  // namespace foleval::fol

#endif  // FOLEVAL_FOL_RENDER_HPP
