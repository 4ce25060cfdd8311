#ifndef FOLEVAL_FOL_PARSER_HPP
#define FOLEVAL_FOL_PARSER_HPP

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "foleval/errors.hpp"
#include "foleval/fol/ast.hpp"
#include "foleval/text.hpp"

namespace foleval::fol {

// Concrete syntax:
//   connectives  ∀ ∃ ∧ ∨ ¬ → ↔   with ASCII aliases forall exists & | ~ -> <->
//   precedence   ¬ > ∧ > ∨ > → > ↔ ; → and ↔ right-associative, ∧ ∨ left
//   quantifier scope extends maximally rightward; parentheses override
//   identifiers  letter (letter | digit | '_')* ; non-Latin letters allowed

namespace detail {

enum class Tok {
  LParen,
  RParen,
  Comma,
  Ident,
  Forall,
  Exists,
  Not,
  And,
  Or,
  Implies,
  Iff,
  End,
};

struct Token {
  Tok kind;
  std::string value;  // Ident only
  size_t offset;      // byte offset in the (normalized) input
};

inline bool ident_start(char32_t cp) { return text::is_letter(cp); }
inline bool ident_cont(char32_t cp) {
  return text::is_letter(cp) || text::is_ascii_digit(cp) || cp == U'_';
}

class Lexer {
 public:
  explicit Lexer(std::string input) : input_(std::move(input)) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (true) {
      skip_space();
      size_t start = pos_;
      if (pos_ >= input_.size()) {
        tokens.push_back({Tok::End, "", start});
        break;
      }
      char32_t cp = peek();
      switch (cp) {
        case U'(': advance(); tokens.push_back({Tok::LParen, "", start}); continue;
        case U')': advance(); tokens.push_back({Tok::RParen, "", start}); continue;
        case U',': advance(); tokens.push_back({Tok::Comma, "", start}); continue;
        case 0x2200: advance(); tokens.push_back({Tok::Forall, "", start}); continue;
        case 0x2203: advance(); tokens.push_back({Tok::Exists, "", start}); continue;
        case 0x2227: advance(); tokens.push_back({Tok::And, "", start}); continue;
        case 0x2228: advance(); tokens.push_back({Tok::Or, "", start}); continue;
        case 0xAC: advance(); tokens.push_back({Tok::Not, "", start}); continue;
        case 0x2192: advance(); tokens.push_back({Tok::Implies, "", start}); continue;
        case 0x2194: advance(); tokens.push_back({Tok::Iff, "", start}); continue;
        case U'&': advance(); tokens.push_back({Tok::And, "", start}); continue;
        case U'|': advance(); tokens.push_back({Tok::Or, "", start}); continue;
        case U'~': advance(); tokens.push_back({Tok::Not, "", start}); continue;
        case U'<':
          advance();
          if (peek() == U'-') {
            advance();
            if (peek() == U'>') {
              advance();
              tokens.push_back({Tok::Iff, "", start});
              continue;
            }
          }
          throw Error(Errc::lex_error, "unknown symbol '<' at offset " + std::to_string(start));
        case U'-':
          advance();
          if (peek() == U'>') {
            advance();
            tokens.push_back({Tok::Implies, "", start});
            continue;
          }
          throw Error(Errc::lex_error, "unknown symbol '-' at offset " + std::to_string(start));
        default:
          break;
      }
      if (ident_start(cp)) {
        std::string word;
        while (pos_ < input_.size() && ident_cont(peek())) {
          text::append_utf8(word, peek());
          advance();
        }
        if (word == "forall") {
          tokens.push_back({Tok::Forall, "", start});
        } else if (word == "exists") {
          tokens.push_back({Tok::Exists, "", start});
        } else {
          tokens.push_back({Tok::Ident, std::move(word), start});
        }
        continue;
      }
      std::string sym;
      text::append_utf8(sym, cp);
      throw Error(Errc::lex_error,
                  "unknown symbol '" + sym + "' at offset " + std::to_string(start));
    }
    return tokens;
  }

 private:
  char32_t peek() {
    if (pos_ >= input_.size()) return 0;
    size_t p = pos_;
    return decode_at(p);
  }
  void advance() {
    if (pos_ < input_.size()) decode_at(pos_);
  }
  // decodes the codepoint at p, advancing p past it
  char32_t decode_at(size_t& p) {
    unsigned char c = static_cast<unsigned char>(input_[p]);
    size_t len = 1;
    char32_t cp = c;
    if (c >= 0xF0) { len = 4; cp = c & 0x07; }
    else if (c >= 0xE0) { len = 3; cp = c & 0x0F; }
    else if (c >= 0xC0) { len = 2; cp = c & 0x1F; }
    for (size_t k = 1; k < len && p + k < input_.size(); ++k)
      cp = (cp << 6) | (static_cast<unsigned char>(input_[p + k]) & 0x3F);
    p += len;
    return cp;
  }
  void skip_space() {
    while (pos_ < input_.size()) {
      unsigned char c = static_cast<unsigned char>(input_[pos_]);
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string input_;
  size_t pos_ = 0;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const Signature* sig)
      : tokens_(std::move(tokens)), sig_(sig) {}

  FormulaPtr parse_formula() {
    FormulaPtr f = parse_iff();
    expect(Tok::End, "trailing input");
    return f;
  }

 private:
  FormulaPtr parse_iff() {
    FormulaPtr l = parse_implies();
    if (cur().kind == Tok::Iff) {
      next();
      return Formula::iff(std::move(l), parse_iff());  // right-assoc
    }
    return l;
  }

  FormulaPtr parse_implies() {
    FormulaPtr l = parse_or();
    if (cur().kind == Tok::Implies) {
      next();
      return Formula::implies(std::move(l), parse_implies());  // right-assoc
    }
    return l;
  }

  FormulaPtr parse_or() {
    FormulaPtr l = parse_and();
    while (cur().kind == Tok::Or) {
      next();
      l = Formula::disjunction(std::move(l), parse_and());
    }
    return l;
  }

  FormulaPtr parse_and() {
    FormulaPtr l = parse_unary();
    while (cur().kind == Tok::And) {
      next();
      l = Formula::conjunction(std::move(l), parse_unary());
    }
    return l;
  }

  FormulaPtr parse_unary() {
    switch (cur().kind) {
      case Tok::Not:
        next();
        return Formula::negation(parse_unary());
      case Tok::Forall:
      case Tok::Exists: {
        Formula::Kind k =
            cur().kind == Tok::Forall ? Formula::Kind::Forall : Formula::Kind::Exists;
        next();
        Token v = expect(Tok::Ident, "quantified variable name");
        // maximal rightward scope: the body is a full formula
        return Formula::quantifier(k, v.value, parse_iff());
      }
      default:
        return parse_primary();
    }
  }

  FormulaPtr parse_primary() {
    if (cur().kind == Tok::LParen) {
      size_t open = cur().offset;
      next();
      FormulaPtr f = parse_iff();
      if (cur().kind != Tok::RParen) {
        throw Error(Errc::syntax_error,
                    "unbalanced paren at offset " + std::to_string(cur().offset) +
                        " (opened at " + std::to_string(open) + ")");
      }
      next();
      return f;
    }
    Token name = expect(Tok::Ident, "atom");
    std::vector<Term> args;
    if (cur().kind == Tok::LParen) {
      size_t open = cur().offset;
      next();
      args.push_back(parse_term());
      while (cur().kind == Tok::Comma) {
        next();
        args.push_back(parse_term());
      }
      if (cur().kind != Tok::RParen) {
        throw Error(Errc::syntax_error,
                    "unbalanced paren at offset " + std::to_string(cur().offset) +
                        " (opened at " + std::to_string(open) + ")");
      }
      next();
    }
    if (sig_ && !sig_->check_predicate(name.value, args.size())) {
      throw Error(Errc::arity_error,
                  "predicate '" + name.value + "' used with arity " +
                      std::to_string(args.size()));
    }
    return Formula::atom(name.value, std::move(args));
  }

  Term parse_term() {
    Token name = expect(Tok::Ident, "term");
    bool lower = !name.value.empty() && name.value[0] >= 'a' && name.value[0] <= 'z';
    if (cur().kind == Tok::LParen) {
      if (lower) {
        throw Error(Errc::syntax_error,
                    "variable '" + name.value + "' cannot take arguments (offset " +
                        std::to_string(name.offset) + ")");
      }
      size_t open = cur().offset;
      next();
      std::vector<Term> args;
      args.push_back(parse_term());
      while (cur().kind == Tok::Comma) {
        next();
        args.push_back(parse_term());
      }
      if (cur().kind != Tok::RParen) {
        throw Error(Errc::syntax_error,
                    "unbalanced paren at offset " + std::to_string(cur().offset) +
                        " (opened at " + std::to_string(open) + ")");
      }
      next();
      if (sig_ && !sig_->check_function(name.value, args.size())) {
        throw Error(Errc::arity_error,
                    "function '" + name.value + "' used with arity " +
                        std::to_string(args.size()));
      }
      return Term::func(name.value, std::move(args));
    }
    return lower ? Term::var(name.value) : Term::constant(name.value);
  }

  const Token& cur() const { return tokens_[idx_]; }
  void next() {
    if (idx_ + 1 < tokens_.size()) ++idx_;
  }
  Token expect(Tok kind, const char* what) {
    if (cur().kind != kind) {
      throw Error(Errc::syntax_error, "expected " + std::string(what) + " at offset " +
                                          std::to_string(cur().offset));
    }
    Token t = cur();
    next();
    return t;
  }

  std::vector<Token> tokens_;
  size_t idx_ = 0;
  const Signature* sig_;
};

}  // namespace detail

inline FormulaPtr parse(std::string_view input, const Signature* sig = nullptr) {
  std::string normalized = text::nfc(input);
  if (text::trim(normalized).empty()) {
    throw Error(Errc::syntax_error, "empty input");
  }
  detail::Lexer lexer(std::move(normalized));
  detail::Parser parser(lexer.run(), sig);
  return parser.parse_formula();
}

}  // namespace foleval::fol

#endif  // FOLEVAL_FOL_PARSER_HPP
