#include "dal/parser.hpp"

#include <cctype>
#include <optional>

#include "dal/errors.hpp"

namespace dal {

namespace {

enum class Tok {
  Ident,
  Int,
  Rat,
  LParen,
  RParen,
  LBrack,
  RBrack,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Colon,
  Dot,
  Prime,
  Plus,
  PlusPlus,
  Minus,
  Star,
  Caret,
  Eq,
  EqEq,
  Neq,
  Lt,
  Leq,
  Gt,
  Geq,
  Bang,
  Amp,
  Bar,
  Arrow,
  Iff,
  Question,
  Assign,
  Turnstile,
  End,
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Rat: return "rational";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Prime: return "'''";
    case Tok::Plus: return "'+'";
    case Tok::PlusPlus: return "'++'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Caret: return "'^'";
    case Tok::Eq: return "'='";
    case Tok::EqEq: return "'=='";
    case Tok::Neq: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Leq: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Geq: return "'>='";
    case Tok::Bang: return "'!'";
    case Tok::Amp: return "'&'";
    case Tok::Bar: return "'|'";
    case Tok::Arrow: return "'->'";
    case Tok::Iff: return "'<->'";
    case Tok::Question: return "'?'";
    case Tok::Assign: return "':='";
    case Tok::Turnstile: return "'|-'";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
  bool adjacent = false;  // no whitespace between this and the previous token
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    bool adjacent = false;
    while (true) {
      adjacent = !skip_space() && !out.empty();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", line_, col_, adjacent});
        return out;
      }
      out.push_back(next(adjacent));
    }
  }

 private:
  bool skip_space() {
    bool skipped = false;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        skipped = true;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
        skipped = true;
      } else {
        break;
      }
    }
    return skipped;
  }

  void advance() {
    if (pos_ < src_.size() && src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  bool match_utf8(const char* bytes, std::size_t len) {
    if (src_.compare(pos_, len, bytes) != 0) return false;
    for (std::size_t i = 0; i < len; ++i) advance();
    return true;
  }

  Token next(bool adjacent) {
    int line = line_, col = col_;
    auto tok = [&](Tok k, std::string text) {
      return Token{k, std::move(text), line, col, adjacent};
    };
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        id += src_[pos_];
        advance();
      }
      return tok(Tok::Ident, id);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        num += src_[pos_];
        advance();
      }
      // Rational literal p/q, written without spaces.
      if (pos_ + 1 < src_.size() && src_[pos_] == '/' &&
          std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
        num += '/';
        advance();
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          num += src_[pos_];
          advance();
        }
        return tok(Tok::Rat, num);
      }
      return tok(Tok::Int, num);
    }
    // Unicode operator spellings.
    if (match_utf8("\xc2\xb7", 2)) return tok(Tok::Star, "*");         // ·
    if (match_utf8("\xe2\x80\xb2", 3)) return tok(Tok::Prime, "'");    // ′
    if (match_utf8("\xc2\xac", 2)) return tok(Tok::Bang, "!");         // ¬
    if (match_utf8("\xe2\x88\xa7", 3)) return tok(Tok::Amp, "&");      // ∧
    if (match_utf8("\xe2\x88\xa8", 3)) return tok(Tok::Bar, "|");      // ∨
    if (match_utf8("\xe2\x86\x92", 3)) return tok(Tok::Arrow, "->");   // →
    if (match_utf8("\xe2\x86\x94", 3)) return tok(Tok::Iff, "<->");    // ↔
    if (match_utf8("\xe2\x89\xa4", 3)) return tok(Tok::Leq, "<=");     // ≤
    if (match_utf8("\xe2\x89\xa5", 3)) return tok(Tok::Geq, ">=");     // ≥
    if (match_utf8("\xe2\x89\xa0", 3)) return tok(Tok::Neq, "!=");     // ≠

    auto two = [&](char a, char b) {
      return c == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
    };
    auto three = [&](const char* s) {
      return src_.compare(pos_, 3, s) == 0;
    };
    if (three("<->")) {
      advance(); advance(); advance();
      return tok(Tok::Iff, "<->");
    }
    if (two('<', '=')) { advance(); advance(); return tok(Tok::Leq, "<="); }
    if (two('>', '=')) { advance(); advance(); return tok(Tok::Geq, ">="); }
    if (two('-', '>')) { advance(); advance(); return tok(Tok::Arrow, "->"); }
    if (two('!', '=')) { advance(); advance(); return tok(Tok::Neq, "!="); }
    if (two('=', '=')) { advance(); advance(); return tok(Tok::EqEq, "=="); }
    if (two('+', '+')) { advance(); advance(); return tok(Tok::PlusPlus, "++"); }
    if (two(':', '=')) { advance(); advance(); return tok(Tok::Assign, ":="); }
    if (two('|', '-')) { advance(); advance(); return tok(Tok::Turnstile, "|-"); }
    advance();
    switch (c) {
      case '(': return tok(Tok::LParen, "(");
      case ')': return tok(Tok::RParen, ")");
      case '[': return tok(Tok::LBrack, "[");
      case ']': return tok(Tok::RBrack, "]");
      case '{': return tok(Tok::LBrace, "{");
      case '}': return tok(Tok::RBrace, "}");
      case ',': return tok(Tok::Comma, ",");
      case ';': return tok(Tok::Semi, ";");
      case ':': return tok(Tok::Colon, ":");
      case '.': return tok(Tok::Dot, ".");
      case '\'': return tok(Tok::Prime, "'");
      case '+': return tok(Tok::Plus, "+");
      case '-': return tok(Tok::Minus, "-");
      case '*': return tok(Tok::Star, "*");
      case '^': return tok(Tok::Caret, "^");
      case '=': return tok(Tok::Eq, "=");
      case '<': return tok(Tok::Lt, "<");
      case '>': return tok(Tok::Gt, ">");
      case '!': return tok(Tok::Bang, "!");
      case '&': return tok(Tok::Amp, "&");
      case '|': return tok(Tok::Bar, "|");
      case '?': return tok(Tok::Question, "?");
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(Lexer(text).run()) {}

  Term term() {
    Term t = parse_additive();
    expect(Tok::End);
    return t;
  }

  Formula formula() {
    Formula f = parse_formula();
    expect(Tok::End);
    return f;
  }

  Program program() {
    Program p = parse_program();
    expect(Tok::End);
    return p;
  }

  Sequent sequent() {
    Sequent s = parse_sequent();
    expect(Tok::End);
    return s;
  }

  Variable variable() {
    Variable v = parse_var_allow_prime();
    expect(Tok::End);
    return v;
  }

  VarTuple var_tuple() {
    VarTuple t = parse_bracket_tuple();
    expect(Tok::End);
    return t;
  }

  TermVec term_vec() {
    TermVec v = parse_bracket_terms();
    expect(Tok::End);
    return v;
  }

  std::vector<TermVec> term_matrix() {
    expect(Tok::LBrack);
    std::vector<TermVec> rows;
    if (!at(Tok::RBrack)) {
      rows.push_back(parse_bracket_terms());
      while (accept(Tok::Comma)) rows.push_back(parse_bracket_terms());
    }
    expect(Tok::RBrack);
    expect(Tok::End);
    return rows;
  }

  std::vector<SystemDecl> system_file() {
    std::vector<SystemDecl> out;
    while (!at(Tok::End)) out.push_back(parse_system());
    return out;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_ident(const char* word) const {
    return at(Tok::Ident) && cur().text == word;
  }

  Token advance() { return toks_[pos_++]; }

  bool accept(Tok k) {
    if (!at(k)) return false;
    ++pos_;
    return true;
  }

  Token expect(Tok k) {
    if (!at(k))
      throw SyntaxError(std::string("expected ") + tok_name(k) + ", found " +
                            tok_name(cur().kind) +
                            (cur().text.empty() ? "" : " '" + cur().text + "'"),
                        cur().line, cur().col);
    return advance();
  }

  [[noreturn]] void fail(const std::string& expected) {
    throw SyntaxError("expected " + expected + ", found " +
                          tok_name(cur().kind) +
                          (cur().text.empty() ? "" : " '" + cur().text + "'"),
                      cur().line, cur().col);
  }

  Variable parse_var_allow_prime() {
    Token id = expect(Tok::Ident);
    if (id.text == "forall" || id.text == "exists")
      throw SyntaxError("reserved word '" + id.text + "' used as variable",
                        id.line, id.col);
    bool primed = false;
    if (at(Tok::Prime) && cur().adjacent) {
      advance();
      primed = true;
    }
    return Variable(id.text, primed);
  }

  // --- terms ---------------------------------------------------------------

  Term parse_additive() {
    Term t = parse_multiplicative();
    while (true) {
      if (accept(Tok::Plus)) {
        t = Term::plus(t, parse_multiplicative());
      } else if (accept(Tok::Minus)) {
        t = Term::plus(t, Term::neg(parse_multiplicative()));
      } else {
        return t;
      }
    }
  }

  Term parse_multiplicative() {
    Term t = parse_unary();
    while (accept(Tok::Star)) t = Term::times(t, parse_unary());
    return t;
  }

  Term parse_unary() {
    if (accept(Tok::Minus)) {
      if (at(Tok::Int) || at(Tok::Rat)) {
        Token n = advance();
        Term lit = Term::constant(-Rational::from_string(n.text));
        return parse_postfix_ops(lit, false);
      }
      return Term::neg(parse_unary());
    }
    return parse_postfix();
  }

  Term parse_postfix() {
    bool parenthesized = false;
    Term t = parse_atom(parenthesized);
    return parse_postfix_ops(t, !parenthesized);
  }

  Term parse_postfix_ops(Term t, bool bare) {
    while (true) {
      if (at(Tok::Prime)) {
        advance();
        if (bare && t.kind() == TermKind::Var && !t.variable().primed) {
          t = Term::var(t.variable().prime());
        } else {
          t = Term::differential(t);
        }
        bare = false;
      } else if (at(Tok::Caret)) {
        Token caret = advance();
        if (!at(Tok::Int))
          throw SyntaxError("exponent must be a nonnegative integer literal",
                            caret.line, caret.col);
        Token n = advance();
        t = Term::pow(t, static_cast<unsigned>(std::stoul(n.text)));
        bare = false;
      } else {
        return t;
      }
    }
  }

  Term parse_atom(bool& parenthesized) {
    parenthesized = false;
    if (at(Tok::Int) || at(Tok::Rat)) {
      Token n = advance();
      return Term::constant(Rational::from_string(n.text));
    }
    if (at(Tok::Ident)) {
      Token id = advance();
      if (id.text == "forall" || id.text == "exists")
        throw SyntaxError("reserved word '" + id.text + "' in term", id.line,
                          id.col);
      return Term::var(Variable(id.text, false));
    }
    if (accept(Tok::LParen)) {
      Term t = parse_additive();
      expect(Tok::RParen);
      parenthesized = true;
      return t;
    }
    fail("a term");
  }

  // --- formulas ------------------------------------------------------------

  Formula parse_formula() { return parse_iff(); }

  Formula parse_iff() {
    Formula f = parse_imply();
    while (accept(Tok::Iff)) {
      Formula g = parse_imply();
      f = Formula::iff(f, g);
    }
    return f;
  }

  Formula parse_imply() {
    Formula f = parse_or();
    if (accept(Tok::Arrow)) return Formula::imply(f, parse_imply());
    return f;
  }

  Formula parse_or() {
    Formula f = parse_and();
    if (accept(Tok::Bar)) return Formula::or_(f, parse_or());
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary_formula();
    if (accept(Tok::Amp)) return Formula::and_(f, parse_and());
    return f;
  }

  Formula parse_unary_formula() {
    if (at_ident("forall") || at_ident("exists")) {
      bool universal = cur().text == "forall";
      advance();
      Variable v = parse_var_allow_prime();
      expect(Tok::Dot);
      Formula body = parse_formula();
      return universal ? Formula::forall(v, body) : Formula::exists(v, body);
    }
    if (accept(Tok::Bang)) return Formula::not_(parse_unary_formula());
    if (at(Tok::LBrack)) {
      advance();
      Program a = parse_program();
      expect(Tok::RBrack);
      Formula body = parse_unary_formula();
      return Formula::box(a, body);
    }
    return parse_atom_formula();
  }

  Formula parse_atom_formula() {
    // Refinement atoms start with a program; try that reading first.
    std::size_t save = pos_;
    try {
      Program a = parse_program();
      if (at(Tok::Leq) || at(Tok::EqEq)) {
        bool mutual = at(Tok::EqEq);
        advance();
        expect(Tok::LBrack);
        VarTuple xs = parse_tuple_inner();
        expect(Tok::RBrack);
        Program b = parse_program();
        return mutual ? Formula::mutual_refines(a, b, xs)
                      : Formula::refines_on(a, b, xs);
      }
    } catch (const SyntaxError&) {
    }
    pos_ = save;
    // Comparison between terms.
    try {
      Term lhs = parse_additive();
      if (accept(Tok::Leq)) return Formula::leq(lhs, parse_additive());
      if (accept(Tok::Lt)) return Formula::lt(lhs, parse_additive());
      if (accept(Tok::Geq)) return Formula::geq(lhs, parse_additive());
      if (accept(Tok::Gt)) return Formula::gt(lhs, parse_additive());
      if (accept(Tok::Eq)) return Formula::eq(lhs, parse_additive());
      if (accept(Tok::Neq)) return Formula::neq(lhs, parse_additive());
      fail("a comparison operator");
    } catch (const SyntaxError&) {
    }
    pos_ = save;
    if (accept(Tok::LParen)) {
      Formula f = parse_formula();
      expect(Tok::RParen);
      return f;
    }
    fail("a formula");
  }

  // --- programs ------------------------------------------------------------

  Program parse_program() { return parse_choice(); }

  Program parse_choice() {
    Program p = parse_seq();
    if (accept(Tok::PlusPlus)) return Program::choice(p, parse_choice());
    return p;
  }

  Program parse_seq() {
    Program p = parse_postfix_program();
    if (accept(Tok::Semi)) return Program::seq(p, parse_seq());
    return p;
  }

  Program parse_postfix_program() {
    Program p = parse_atom_program();
    while (at(Tok::Star)) {
      advance();
      p = Program::star(p);
    }
    return p;
  }

  Program parse_atom_program() {
    if (at(Tok::Ident)) {
      std::size_t save = pos_;
      Variable v(advance().text, false);
      if (accept(Tok::Assign)) return Program::assign(v, parse_additive());
      pos_ = save;
      fail("':=' after assignment target");
    }
    if (accept(Tok::Question)) return Program::test(parse_unary_formula());
    if (accept(Tok::LBrace)) {
      VarTuple xs = parse_tuple_inner();
      expect(Tok::Colon);
      Formula f = parse_formula();
      expect(Tok::RBrace);
      return Program::dap(xs, f);
    }
    if (accept(Tok::LParen)) {
      Program p = parse_program();
      expect(Tok::RParen);
      return p;
    }
    fail("a program");
  }

  VarTuple parse_tuple_inner() {
    std::vector<Variable> vars;
    if (at(Tok::Ident)) {
      vars.push_back(Variable(advance().text, false));
      while (accept(Tok::Comma)) vars.push_back(Variable(expect(Tok::Ident).text, false));
    }
    return VarTuple(std::move(vars));
  }

  VarTuple parse_bracket_tuple() {
    expect(Tok::LBrack);
    VarTuple t = parse_tuple_inner();
    expect(Tok::RBrack);
    return t;
  }

  TermVec parse_bracket_terms() {
    expect(Tok::LBrack);
    TermVec out;
    if (!at(Tok::RBrack)) {
      out.push_back(parse_additive());
      while (accept(Tok::Comma)) out.push_back(parse_additive());
    }
    expect(Tok::RBrack);
    return out;
  }

  Sequent parse_sequent() {
    Sequent s;
    if (!at(Tok::Turnstile)) {
      s.ante.push_back(parse_formula());
      while (accept(Tok::Comma)) s.ante.push_back(parse_formula());
    }
    expect(Tok::Turnstile);
    if (!at(Tok::End) && !at(Tok::RParen)) {
      s.succ.push_back(parse_formula());
      while (accept(Tok::Comma)) s.succ.push_back(parse_formula());
    }
    return s;
  }

  SystemDecl parse_system() {
    if (!at_ident("system")) fail("'system'");
    advance();
    SystemDecl decl;
    decl.name = expect(Tok::Ident).text;
    expect(Tok::LBrace);
    while (!accept(Tok::RBrace)) {
      if (at_ident("states")) {
        advance();
        decl.states.push_back(Variable(expect(Tok::Ident).text, false));
        while (accept(Tok::Comma))
          decl.states.push_back(Variable(expect(Tok::Ident).text, false));
        expect(Tok::Semi);
      } else if (at_ident("params")) {
        advance();
        decl.params.push_back(Variable(expect(Tok::Ident).text, false));
        while (accept(Tok::Comma))
          decl.params.push_back(Variable(expect(Tok::Ident).text, false));
        expect(Tok::Semi);
      } else if (at_ident("eq")) {
        advance();
        Term lhs = parse_additive();
        expect(Tok::Eq);
        Term rhs = parse_additive();
        expect(Tok::Semi);
        if (rhs.kind() == TermKind::Const && rhs.value().is_zero())
          decl.equations.push_back(lhs);
        else
          decl.equations.push_back(Term::minus(lhs, rhs));
      } else {
        fail("'states', 'params' or 'eq'");
      }
    }
    return decl;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Term parse_term(const std::string& text) { return Parser(text).term(); }
Formula parse_formula(const std::string& text) { return Parser(text).formula(); }
Program parse_program(const std::string& text) { return Parser(text).program(); }
Sequent parse_sequent(const std::string& text) { return Parser(text).sequent(); }
Variable parse_variable(const std::string& text) { return Parser(text).variable(); }
VarTuple parse_var_tuple(const std::string& text) { return Parser(text).var_tuple(); }
TermVec parse_term_vec(const std::string& text) { return Parser(text).term_vec(); }
std::vector<TermVec> parse_term_matrix(const std::string& text) {
  return Parser(text).term_matrix();
}
std::vector<SystemDecl> parse_system_file(const std::string& text) {
  return Parser(text).system_file();
}

}  // namespace dal
