#include "ppw/parser.hpp"

#include <set>
#include <string>

#include "ppw/lexer.hpp"

namespace ppw {
namespace {

struct SyntaxError {
  Diagnostic diag;
};

bool is_compare(Tok t) {
  switch (t) {
    case Tok::Eq:
    case Tok::Ne:
    case Tok::Lt:
    case Tok::Le:
    case Tok::Gt:
    case Tok::Ge:
      return true;
    default:
      return false;
  }
}

CompareOp to_op(Tok t) {
  switch (t) {
    case Tok::Ne: return CompareOp::Ne;
    case Tok::Lt: return CompareOp::Lt;
    case Tok::Le: return CompareOp::Le;
    case Tok::Gt: return CompareOp::Gt;
    case Tok::Ge: return CompareOp::Ge;
    default: return CompareOp::Eq;
  }
}

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  if (t.kind == Tok::Directive) return "'#" + t.text + "'";
  return "'" + t.text + "'";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program program() {
    Program prog;
    enum class Mode { Clauses, Actions, Control } mode = Mode::Clauses;
    while (peek().kind != Tok::End) {
      if (peek().kind == Tok::Directive) {
        const Token& d = next();
        if (d.text == "clauses") {
          mode = Mode::Clauses;
        } else if (d.text == "actions") {
          mode = Mode::Actions;
          if (!prog.theory) prog.theory.emplace();
        } else if (d.text == "control") {
          mode = Mode::Control;
        } else {
          diags_.push_back({Severity::Error, "unknown directive '#" + d.text + "'", d.loc});
        }
        continue;
      }
      try {
        switch (mode) {
          case Mode::Clauses:
            prog.clauses.push_back(clause());
            break;
          case Mode::Actions:
            action_item(*prog.theory);
            break;
          case Mode::Control: {
            SourceLoc loc = peek().loc;
            ProgramExpr p = control();
            accept(Tok::Dot);
            if (prog.control) {
              diags_.push_back({Severity::Error, "more than one control program", loc});
            } else {
              prog.control = std::move(p);
            }
            if (peek().kind != Tok::End && peek().kind != Tok::Directive) {
              fail("expected end of control program, found " + describe(peek()));
            }
            break;
          }
        }
      } catch (const SyntaxError& e) {
        diags_.push_back(e.diag);
        if (mode == Mode::Control) return prog;
        recover();
      }
    }
    return prog;
  }

  Formula standalone_formula() {
    Formula f = formula();
    accept(Tok::Dot);
    expect(Tok::End, "end of formula");
    return f;
  }

  Term standalone_term() {
    Term t = term();
    accept(Tok::Dot);
    expect(Tok::End, "end of term");
    return t;
  }

  std::vector<Diagnostic>& diagnostics() { return diags_; }

 private:
  // --- token helpers -------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    next();
    return true;
  }
  bool at_name(std::string_view word) const { return peek().kind == Tok::Name && peek().text == word; }
  const Token& expect(Tok kind, std::string_view what) {
    if (peek().kind != kind) fail("expected " + std::string(what) + ", found " + describe(peek()));
    return next();
  }
  void expect_name(std::string_view word) {
    if (!at_name(word)) fail("expected '" + std::string(word) + "', found " + describe(peek()));
    next();
  }
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError{{Severity::Error, msg, peek().loc}}; }
  [[noreturn]] void fail_at(const std::string& msg, SourceLoc loc) const {
    throw SyntaxError{{Severity::Error, msg, loc}};
  }

  void recover() {
    int depth = 0;
    while (peek().kind != Tok::End && peek().kind != Tok::Directive) {
      Tok k = next().kind;
      if (k == Tok::LBrace) ++depth;
      if (k == Tok::RBrace && --depth <= 0) return;
      if (k == Tok::Dot && depth == 0) return;
    }
  }

  Symbol variable_name(const Token& t) {
    if (t.text == "_") return Symbol("_G" + std::to_string(++anon_));
    return Symbol(t.text);
  }

  // --- terms ---------------------------------------------------------------

  Term term() { return additive(); }

  Term additive() {
    Term lhs = multiplicative();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      Symbol op = next().kind == Tok::Plus ? sym::plus() : sym::minus();
      Term rhs = multiplicative();
      lhs = Term::compound(op, {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  Term multiplicative() {
    Term lhs = unary();
    while (accept(Tok::Star)) {
      Term rhs = unary();
      lhs = Term::compound(sym::times(), {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  Term unary() {
    if (accept(Tok::Plus)) return unary();
    if (accept(Tok::Minus)) {
      Term operand = unary();
      if (operand.kind() == TermKind::Integer) return Term::integer(-operand.as_int());
      if (operand.kind() == TermKind::Real) return Term::real(-operand.as_real());
      return Term::compound(sym::minus(), {Term::integer(0), std::move(operand)});
    }
    return primary();
  }

  Term primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int:
        next();
        return Term::integer(t.int_value);
      case Tok::Real:
        next();
        return Term::real(t.real_value);
      case Tok::Var:
        return Term::variable(variable_name(next()));
      case Tok::Name: {
        Symbol name(next().text);
        if (!accept(Tok::LParen)) return Term::constant(name);
        std::vector<Term> args = term_list(Tok::RParen);
        return Term::compound(name, std::move(args));
      }
      case Tok::EvalOp: {
        next();
        expect(Tok::LParen, "'(' after '~='");
        Term inner = term();
        if (!inner.is_callable() || inner.is_arithmetic()) fail("'~=' expects a random-variable term");
        expect(Tok::RParen, "')'");
        return Term::eval(std::move(inner));
      }
      case Tok::LParen: {
        next();
        Term inner = term();
        expect(Tok::RParen, "')'");
        return inner;
      }
      default:
        fail("expected a term, found " + describe(t));
    }
  }

  std::vector<Term> term_list(Tok close) {
    std::vector<Term> args;
    if (peek().kind == close) fail("empty argument list");
    do {
      args.push_back(term());
    } while (accept(Tok::Comma));
    expect(close, close == Tok::RParen ? "')'" : "closing bracket");
    return args;
  }

  Term callable(std::string_view role) {
    SourceLoc loc = peek().loc;
    Term t = term();
    if (!t.is_callable() || t.is_arithmetic()) fail_at("expected " + std::string(role), loc);
    return t;
  }

  // --- clauses -------------------------------------------------------------

  Clause clause() {
    Clause c;
    c.loc = peek().loc;
    if ((peek().kind == Tok::Int || peek().kind == Tok::Real) && peek(1).kind == Tok::ColonColon) {
      const Token& p = next();
      next();
      c.kind = Clause::Kind::ProbFact;
      c.prob = p.kind == Tok::Int ? static_cast<double>(p.int_value) : p.real_value;
      if (!(c.prob >= 0.0 && c.prob <= 1.0)) {
        diags_.push_back({Severity::Error, "probability out of range [0,1]: " + p.text, p.loc});
      }
    }
    c.head = callable("a clause head");
    if (c.kind != Clause::Kind::ProbFact && accept(Tok::Tilde)) {
      c.kind = Clause::Kind::Dist;
      c.dist = distribution();
    }
    if (accept(Tok::Arrow)) c.body = body();
    expect(Tok::Dot, "'.' at end of clause");
    return c;
  }

  std::vector<Literal> body() {
    std::vector<Literal> lits;
    do {
      lits.push_back(literal());
    } while (accept(Tok::Comma));
    return lits;
  }

  Literal literal() {
    SourceLoc loc = peek().loc;
    Literal lit;
    if (at_name("not") || peek().kind == Tok::NotOp) {
      next();
      lit = Literal::negative(callable("an atom after 'not'"));
    } else {
      Term lhs = term();
      if (is_compare(peek().kind)) {
        CompareOp op = to_op(next().kind);
        lit = Literal::compare(std::move(lhs), op, term());
      } else {
        if (!lhs.is_callable() || lhs.is_arithmetic()) fail_at("expected an atom or comparison", loc);
        lit = Literal::positive(std::move(lhs));
      }
    }
    lit.loc = loc;
    return lit;
  }

  Distribution distribution() {
    SourceLoc loc = peek().loc;
    const Token& name = expect(Tok::Name, "a distribution name");
    auto family = family_from_name(name.text);
    if (!family) fail_at("unknown distribution '" + name.text + "'", loc);
    expect(Tok::LParen, "'('");
    Distribution d = distribution_args(*family, loc);
    expect(Tok::RParen, "')'");
    return d;
  }

  Distribution distribution_args(Distribution::Family family, SourceLoc loc) {
    Distribution d;
    d.family = family;
    if (family == Distribution::Family::Discrete) {
      do {
        Term w = term();
        expect(Tok::Colon, "':' between weight and value");
        Term v = term();
        d.outcomes.push_back({std::move(w), std::move(v)});
      } while (accept(Tok::Comma));
      return d;
    }
    do {
      d.params.push_back(term());
    } while (accept(Tok::Comma));
    if (d.params.size() != family_param_count(family)) {
      fail_at(std::string(family_name(family)) + " expects " + std::to_string(family_param_count(family)) +
                  " parameter(s)",
              loc);
    }
    return d;
  }

  // --- action theory -------------------------------------------------------

  void action_item(ActionTheory& th) {
    SourceLoc loc = peek().loc;
    if (peek().kind != Tok::Name) fail("expected an action-theory declaration, found " + describe(peek()));
    std::string word = peek().text;
    if (word == "fluent") {
      next();
      FluentDecl f;
      f.loc = loc;
      f.name = Symbol(expect(Tok::Name, "a fluent name").text);
      expect(Tok::Slash, "'/'");
      f.arity = arity_literal();
      expect(Tok::Colon, "':'");
      const Token& s = expect(Tok::Name, "a sort (bool, int, real, object)");
      if (s.text == "bool") f.sort = Sort::Bool;
      else if (s.text == "int") f.sort = Sort::Int;
      else if (s.text == "real") f.sort = Sort::Real;
      else if (s.text == "object") f.sort = Sort::Object;
      else fail_at("unknown sort '" + s.text + "'", s.loc);
      expect(Tok::Dot, "'.'");
      th.fluents.push_back(f);
    } else if (word == "ssa") {
      next();
      Ssa ssa;
      ssa.loc = loc;
      ssa.fluent = callable("a fluent term");
      expect(Tok::LBrace, "'{'");
      while (!accept(Tok::RBrace)) {
        SsaCase c;
        c.action = callable("an action pattern");
        expect(Tok::FatArrow, "'=>'");
        c.effect = term();
        expect(Tok::Semi, "';'");
        ssa.cases.push_back(std::move(c));
      }
      PredKey key = pred_key(ssa.fluent);
      if (!ssa_keys_.insert(key).second) {
        diags_.push_back({Severity::Error, "duplicate SSA for fluent " + to_string(key), loc});
      }
      th.ssas.push_back(std::move(ssa));
    } else if (word == "likelihood") {
      next();
      LikelihoodModel l;
      l.loc = loc;
      l.action = callable("an action pattern");
      expect(Tok::Colon, "':'");
      SourceLoc dloc = peek().loc;
      const Token& name = expect(Tok::Name, "a distribution name");
      auto family = family_from_name(name.text);
      if (!family) fail_at("unknown distribution '" + name.text + "'", dloc);
      expect(Tok::LParen, "'('");
      l.target = variable_name(expect(Tok::Var, "the observed variable"));
      expect(Tok::Semi, "';' after the observed variable");
      l.density = distribution_args(*family, dloc);
      expect(Tok::RParen, "')'");
      expect(Tok::Dot, "'.'");
      th.likelihoods.push_back(std::move(l));
    } else if (word == "noisy") {
      next();
      NoisyDecl n;
      n.loc = loc;
      n.action = Symbol(expect(Tok::Name, "an action name").text);
      expect(Tok::Slash, "'/'");
      n.arity = arity_literal();
      expect_name("intended");
      expect(Tok::Eq, "'='");
      n.intended = arity_literal();
      expect_name("actual");
      expect(Tok::Eq, "'='");
      n.actual = arity_literal();
      expect(Tok::Dot, "'.'");
      th.noisy.push_back(n);
    } else if (word == "domain") {
      next();
      expect(Tok::LBrace, "'{'");
      if (!accept(Tok::RBrace)) {
        do {
          th.domain.emplace_back(expect(Tok::Name, "an object name").text);
        } while (accept(Tok::Comma));
        expect(Tok::RBrace, "'}'");
      }
      accept(Tok::Dot);
    } else if (word == "prior") {
      next();
      PriorSpec p;
      p.loc = loc;
      expect(Tok::LBrace, "'{'");
      while (!accept(Tok::RBrace)) {
        if (peek().kind == Tok::End || peek().kind == Tok::Directive) fail("unterminated prior block");
        p.clauses.push_back(clause());
      }
      th.priors.push_back(std::move(p));
    } else {
      fail("unknown action-theory declaration '" + word + "'");
    }
  }

  std::size_t arity_literal() {
    const Token& t = expect(Tok::Int, "an integer");
    if (t.int_value < 0) fail_at("expected a non-negative integer", t.loc);
    return static_cast<std::size_t>(t.int_value);
  }

  // --- formulas ------------------------------------------------------------

  Formula formula() {
    Formula lhs = conjunction();
    if (accept(Tok::Bar)) return Formula::disjunction(std::move(lhs), formula());
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = unary_formula();
    if (accept(Tok::Amp) || accept(Tok::Comma)) return Formula::conjunction(std::move(lhs), conjunction());
    return lhs;
  }

  Formula unary_formula() {
    if (at_name("not") || peek().kind == Tok::NotOp) {
      next();
      return Formula::negation(unary_formula());
    }
    if (at_name("exists") || at_name("forall")) {
      bool exists = next().text == "exists";
      Symbol var = variable_name(expect(Tok::Var, "a quantified variable"));
      expect(Tok::Dot, "'.' after the quantified variable");
      Formula body = formula();
      return exists ? Formula::exists(var, std::move(body)) : Formula::forall(var, std::move(body));
    }
    if (peek().kind == Tok::LParen) {
      // Either a parenthesised formula or a parenthesised arithmetic operand.
      std::size_t save = pos_;
      std::size_t diag_count = diags_.size();
      try {
        next();
        Formula inner = formula();
        expect(Tok::RParen, "')'");
        Tok k = peek().kind;
        if (!is_compare(k) && k != Tok::Plus && k != Tok::Minus && k != Tok::Star) return inner;
      } catch (const SyntaxError&) {
      }
      pos_ = save;
      diags_.resize(diag_count);
    }
    return atomic_formula();
  }

  Formula atomic_formula() {
    SourceLoc loc = peek().loc;
    Term lhs = term();
    if (is_compare(peek().kind)) {
      CompareOp op = to_op(next().kind);
      return Formula::compare(std::move(lhs), op, term());
    }
    if (lhs.is_constant() && lhs.name() == sym::true_()) return Formula::truth(true);
    if (lhs.is_constant() && lhs.name() == sym::false_()) return Formula::truth(false);
    if (!lhs.is_callable() || lhs.is_arithmetic()) fail_at("expected an atom or comparison", loc);
    return Formula::atom(std::move(lhs));
  }

  // --- control programs ----------------------------------------------------

  ProgramExpr control() {
    ProgramExpr lhs = sequence();
    if (accept(Tok::Bar)) return ProgramExpr::choice(std::move(lhs), control());
    return lhs;
  }

  ProgramExpr sequence() {
    ProgramExpr lhs = control_unit();
    if (accept(Tok::Semi)) return ProgramExpr::seq(std::move(lhs), sequence());
    return lhs;
  }

  ProgramExpr control_unit() {
    if (accept(Tok::Question)) {
      expect(Tok::LParen, "'(' after '?'");
      Formula f = formula();
      expect(Tok::RParen, "')'");
      return ProgramExpr::test(std::move(f));
    }
    if (accept(Tok::LParen)) {
      ProgramExpr p = control();
      expect(Tok::RParen, "')'");
      return p;
    }
    if (accept(Tok::LBracket)) {
      ProgramExpr p = control();
      expect(Tok::RBracket, "']'");
      return p;
    }
    if (at_name("prim")) {
      next();
      SourceLoc loc = peek().loc;
      Term a = term();
      if (!(a.is_variable() || (a.is_callable() && !a.is_arithmetic()))) fail_at("expected an action term", loc);
      return ProgramExpr::prim(std::move(a));
    }
    if (at_name("pick")) {
      next();
      Symbol var = variable_name(expect(Tok::Var, "a variable after 'pick'"));
      expect(Tok::Dot, "'.' after the pick variable");
      return ProgramExpr::pick(var, control_unit());
    }
    if (at_name("star")) {
      next();
      expect(Tok::LParen, "'(' after 'star'");
      ProgramExpr body = control();
      expect(Tok::RParen, "')'");
      return ProgramExpr::star(std::move(body));
    }
    if (at_name("while")) {
      next();
      expect(Tok::LParen, "'(' after 'while'");
      Formula f = formula();
      expect(Tok::RParen, "')'");
      return ProgramExpr::loop(std::move(f), control_unit());
    }
    if (at_name("if")) {
      next();
      expect(Tok::LParen, "'(' after 'if'");
      Formula f = formula();
      expect(Tok::RParen, "')'");
      expect_name("then");
      ProgramExpr a = control_unit();
      expect_name("else");
      ProgramExpr b = control_unit();
      return ProgramExpr::branch(std::move(f), std::move(a), std::move(b));
    }
    fail("expected a program construct (prim, ?, pick, star, while, if), found " + describe(peek()));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic> diags_;
  std::set<PredKey> ssa_keys_;
  int anon_ = 0;
};

template <typename T, typename Fn>
Parsed<T> run_parser(std::string_view text, Fn&& fn) {
  LexResult lexed = lex(text);
  if (!lexed.diagnostics.empty()) return lexed.diagnostics;
  Parser p(std::move(lexed.tokens));
  try {
    T value = fn(p);
    if (!p.diagnostics().empty()) return p.diagnostics();
    return value;
  } catch (const SyntaxError& e) {
    p.diagnostics().push_back(e.diag);
    return p.diagnostics();
  }
}

}  // namespace

Parsed<Program> parse_program(std::string_view text) {
  return run_parser<Program>(text, [](Parser& p) { return p.program(); });
}

Parsed<Formula> parse_formula(std::string_view text) {
  return run_parser<Formula>(text, [](Parser& p) { return p.standalone_formula(); });
}

Parsed<Term> parse_term(std::string_view text) {
  return run_parser<Term>(text, [](Parser& p) { return p.standalone_term(); });
}

}  // namespace ppw
