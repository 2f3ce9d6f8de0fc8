#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ppw/ast.hpp"

namespace ppw {

enum class Tok {
  End,
  Name,       // lowercase-initial identifier
  Var,        // uppercase- or underscore-initial identifier
  Int,
  Real,
  Directive,  // #clauses, #actions, #control
  LParen, RParen, LBracket, RBracket, LBrace, RBrace,
  Comma, Dot, Semi, Colon, ColonColon,
  Tilde,      // ~
  EvalOp,     // ~=
  Arrow,      // <- or :-
  FatArrow,   // =>
  Eq, Ne, Lt, Le, Gt, Ge,
  Plus, Minus, Star, Slash,
  Question, Bar, Amp,
  NotOp,      // \+
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLoc loc;
  std::int64_t int_value = 0;
  double real_value = 0.0;
};

struct LexResult {
  std::vector<Token> tokens;  // always terminated by Tok::End
  std::vector<Diagnostic> diagnostics;
};

/// Splits `text` into tokens. `%` starts a line comment. A `.` directly
/// followed by a digit starts a number unless it closes a term (so `a.6`
/// is `a`, `.`, `6` while `.6::a.` is a probability).
LexResult lex(std::string_view text);

}  // namespace ppw
