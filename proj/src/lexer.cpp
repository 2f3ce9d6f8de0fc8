#include "ppw/lexer.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace ppw {
namespace {

bool ends_term(Tok t) {
  switch (t) {
    case Tok::Name:
    case Tok::Var:
    case Tok::Int:
    case Tok::Real:
    case Tok::RParen:
    case Tok::RBracket:
      return true;
    default:
      return false;
  }
}

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  LexResult run() {
    LexResult out;
    while (true) {
      skip_space_and_comments();
      SourceLoc start = here();
      if (pos_ >= text_.size()) {
        out.tokens.push_back(Token{Tok::End, "", start, 0, 0.0});
        break;
      }
      char c = text_[pos_];
      Token tok;
      tok.loc = start;
      if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
        std::size_t b = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance();
        tok.text = std::string(text_.substr(b, pos_ - b));
        tok.kind = (std::isupper(static_cast<unsigned char>(c)) != 0 || c == '_') ? Tok::Var : Tok::Name;
      } else if (is_digit(c) ||
                 (c == '.' && pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1]) &&
                  (out.tokens.empty() || !ends_term(out.tokens.back().kind)))) {
        if (!lex_number(tok, out.diagnostics)) continue;
      } else if (c == '#') {
        advance();
        std::size_t b = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance();
        tok.kind = Tok::Directive;
        tok.text = std::string(text_.substr(b, pos_ - b));
        if (tok.text.empty()) {
          out.diagnostics.push_back({Severity::Error, "expected directive name after '#'", start});
          continue;
        }
      } else if (!lex_operator(tok)) {
        out.diagnostics.push_back(
            {Severity::Error, std::string("unexpected character '") + c + "'", start});
        advance();
        continue;
      }
      out.tokens.push_back(std::move(tok));
    }
    return out;
  }

 private:
  SourceLoc here() const { return SourceLoc{line_, column_, pos_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) != 0) {
        advance();
      } else if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  bool lex_number(Token& tok, std::vector<Diagnostic>& diags) {
    std::size_t b = pos_;
    bool is_real = false;
    while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
    if (pos_ + 1 < text_.size() && text_[pos_] == '.' && is_digit(text_[pos_ + 1])) {
      is_real = true;
      advance();
      while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && is_digit(text_[look])) {
        is_real = true;
        while (pos_ < look) advance();
        while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
      }
    }
    tok.text = std::string(text_.substr(b, pos_ - b));
    if (is_real) {
      tok.kind = Tok::Real;
      tok.real_value = std::strtod(tok.text.c_str(), nullptr);
      return true;
    }
    tok.kind = Tok::Int;
    auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.int_value);
    if (ec != std::errc()) {
      diags.push_back({Severity::Error, "integer literal out of range: " + tok.text, tok.loc});
      return false;
    }
    return true;
  }

  bool lex_operator(Token& tok) {
    char c = text_[pos_];
    char n = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
    auto emit = [&](Tok kind, std::size_t len) {
      tok.kind = kind;
      tok.text = std::string(text_.substr(pos_, len));
      for (std::size_t i = 0; i < len; ++i) advance();
      return true;
    };
    switch (c) {
      case '(': return emit(Tok::LParen, 1);
      case ')': return emit(Tok::RParen, 1);
      case '[': return emit(Tok::LBracket, 1);
      case ']': return emit(Tok::RBracket, 1);
      case '{': return emit(Tok::LBrace, 1);
      case '}': return emit(Tok::RBrace, 1);
      case ',': return emit(Tok::Comma, 1);
      case '.': return emit(Tok::Dot, 1);
      case ';': return emit(Tok::Semi, 1);
      case '+': return emit(Tok::Plus, 1);
      case '-': return emit(Tok::Minus, 1);
      case '*': return emit(Tok::Star, 1);
      case '/': return emit(Tok::Slash, 1);
      case '?': return emit(Tok::Question, 1);
      case '|': return emit(Tok::Bar, 1);
      case '&': return emit(Tok::Amp, 1);
      case ':':
        if (n == ':') return emit(Tok::ColonColon, 2);
        if (n == '-') return emit(Tok::Arrow, 2);
        return emit(Tok::Colon, 1);
      case '~':
        if (n == '=') return emit(Tok::EvalOp, 2);
        return emit(Tok::Tilde, 1);
      case '<':
        if (n == '-') return emit(Tok::Arrow, 2);
        if (n == '=') return emit(Tok::Le, 2);
        return emit(Tok::Lt, 1);
      case '>':
        if (n == '=') return emit(Tok::Ge, 2);
        return emit(Tok::Gt, 1);
      case '=':
        if (n == '>') return emit(Tok::FatArrow, 2);
        if (n == '<') return emit(Tok::Le, 2);
        return emit(Tok::Eq, 1);
      case '!':
        if (n == '=') return emit(Tok::Ne, 2);
        return false;
      case '\\':
        if (n == '=') return emit(Tok::Ne, 2);
        if (n == '+') return emit(Tok::NotOp, 2);
        return false;
      default:
        return false;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

}  // namespace

LexResult lex(std::string_view text) { return Lexer(text).run(); }

}  // namespace ppw
