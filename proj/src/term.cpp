#include "ppw/term.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace ppw {

namespace sym {
Symbol plus() { static const Symbol s("+"); return s; }
Symbol minus() { static const Symbol s("-"); return s; }
Symbol times() { static const Symbol s("*"); return s; }
Symbol true_() { static const Symbol s("true"); return s; }
Symbol false_() { static const Symbol s("false"); return s; }
Symbol poss() { static const Symbol s("poss"); return s; }
Symbol reward() { static const Symbol s("reward"); return s; }
Symbol between() { static const Symbol s("between"); return s; }
Symbol noop() { static const Symbol s("noop"); return s; }
}  // namespace sym

Term Term::variable(Symbol name, int slot) {
  Term t;
  t.kind_ = TermKind::Variable;
  t.sym_ = name;
  t.int_ = slot;
  return t;
}

Term Term::constant(Symbol name) {
  Term t;
  t.kind_ = TermKind::Constant;
  t.sym_ = name;
  return t;
}

Term Term::integer(std::int64_t value) {
  Term t;
  t.kind_ = TermKind::Integer;
  t.int_ = value;
  return t;
}

Term Term::real(double value) {
  Term t;
  t.kind_ = TermKind::Real;
  t.real_ = value;
  return t;
}

Term Term::boolean(bool value) { return constant(value ? sym::true_() : sym::false_()); }

Term Term::compound(Symbol functor, std::vector<Term> args) {
  Term t;
  t.kind_ = TermKind::Compound;
  t.sym_ = functor;
  t.args_ = std::move(args);
  return t;
}

Term Term::eval(Term inner) {
  Term t;
  t.kind_ = TermKind::Eval;
  t.args_.push_back(std::move(inner));
  return t;
}

bool Term::is_arithmetic() const {
  return kind_ == TermKind::Compound && args_.size() == 2 &&
         (sym_ == sym::plus() || sym_ == sym::minus() || sym_ == sym::times());
}

bool Term::is_ground() const {
  if (kind_ == TermKind::Variable) return false;
  for (const auto& a : args_) {
    if (!a.is_ground()) return false;
  }
  return true;
}

bool operator==(const Term& a, const Term& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case TermKind::Variable:
    case TermKind::Constant:
      return a.sym_ == b.sym_;
    case TermKind::Integer:
      return a.int_ == b.int_;
    case TermKind::Real:
      return a.real_ == b.real_;
    case TermKind::Compound:
      return a.sym_ == b.sym_ && a.args_ == b.args_;
    case TermKind::Eval:
      return a.args_ == b.args_;
  }
  return false;
}

bool same_value(const Term& a, const Term& b) {
  if (a.is_number() && b.is_number()) {
    if (a.kind() == TermKind::Integer && b.kind() == TermKind::Integer) return a.as_int() == b.as_int();
    return a.number() == b.number();
  }
  if (a.kind() != b.kind()) return false;
  if (a.kind() == TermKind::Compound) {
    if (a.name() != b.name() || a.args().size() != b.args().size()) return false;
    for (std::size_t i = 0; i < a.args().size(); ++i) {
      if (!same_value(a.args()[i], b.args()[i])) return false;
    }
    return true;
  }
  return a == b;
}

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_term(const Term& t) {
  std::size_t h = static_cast<std::size_t>(t.kind());
  switch (t.kind()) {
    case TermKind::Variable:
    case TermKind::Constant:
      return mix(h, t.name().id());
    case TermKind::Integer:
      return mix(h, static_cast<std::size_t>(t.as_int()));
    case TermKind::Real: {
      double v = t.as_real() == 0.0 ? 0.0 : t.as_real();
      return mix(h, std::bit_cast<std::uint64_t>(v));
    }
    case TermKind::Compound:
      h = mix(h, t.name().id());
      [[fallthrough]];
    case TermKind::Eval:
      for (const auto& a : t.args()) h = mix(h, hash_term(a));
      return h;
  }
  return h;
}

int precedence(const Term& t) {
  if (!t.is_arithmetic()) return 3;
  return t.name() == sym::times() ? 2 : 1;
}

void render(const Term& t, std::string& out, int min_prec, bool canon);

void render_real(double v, std::string& out, bool canon) {
  if (!canon) {
    out += format_real(v);
    return;
  }
  double rounded = std::round(v * 1e9) / 1e9;
  if (rounded == 0.0) rounded = 0.0;
  std::array<char, 64> buf{};
  int n = std::snprintf(buf.data(), buf.size(), "%.9f", rounded);
  out.append(buf.data(), static_cast<std::size_t>(n));
}

void render(const Term& t, std::string& out, int min_prec, bool canon) {
  switch (t.kind()) {
    case TermKind::Variable:
    case TermKind::Constant:
      out += t.name().str();
      return;
    case TermKind::Integer:
      out += std::to_string(t.as_int());
      return;
    case TermKind::Real:
      render_real(t.as_real(), out, canon);
      return;
    case TermKind::Eval:
      out += "~=(";
      render(t.inner(), out, 0, canon);
      out += ')';
      return;
    case TermKind::Compound:
      break;
  }
  if (t.is_arithmetic()) {
    int prec = precedence(t);
    bool parens = prec < min_prec;
    if (parens) out += '(';
    render(t.args()[0], out, prec, canon);
    out += ' ';
    out += t.name().str();
    out += ' ';
    render(t.args()[1], out, prec + 1, canon);
    if (parens) out += ')';
    return;
  }
  out += t.name().str();
  out += '(';
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    if (i > 0) out += canon ? "," : ", ";
    render(t.args()[i], out, 0, canon);
  }
  out += ')';
}

}  // namespace

std::size_t TermHash::operator()(const Term& t) const noexcept { return hash_term(t); }

PredKey pred_key(const Term& atom) {
  return PredKey{atom.name(), static_cast<std::uint32_t>(atom.arity())};
}

std::string to_string(const PredKey& key) {
  return std::string(key.name.str()) + "/" + std::to_string(key.arity);
}

std::string to_string(const Term& t) {
  std::string out;
  render(t, out, 0, false);
  return out;
}

std::string canonical(const Term& t) {
  std::string out;
  render(t, out, 0, true);
  return out;
}

std::string format_real(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  std::string s(buf.data(), end);
  if (s.find_first_of(".enai") == std::string::npos) s += ".0";
  return s;
}

}  // namespace ppw
