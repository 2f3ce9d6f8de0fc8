#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ppw/symbol.hpp"

namespace ppw {

enum class TermKind : std::uint8_t { Variable, Constant, Integer, Real, Compound, Eval };

/// A first-order term of the clause language. Arithmetic (`+`, `-`, `*`)
/// is represented as binary compounds; `~=(t)` is an Eval term naming the
/// value of the random variable `t`.
class Term {
 public:
  Term() = default;  // the integer 0

  static Term variable(Symbol name, int slot = -1);
  static Term constant(Symbol name);
  static Term constant(std::string_view name) { return constant(Symbol(name)); }
  static Term integer(std::int64_t value);
  static Term real(double value);
  static Term boolean(bool value);
  static Term compound(Symbol functor, std::vector<Term> args);
  static Term compound(std::string_view functor, std::vector<Term> args) {
    return compound(Symbol(functor), std::move(args));
  }
  static Term eval(Term inner);

  TermKind kind() const { return kind_; }
  bool is_variable() const { return kind_ == TermKind::Variable; }
  bool is_constant() const { return kind_ == TermKind::Constant; }
  bool is_compound() const { return kind_ == TermKind::Compound; }
  bool is_eval() const { return kind_ == TermKind::Eval; }
  bool is_number() const { return kind_ == TermKind::Integer || kind_ == TermKind::Real; }
  /// Constant or compound: something that can name a predicate or rv.
  bool is_callable() const { return kind_ == TermKind::Constant || kind_ == TermKind::Compound; }
  /// Binary compound with functor +, - or *.
  bool is_arithmetic() const;

  /// Variable name, constant spelling, or compound functor.
  Symbol name() const { return sym_; }
  /// Slot index assigned to a variable by clause compilation; -1 otherwise.
  int slot() const { return static_cast<int>(int_); }
  std::int64_t as_int() const { return int_; }
  double as_real() const { return real_; }
  /// Numeric value of an Integer or Real term.
  double number() const { return kind_ == TermKind::Integer ? static_cast<double>(int_) : real_; }

  const std::vector<Term>& args() const { return args_; }
  std::vector<Term>& args() { return args_; }
  std::size_t arity() const { return kind_ == TermKind::Compound ? args_.size() : 0; }
  const Term& inner() const { return args_.front(); }

  bool is_ground() const;

  /// Structural equality. Variables compare by name, numbers by kind and value.
  friend bool operator==(const Term& a, const Term& b);

 private:
  TermKind kind_ = TermKind::Integer;
  Symbol sym_;
  std::int64_t int_ = 0;
  double real_ = 0.0;
  std::vector<Term> args_;
};

/// Equality used by matching and comparison: numbers compare numerically
/// across Integer/Real, everything else structurally.
bool same_value(const Term& a, const Term& b);

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept;
};

/// Predicate identity: functor and arity.
struct PredKey {
  Symbol name;
  std::uint32_t arity = 0;

  friend bool operator==(const PredKey&, const PredKey&) = default;
  friend auto operator<=>(const PredKey&, const PredKey&) = default;
};

/// Key of a constant or compound term. Undefined for other kinds.
PredKey pred_key(const Term& atom);
std::string to_string(const PredKey& key);

/// Surface syntax of a term; re-parses to an equal term.
std::string to_string(const Term& t);

/// Shortest round-trip decimal form that always reads back as a real.
std::string format_real(double value);

/// Canonical serialization for hashing and ordering: like to_string but
/// reals are rounded to 1e-9 and printed at fixed precision.
std::string canonical(const Term& t);

/// Frequently used symbols.
namespace sym {
Symbol plus();
Symbol minus();
Symbol times();
Symbol true_();
Symbol false_();
Symbol poss();
Symbol reward();
Symbol between();
Symbol noop();
}  // namespace sym

}  // namespace ppw

template <>
struct std::hash<ppw::PredKey> {
  std::size_t operator()(const ppw::PredKey& k) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{k.name.id()} << 8) ^ k.arity);
  }
};
