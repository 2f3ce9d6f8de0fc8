#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ppw/term.hpp"

namespace ppw {

struct SourceLoc {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t offset = 0;

  // Locations are bookkeeping only; two nodes parsed from different text
  // are structurally equal regardless of where they came from.
  friend bool operator==(const SourceLoc&, const SourceLoc&) { return true; }
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceLoc loc;
};

std::string to_string(const Diagnostic& d);

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(CompareOp op);
bool compare_numbers(CompareOp op, double lhs, double rhs);

/// Body literal: a positive atom, a negated atom, or a comparison.
struct Literal {
  enum class Kind { Positive, Negative, Compare };

  Kind kind = Kind::Positive;
  Term atom;  // the atom, or the left operand of a comparison
  CompareOp op = CompareOp::Eq;
  Term rhs;
  SourceLoc loc;

  static Literal positive(Term atom) { return {Kind::Positive, std::move(atom), CompareOp::Eq, {}, {}}; }
  static Literal negative(Term atom) { return {Kind::Negative, std::move(atom), CompareOp::Eq, {}, {}}; }
  static Literal compare(Term lhs, CompareOp op, Term rhs) {
    return {Kind::Compare, std::move(lhs), op, std::move(rhs), {}};
  }

  friend bool operator==(const Literal&, const Literal&) = default;
};

struct WeightedOutcome {
  Term weight;
  Term value;

  friend bool operator==(const WeightedOutcome&, const WeightedOutcome&) = default;
};

/// Distribution with possibly non-ground parameters.
///   gaussian(mean, variance) | poisson(rate) | uniform(lo, hi)
///   discrete(w1:v1, ..., wn:vn) | delta(value)
struct Distribution {
  enum class Family { Gaussian, Poisson, Uniform, Discrete, Delta };

  Family family = Family::Delta;
  std::vector<Term> params;
  std::vector<WeightedOutcome> outcomes;  // Discrete only

  friend bool operator==(const Distribution&, const Distribution&) = default;
};

std::string_view family_name(Distribution::Family f);
std::optional<Distribution::Family> family_from_name(std::string_view name);
std::size_t family_param_count(Distribution::Family f);

struct Clause {
  enum class Kind { Rule, ProbFact, Dist };

  Kind kind = Kind::Rule;
  double prob = 1.0;  // ProbFact only
  Term head;
  std::optional<Distribution> dist;  // Dist only
  std::vector<Literal> body;
  SourceLoc loc;

  friend bool operator==(const Clause&, const Clause&) = default;
};

/// First-order formula used by queries, belief tests and control programs.
struct Formula {
  enum class Kind { True, False, Atom, Compare, Not, And, Or, Exists, Forall };

  Kind kind = Kind::True;
  Term lhs;  // the atom, or the left operand of a comparison
  CompareOp op = CompareOp::Eq;
  Term rhs;
  Symbol var;                     // quantified variable
  std::vector<Formula> children;  // Not: 1, And/Or: 2, quantifiers: 1

  static Formula truth(bool value) { return Formula{value ? Kind::True : Kind::False, {}, {}, {}, {}, {}}; }
  static Formula atom(Term a) { return Formula{Kind::Atom, std::move(a), {}, {}, {}, {}}; }
  static Formula compare(Term lhs, CompareOp op, Term rhs) {
    return Formula{Kind::Compare, std::move(lhs), op, std::move(rhs), {}, {}};
  }
  static Formula negation(Formula f) { return Formula{Kind::Not, {}, {}, {}, {}, {std::move(f)}}; }
  static Formula conjunction(Formula a, Formula b) {
    return Formula{Kind::And, {}, {}, {}, {}, {std::move(a), std::move(b)}};
  }
  static Formula disjunction(Formula a, Formula b) {
    return Formula{Kind::Or, {}, {}, {}, {}, {std::move(a), std::move(b)}};
  }
  static Formula exists(Symbol var, Formula body) {
    return Formula{Kind::Exists, {}, {}, {}, var, {std::move(body)}};
  }
  static Formula forall(Symbol var, Formula body) {
    return Formula{Kind::Forall, {}, {}, {}, var, {std::move(body)}};
  }

  friend bool operator==(const Formula&, const Formula&) = default;
};

/// Replaces free occurrences of `var` by `value`.
Term substitute(const Term& t, Symbol var, const Term& value);
Formula substitute(const Formula& f, Symbol var, const Term& value);

enum class Sort { Bool, Int, Real, Object };

std::string_view sort_name(Sort s);

struct FluentDecl {
  Symbol name;
  std::size_t arity = 0;
  Sort sort = Sort::Bool;
  SourceLoc loc;

  friend bool operator==(const FluentDecl&, const FluentDecl&) = default;
};

struct SsaCase {
  Term action;  // pattern
  Term effect;  // value expression over fluents and pattern variables

  friend bool operator==(const SsaCase&, const SsaCase&) = default;
};

/// Successor state axiom. Actions matching no case leave the fluent unchanged.
struct Ssa {
  Term fluent;  // e.g. pos(X)
  std::vector<SsaCase> cases;
  SourceLoc loc;

  friend bool operator==(const Ssa&, const Ssa&) = default;
};

/// l(action, s): density of the `target` argument of `action`.
struct LikelihoodModel {
  Term action;
  Symbol target;
  Distribution density;
  SourceLoc loc;

  friend bool operator==(const LikelihoodModel&, const LikelihoodModel&) = default;
};

/// Argument positions are 1-based, as written in the source.
struct NoisyDecl {
  Symbol action;
  std::size_t arity = 0;
  std::size_t intended = 0;
  std::size_t actual = 0;
  SourceLoc loc;

  friend bool operator==(const NoisyDecl&, const NoisyDecl&) = default;
};

/// One admissible initial distribution.
struct PriorSpec {
  std::vector<Clause> clauses;
  SourceLoc loc;

  friend bool operator==(const PriorSpec&, const PriorSpec&) = default;
};

struct ActionTheory {
  std::vector<FluentDecl> fluents;
  std::vector<Ssa> ssas;
  std::vector<LikelihoodModel> likelihoods;
  std::vector<NoisyDecl> noisy;
  std::vector<Symbol> domain;
  std::vector<PriorSpec> priors;

  friend bool operator==(const ActionTheory&, const ActionTheory&) = default;
};

/// GOLOG-style control program.
struct ProgramExpr {
  enum class Kind { Prim, Test, Seq, Choice, Pick, Star, While, If };

  Kind kind = Kind::Prim;
  Term action;        // Prim
  Formula condition;  // Test, While, If
  Symbol var;         // Pick
  std::vector<ProgramExpr> children;

  static ProgramExpr prim(Term action) { return {Kind::Prim, std::move(action), {}, {}, {}}; }
  static ProgramExpr test(Formula f) { return {Kind::Test, {}, std::move(f), {}, {}}; }
  static ProgramExpr seq(ProgramExpr a, ProgramExpr b) { return {Kind::Seq, {}, {}, {}, {std::move(a), std::move(b)}}; }
  static ProgramExpr choice(ProgramExpr a, ProgramExpr b) {
    return {Kind::Choice, {}, {}, {}, {std::move(a), std::move(b)}};
  }
  static ProgramExpr pick(Symbol var, ProgramExpr body) { return {Kind::Pick, {}, {}, var, {std::move(body)}}; }
  static ProgramExpr star(ProgramExpr body) { return {Kind::Star, {}, {}, {}, {std::move(body)}}; }
  static ProgramExpr loop(Formula cond, ProgramExpr body) {
    return {Kind::While, {}, std::move(cond), {}, {std::move(body)}};
  }
  static ProgramExpr branch(Formula cond, ProgramExpr then_part, ProgramExpr else_part) {
    return {Kind::If, {}, std::move(cond), {}, {std::move(then_part), std::move(else_part)}};
  }

  friend bool operator==(const ProgramExpr&, const ProgramExpr&) = default;
};

ProgramExpr substitute(const ProgramExpr& p, Symbol var, const Term& value);

/// A parsed `.dcl` document.
struct Program {
  std::vector<Clause> clauses;
  std::optional<ActionTheory> theory;
  std::optional<ProgramExpr> control;

  friend bool operator==(const Program&, const Program&) = default;
};

}  // namespace ppw
