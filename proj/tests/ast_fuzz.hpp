#pragma once

// Random well-formed documents for parse/print round trips.

#include <random>
#include <string>
#include <vector>

#include "ppw/ast.hpp"

namespace ppw::test {

class AstFuzzer {
 public:
  explicit AstFuzzer(std::uint64_t seed, int max_depth = 6) : rng_(seed), max_depth_(max_depth) {}

  Program program() {
    Program p;
    int n = uniform(0, 5);
    for (int i = 0; i < n; ++i) p.clauses.push_back(clause());
    if (chance(0.5)) p.theory = theory();
    if (chance(0.5)) p.control = control(0);
    return p;
  }

  Term term(int depth) {
    int pick = depth >= max_depth_ ? uniform(0, 3) : uniform(0, 7);
    switch (pick) {
      case 0:
        return Term::variable(Symbol(one_of(vars_)));
      case 1:
        return Term::constant(one_of(names_));
      case 2:
        return Term::integer(uniform(-20, 20));
      case 3:
        return Term::real(uniform(-40, 40) / 8.0);
      case 4:
      case 5:
        return arithmetic(depth);
      case 6:
        return Term::eval(atom(depth + 1));
      default:
        return atom(depth + 1);
    }
  }

  Term arithmetic(int depth) {
    static const char* ops[] = {"+", "-", "*"};
    return Term::compound(ops[uniform(0, 2)], {term(depth + 1), term(depth + 1)});
  }

  Term atom(int depth) {
    if (depth >= max_depth_ || chance(0.3)) return Term::constant(one_of(names_));
    std::vector<Term> args;
    int n = uniform(1, 3);
    for (int i = 0; i < n; ++i) args.push_back(term(depth + 1));
    return Term::compound(one_of(names_), std::move(args));
  }

  Formula formula(int depth) {
    int pick = depth >= max_depth_ ? uniform(0, 2) : uniform(0, 8);
    switch (pick) {
      case 0:
        return Formula::atom(atom(depth + 1));
      case 1:
        return Formula::compare(term(depth + 1), op(), term(depth + 1));
      case 2:
        return Formula::truth(chance(0.5));
      case 3:
        return Formula::negation(formula(depth + 1));
      case 4:
        return Formula::conjunction(formula(depth + 1), formula(depth + 1));
      case 5:
        return Formula::disjunction(formula(depth + 1), formula(depth + 1));
      case 6:
        return Formula::exists(Symbol(one_of(vars_)), formula(depth + 1));
      case 7:
        return Formula::forall(Symbol(one_of(vars_)), formula(depth + 1));
      default:
        return Formula::atom(atom(depth + 1));
    }
  }

  ProgramExpr control(int depth) {
    int pick = depth >= max_depth_ ? uniform(0, 1) : uniform(0, 7);
    switch (pick) {
      case 0:
        return ProgramExpr::prim(chance(0.2) ? Term::variable(Symbol(one_of(vars_))) : atom(depth + 1));
      case 1:
        return ProgramExpr::test(formula(depth + 1));
      case 2:
        return ProgramExpr::seq(control(depth + 1), control(depth + 1));
      case 3:
        return ProgramExpr::choice(control(depth + 1), control(depth + 1));
      case 4:
        return ProgramExpr::pick(Symbol(one_of(vars_)), control(depth + 1));
      case 5:
        return ProgramExpr::star(control(depth + 1));
      case 6:
        return ProgramExpr::loop(formula(depth + 1), control(depth + 1));
      default:
        return ProgramExpr::branch(formula(depth + 1), control(depth + 1), control(depth + 1));
    }
  }

 private:
  Clause clause() {
    Clause c;
    c.head = atom(1);
    int kind = uniform(0, 2);
    if (kind == 1) {
      c.kind = Clause::Kind::ProbFact;
      c.prob = one_of(std::vector<double>{0.1, 0.25, 0.5, 0.6, 0.875, 1.0});
    } else if (kind == 2) {
      c.kind = Clause::Kind::Dist;
      c.dist = distribution();
    }
    int n = uniform(0, 3);
    for (int i = 0; i < n; ++i) c.body.push_back(literal());
    return c;
  }

  Literal literal() {
    switch (uniform(0, 2)) {
      case 0:
        return Literal::positive(atom(1));
      case 1:
        return Literal::negative(atom(1));
      default:
        return Literal::compare(term(1), op(), term(1));
    }
  }

  Distribution distribution() {
    Distribution d;
    d.family = static_cast<Distribution::Family>(uniform(0, 4));
    if (d.family == Distribution::Family::Discrete) {
      int n = uniform(1, 3);
      for (int i = 0; i < n; ++i) d.outcomes.push_back({Term::real(uniform(1, 8) / 8.0), term(2)});
      return d;
    }
    for (std::size_t i = 0; i < family_param_count(d.family); ++i) d.params.push_back(term(2));
    return d;
  }

  ActionTheory theory() {
    ActionTheory th;
    std::vector<std::string> fluents{"pos", "onTable", "holding", "level"};
    int nf = uniform(0, 3);
    for (int i = 0; i < nf; ++i) {
      FluentDecl f;
      f.name = Symbol(fluents[static_cast<std::size_t>(i)]);
      f.arity = static_cast<std::size_t>(uniform(0, 2));
      f.sort = static_cast<Sort>(uniform(0, 3));
      th.fluents.push_back(f);
      if (chance(0.7)) {
        Ssa s;
        s.fluent = f.arity == 0 ? Term::constant(f.name) : Term::compound(f.name, vars(f.arity));
        int nc = uniform(0, 2);
        for (int k = 0; k < nc; ++k) s.cases.push_back({atom(2), term(2)});
        th.ssas.push_back(std::move(s));
      }
    }
    if (chance(0.5)) {
      LikelihoodModel l;
      l.action = Term::compound(one_of(actions_), vars(2));
      l.target = Symbol("Y");
      l.density.family = chance(0.5) ? Distribution::Family::Gaussian : Distribution::Family::Uniform;
      for (std::size_t i = 0; i < 2; ++i) l.density.params.push_back(term(3));
      th.likelihoods.push_back(std::move(l));
    }
    if (chance(0.5)) th.noisy.push_back({Symbol(one_of(actions_)), 3, 2, 3, {}});
    int nd = uniform(0, 3);
    for (int i = 0; i < nd; ++i) th.domain.emplace_back(names_[static_cast<std::size_t>(i)]);
    int np = uniform(0, 2);
    for (int i = 0; i < np; ++i) {
      PriorSpec p;
      int nc = uniform(0, 2);
      for (int k = 0; k < nc; ++k) p.clauses.push_back(clause());
      th.priors.push_back(std::move(p));
    }
    return th;
  }

  std::vector<Term> vars(std::size_t n) {
    std::vector<Term> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(Term::variable(Symbol(vars_[i])));
    return out;
  }

  CompareOp op() { return static_cast<CompareOp>(uniform(0, 5)); }

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <typename T>
  T one_of(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }

  std::mt19937_64 rng_;
  int max_depth_;
  std::vector<std::string> names_{"a", "b", "c", "room", "box7", "f", "g", "move", "obs"};
  std::vector<std::string> vars_{"X", "Y", "Z", "Obj", "T"};
  std::vector<std::string> actions_{"move", "push", "look"};
};

}  // namespace ppw::test
