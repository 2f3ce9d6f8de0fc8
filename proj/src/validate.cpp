#include "ppw/validate.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "ppw/analysis.hpp"

namespace ppw {
namespace {

std::optional<double> fold(const Term& t) {
  if (t.is_number()) return t.number();
  if (!t.is_arithmetic()) return std::nullopt;
  auto a = fold(t.args()[0]);
  auto b = fold(t.args()[1]);
  if (!a || !b) return std::nullopt;
  if (t.name() == sym::plus()) return *a + *b;
  if (t.name() == sym::minus()) return *a - *b;
  return *a * *b;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void collect_vars(const Term& t, std::set<Symbol>& out) {
  if (t.is_variable()) {
    out.insert(t.name());
    return;
  }
  for (const auto& a : t.args()) collect_vars(a, out);
}

class Validator {
 public:
  std::vector<Diagnostic> run(const Program& p) {
    check_clauses(p.clauses, "");
    if (p.theory) check_theory(*p.theory);
    if (p.control) {
      if (!p.theory) {
        error("control program requires an #actions section", {});
      } else {
        std::set<Symbol> scope;
        check_control(*p.control, *p.theory, scope);
      }
    }
    if (uses_quantifier_ && (!p.theory || p.theory->domain.empty())) {
      error("quantified formula requires a non-empty object domain", quantifier_loc_);
    }
    return std::move(diags_);
  }

 private:
  void error(std::string msg, SourceLoc loc) { diags_.push_back({Severity::Error, std::move(msg), loc}); }
  void warning(std::string msg, SourceLoc loc) { diags_.push_back({Severity::Warning, std::move(msg), loc}); }

  void check_clauses(const std::vector<Clause>& clauses, const std::string& where) {
    ProgramAnalysis analysis = analyze(clauses);
    for (auto d : analysis.diagnostics) {
      d.message = where + d.message;
      diags_.push_back(std::move(d));
    }
    std::map<Symbol, std::pair<std::size_t, SourceLoc>> arities;
    auto note_arity = [&](const Term& atom, SourceLoc loc) {
      auto [it, inserted] = arities.emplace(atom.name(), std::make_pair(atom.arity(), loc));
      if (!inserted && it->second.first != atom.arity()) {
        warning(where + "predicate '" + std::string(atom.name().str()) + "' used with arities " +
                    std::to_string(it->second.first) + " and " + std::to_string(atom.arity()),
                loc);
        it->second.first = atom.arity();
      }
    };
    for (const auto& c : clauses) {
      check_reserved(c.head, c.loc);
      note_arity(c.head, c.loc);
      if (c.kind == Clause::Kind::ProbFact && !(c.prob >= 0.0 && c.prob <= 1.0)) {
        error(where + "probability out of range [0,1]: " + format_real(c.prob), c.loc);
      }
      if (c.dist) check_distribution(*c.dist, c.loc, where);
      std::set<Symbol> bound;
      for (const auto& lit : c.body) {
        if (lit.kind == Literal::Kind::Positive) {
          check_reserved(lit.atom, lit.loc);
          note_arity(lit.atom, lit.loc);
          collect_vars(lit.atom, bound);
        } else if (lit.kind == Literal::Kind::Negative) {
          check_reserved(lit.atom, lit.loc);
          note_arity(lit.atom, lit.loc);
        } else if (lit.op == CompareOp::Eq) {
          collect_vars(lit.atom, bound);
          collect_vars(lit.rhs, bound);
        }
      }
      for (const auto& lit : c.body) {
        if (lit.kind == Literal::Kind::Positive || (lit.kind == Literal::Kind::Compare && lit.op == CompareOp::Eq)) {
          continue;
        }
        std::set<Symbol> used;
        collect_vars(lit.atom, used);
        collect_vars(lit.rhs, used);
        for (Symbol v : used) {
          if (!bound.count(v)) {
            error(where + "variable " + std::string(v.str()) + " in '" + literal_text(lit) +
                      "' is not bound by a positive body literal",
                  lit.loc);
          }
        }
      }
      std::set<Symbol> head_vars;
      collect_vars(c.head, head_vars);
      for (Symbol v : head_vars) {
        if (!bound.count(v)) {
          error(where + "head variable " + std::string(v.str()) + " does not occur in the body", c.loc);
        }
      }
      if (c.dist) {
        std::set<Symbol> param_vars;
        for (const auto& t : c.dist->params) collect_vars(t, param_vars);
        for (const auto& o : c.dist->outcomes) {
          collect_vars(o.weight, param_vars);
          collect_vars(o.value, param_vars);
        }
        for (Symbol v : param_vars) {
          if (!bound.count(v)) {
            error(where + "distribution parameter variable " + std::string(v.str()) + " is not bound by the body",
                  c.loc);
          }
        }
      }
    }
  }

  static std::string literal_text(const Literal& lit) {
    std::string s = lit.kind == Literal::Kind::Negative ? "not " + to_string(lit.atom) : to_string(lit.atom);
    if (lit.kind == Literal::Kind::Compare) s += " " + std::string(to_string(lit.op)) + " " + to_string(lit.rhs);
    return s;
  }

  void check_reserved(const Term& atom, SourceLoc loc) {
    if (atom.name() == sym::poss() && atom.arity() != 2) {
      error("poss requires time argument: expected poss(Action, T), found arity " + std::to_string(atom.arity()),
            loc);
    }
    if (atom.name() == sym::reward() && atom.arity() != 2) {
      error("reward requires (value, time) arguments, found arity " + std::to_string(atom.arity()), loc);
    }
  }

  void check_distribution(const Distribution& d, SourceLoc loc, const std::string& where) {
    using F = Distribution::Family;
    switch (d.family) {
      case F::Gaussian:
        if (auto v = fold(d.params[1]); v && !(*v > 0.0)) {
          error(where + "gaussian variance must be positive, got " + short_number(*v), loc);
        }
        break;
      case F::Poisson:
        if (auto v = fold(d.params[0]); v && !(*v > 0.0)) {
          error(where + "poisson rate must be positive, got " + short_number(*v), loc);
        }
        break;
      case F::Uniform: {
        auto lo = fold(d.params[0]);
        auto hi = fold(d.params[1]);
        if (lo && hi && !(*lo < *hi)) error(where + "uniform bounds must satisfy lo < hi", loc);
        break;
      }
      case F::Discrete: {
        double total = 0.0;
        bool ground = true;
        for (const auto& o : d.outcomes) {
          auto w = fold(o.weight);
          if (!w) {
            ground = false;
            continue;
          }
          if (*w < 0.0) error(where + "discrete weight " + short_number(*w) + " is negative", loc);
          total += *w;
        }
        if (ground && std::abs(total - 1.0) > 1e-9) {
          error(where + "discrete weights sum to " + short_number(total), loc);
        }
        break;
      }
      case F::Delta:
        break;
    }
  }

  void check_theory(const ActionTheory& th) {
    std::map<PredKey, const FluentDecl*> fluents;
    for (const auto& f : th.fluents) {
      if (!fluents.emplace(PredKey{f.name, static_cast<std::uint32_t>(f.arity)}, &f).second) {
        error("fluent " + std::string(f.name.str()) + "/" + std::to_string(f.arity) + " declared twice", f.loc);
      }
    }
    std::set<PredKey> with_ssa;
    for (const auto& s : th.ssas) {
      PredKey k = pred_key(s.fluent);
      with_ssa.insert(k);
      if (!fluents.count(k)) error("successor state axiom for undeclared fluent " + to_string(k), s.loc);
      std::set<Symbol> head_vars;
      for (const auto& a : s.fluent.args()) {
        if (!a.is_variable() || !head_vars.insert(a.name()).second) {
          error("SSA head " + to_string(s.fluent) + " must have distinct variable arguments", s.loc);
          break;
        }
      }
      for (const auto& c : s.cases) {
        std::set<Symbol> pattern_vars = head_vars;
        collect_vars(c.action, pattern_vars);
        std::set<Symbol> effect_vars;
        collect_vars(c.effect, effect_vars);
        for (Symbol v : effect_vars) {
          if (!pattern_vars.count(v)) {
            error("effect variable " + std::string(v.str()) + " of " + to_string(c.action) +
                      " is not bound by the fluent or action pattern",
                  s.loc);
          }
        }
      }
    }
    for (const auto& [k, f] : fluents) {
      if (!with_ssa.count(k)) error("fluent " + to_string(k) + " has no successor state axiom", f->loc);
    }
    std::map<PredKey, const LikelihoodModel*> likelihoods;
    for (const auto& l : th.likelihoods) {
      PredKey k = pred_key(l.action);
      if (!likelihoods.emplace(k, &l).second) error("more than one likelihood for action " + to_string(k), l.loc);
      bool found = false;
      for (const auto& a : l.action.args()) found |= a.is_variable() && a.name() == l.target;
      if (!found) {
        error("observed variable " + std::string(l.target.str()) + " is not an argument of " + to_string(l.action),
              l.loc);
      }
      check_distribution(l.density, l.loc, "");
    }
    std::set<PredKey> noisy_keys;
    for (const auto& n : th.noisy) {
      PredKey k{n.action, static_cast<std::uint32_t>(n.arity)};
      if (!noisy_keys.insert(k).second) error("action " + to_string(k) + " declared noisy twice", n.loc);
      if (n.intended < 1 || n.intended > n.arity || n.actual < 1 || n.actual > n.arity || n.intended == n.actual) {
        error("noisy " + to_string(k) + ": intended and actual must be distinct positions in 1.." +
                  std::to_string(n.arity),
              n.loc);
        continue;
      }
      auto it = likelihoods.find(k);
      if (it == likelihoods.end()) {
        error("noisy action " + to_string(k) + " has no likelihood", n.loc);
        continue;
      }
      const Term& arg = it->second->action.args()[n.actual - 1];
      if (!arg.is_variable() || arg.name() != it->second->target) {
        error("likelihood of " + to_string(k) + " must observe the actual argument (position " +
                  std::to_string(n.actual) + ")",
              it->second->loc);
      }
    }
    std::set<Symbol> objects;
    for (Symbol o : th.domain) {
      if (!objects.insert(o).second) error("object " + std::string(o.str()) + " listed twice in domain", {});
    }
    for (std::size_t i = 0; i < th.priors.size(); ++i) {
      check_clauses(th.priors[i].clauses, "prior " + std::to_string(i) + ": ");
    }
  }

  void check_formula(const Formula& f, std::set<Symbol>& scope, SourceLoc loc) {
    switch (f.kind) {
      case Formula::Kind::Exists:
      case Formula::Kind::Forall: {
        if (!uses_quantifier_) quantifier_loc_ = loc;
        uses_quantifier_ = true;
        bool fresh = scope.insert(f.var).second;
        check_formula(f.children[0], scope, loc);
        if (fresh) scope.erase(f.var);
        return;
      }
      case Formula::Kind::Atom:
      case Formula::Kind::Compare: {
        std::set<Symbol> vars;
        collect_vars(f.lhs, vars);
        collect_vars(f.rhs, vars);
        for (Symbol v : vars) {
          if (!scope.count(v)) error("free variable " + std::string(v.str()) + " in formula", loc);
        }
        return;
      }
      default:
        for (const auto& c : f.children) check_formula(c, scope, loc);
    }
  }

  void check_control(const ProgramExpr& p, const ActionTheory& th, std::set<Symbol>& scope) {
    switch (p.kind) {
      case ProgramExpr::Kind::Prim: {
        std::set<Symbol> vars;
        collect_vars(p.action, vars);
        for (Symbol v : vars) {
          if (!scope.count(v)) error("free variable " + std::string(v.str()) + " in " + to_string(p.action), {});
        }
        for (const auto& n : th.noisy) {
          if (p.action.name() != n.action) continue;
          for (std::size_t i = 0; i < p.action.args().size(); ++i) {
            const Term& a = p.action.args()[i];
            if (a.is_variable() && scope.count(a.name()) && (i + 1 == n.intended || i + 1 == n.actual)) {
              error("pick ranges over domain objects and cannot choose the real-valued argument " +
                        std::string(a.name().str()) + " of " + to_string(p.action),
                    {});
            }
          }
        }
        return;
      }
      case ProgramExpr::Kind::Test:
      case ProgramExpr::Kind::While:
      case ProgramExpr::Kind::If:
        check_formula(p.condition, scope, {});
        break;
      case ProgramExpr::Kind::Pick:
        if (scope.count(p.var)) {
          error("pick variable " + std::string(p.var.str()) + " shadows an enclosing binding", {});
          check_control(p.children[0], th, scope);
          return;
        }
        scope.insert(p.var);
        check_control(p.children[0], th, scope);
        scope.erase(p.var);
        return;
      default:
        break;
    }
    for (const auto& c : p.children) check_control(c, th, scope);
  }

  std::vector<Diagnostic> diags_;
  bool uses_quantifier_ = false;
  SourceLoc quantifier_loc_;
};

}  // namespace

std::vector<Diagnostic> validate(const Program& program) { return Validator().run(program); }

bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags) {
    if (d.severity == Severity::Error) return true;
  }
  return false;
}

}  // namespace ppw
