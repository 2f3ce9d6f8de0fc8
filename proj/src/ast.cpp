#include "ppw/ast.hpp"

namespace ppw {

std::string to_string(const Diagnostic& d) {
  return std::to_string(d.loc.line) + ":" + std::to_string(d.loc.column) + ": " +
         (d.severity == Severity::Error ? "error: " : "warning: ") + d.message;
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "=";
}

bool compare_numbers(CompareOp op, double lhs, double rhs) {
  switch (op) {
    case CompareOp::Eq: return lhs == rhs;
    case CompareOp::Ne: return lhs != rhs;
    case CompareOp::Lt: return lhs < rhs;
    case CompareOp::Le: return lhs <= rhs;
    case CompareOp::Gt: return lhs > rhs;
    case CompareOp::Ge: return lhs >= rhs;
  }
  return false;
}

std::string_view family_name(Distribution::Family f) {
  switch (f) {
    case Distribution::Family::Gaussian: return "gaussian";
    case Distribution::Family::Poisson: return "poisson";
    case Distribution::Family::Uniform: return "uniform";
    case Distribution::Family::Discrete: return "discrete";
    case Distribution::Family::Delta: return "delta";
  }
  return "delta";
}

std::optional<Distribution::Family> family_from_name(std::string_view name) {
  using F = Distribution::Family;
  if (name == "gaussian") return F::Gaussian;
  if (name == "poisson") return F::Poisson;
  if (name == "uniform") return F::Uniform;
  if (name == "discrete") return F::Discrete;
  if (name == "delta") return F::Delta;
  return std::nullopt;
}

std::size_t family_param_count(Distribution::Family f) {
  switch (f) {
    case Distribution::Family::Gaussian:
    case Distribution::Family::Uniform:
      return 2;
    case Distribution::Family::Poisson:
    case Distribution::Family::Delta:
      return 1;
    case Distribution::Family::Discrete:
      return 0;
  }
  return 0;
}

std::string_view sort_name(Sort s) {
  switch (s) {
    case Sort::Bool: return "bool";
    case Sort::Int: return "int";
    case Sort::Real: return "real";
    case Sort::Object: return "object";
  }
  return "bool";
}

Term substitute(const Term& t, Symbol var, const Term& value) {
  if (t.is_variable()) return t.name() == var ? value : t;
  if (t.is_compound()) {
    std::vector<Term> args;
    args.reserve(t.args().size());
    for (const auto& a : t.args()) args.push_back(substitute(a, var, value));
    return Term::compound(t.name(), std::move(args));
  }
  if (t.is_eval()) return Term::eval(substitute(t.inner(), var, value));
  return t;
}

Formula substitute(const Formula& f, Symbol var, const Term& value) {
  Formula out = f;
  switch (f.kind) {
    case Formula::Kind::Atom:
    case Formula::Kind::Compare:
      out.lhs = substitute(f.lhs, var, value);
      out.rhs = substitute(f.rhs, var, value);
      return out;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      if (f.var == var) return out;  // shadowed
      [[fallthrough]];
    default:
      for (auto& c : out.children) c = substitute(c, var, value);
      return out;
  }
}

ProgramExpr substitute(const ProgramExpr& p, Symbol var, const Term& value) {
  ProgramExpr out = p;
  out.action = substitute(p.action, var, value);
  out.condition = substitute(p.condition, var, value);
  if (p.kind == ProgramExpr::Kind::Pick && p.var == var) return out;
  for (auto& c : out.children) c = substitute(c, var, value);
  return out;
}

}  // namespace ppw
