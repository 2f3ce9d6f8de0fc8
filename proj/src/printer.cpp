#include "ppw/printer.hpp"

namespace ppw {
namespace {

int formula_prec(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Or: return 1;
    case Formula::Kind::And: return 2;
    case Formula::Kind::Not: return 3;
    default: return 4;  // quantifiers always print parenthesised
  }
}

void render(const Formula& f, std::string& out, int min_prec) {
  bool parens = formula_prec(f) < min_prec;
  if (parens) out += '(';
  switch (f.kind) {
    case Formula::Kind::True: out += "true"; break;
    case Formula::Kind::False: out += "false"; break;
    case Formula::Kind::Atom: out += to_string(f.lhs); break;
    case Formula::Kind::Compare:
      out += to_string(f.lhs);
      out += ' ';
      out += to_string(f.op);
      out += ' ';
      out += to_string(f.rhs);
      break;
    case Formula::Kind::Not:
      out += "not ";
      render(f.children[0], out, 3);
      break;
    case Formula::Kind::And:
      render(f.children[0], out, 3);
      out += " & ";
      render(f.children[1], out, 2);
      break;
    case Formula::Kind::Or:
      render(f.children[0], out, 2);
      out += " | ";
      render(f.children[1], out, 1);
      break;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      out += f.kind == Formula::Kind::Exists ? "(exists " : "(forall ";
      out += f.var.str();
      out += " . ";
      render(f.children[0], out, 0);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

int program_prec(const ProgramExpr& p) {
  switch (p.kind) {
    case ProgramExpr::Kind::Choice: return 1;
    case ProgramExpr::Kind::Seq: return 2;
    default: return 3;
  }
}

void render(const ProgramExpr& p, std::string& out, int min_prec);

void render_unit(const ProgramExpr& p, std::string& out) {
  if (program_prec(p) < 3) {
    out += '[';
    render(p, out, 0);
    out += ']';
  } else {
    render(p, out, 3);
  }
}

void render(const ProgramExpr& p, std::string& out, int min_prec) {
  if (program_prec(p) < min_prec) {
    render_unit(p, out);
    return;
  }
  switch (p.kind) {
    case ProgramExpr::Kind::Prim:
      out += "prim ";
      out += to_string(p.action);
      break;
    case ProgramExpr::Kind::Test:
      out += "?(";
      render(p.condition, out, 0);
      out += ')';
      break;
    case ProgramExpr::Kind::Seq:
      render(p.children[0], out, 3);
      out += "; ";
      render(p.children[1], out, 2);
      break;
    case ProgramExpr::Kind::Choice:
      render(p.children[0], out, 2);
      out += " | ";
      render(p.children[1], out, 1);
      break;
    case ProgramExpr::Kind::Pick:
      out += "pick ";
      out += p.var.str();
      out += " . ";
      render_unit(p.children[0], out);
      break;
    case ProgramExpr::Kind::Star:
      out += "star(";
      render(p.children[0], out, 0);
      out += ')';
      break;
    case ProgramExpr::Kind::While:
      out += "while (";
      render(p.condition, out, 0);
      out += ") ";
      render_unit(p.children[0], out);
      break;
    case ProgramExpr::Kind::If:
      out += "if (";
      render(p.condition, out, 0);
      out += ") then ";
      render_unit(p.children[0], out);
      out += " else ";
      render_unit(p.children[1], out);
      break;
  }
}

std::string join_terms(const std::vector<Term>& ts) {
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(ts[i]);
  }
  return out;
}

std::string distribution_args(const Distribution& d) {
  if (d.family != Distribution::Family::Discrete) return join_terms(d.params);
  std::string out;
  for (std::size_t i = 0; i < d.outcomes.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(d.outcomes[i].weight);
    out += ": ";
    out += to_string(d.outcomes[i].value);
  }
  return out;
}

void print_theory(const ActionTheory& th, std::string& out) {
  for (const auto& f : th.fluents) {
    out += "fluent " + std::string(f.name.str()) + "/" + std::to_string(f.arity) + " : " +
           std::string(sort_name(f.sort)) + ".\n";
  }
  for (const auto& s : th.ssas) {
    out += "ssa " + to_string(s.fluent) + " {";
    for (const auto& c : s.cases) out += " " + to_string(c.action) + " => " + to_string(c.effect) + ";";
    out += " }\n";
  }
  for (const auto& l : th.likelihoods) {
    out += "likelihood " + to_string(l.action) + " : " + std::string(family_name(l.density.family)) + "(" +
           std::string(l.target.str()) + "; " + distribution_args(l.density) + ").\n";
  }
  for (const auto& n : th.noisy) {
    out += "noisy " + std::string(n.action.str()) + "/" + std::to_string(n.arity) +
           " intended=" + std::to_string(n.intended) + " actual=" + std::to_string(n.actual) + ".\n";
  }
  if (!th.domain.empty()) {
    out += "domain {";
    for (std::size_t i = 0; i < th.domain.size(); ++i) {
      if (i > 0) out += ", ";
      out += th.domain[i].str();
    }
    out += "}.\n";
  }
  for (const auto& p : th.priors) {
    out += "prior {\n";
    for (const auto& c : p.clauses) out += "  " + to_string(c) + "\n";
    out += "}\n";
  }
}

}  // namespace

std::string to_string(const Literal& lit) {
  switch (lit.kind) {
    case Literal::Kind::Positive: return to_string(lit.atom);
    case Literal::Kind::Negative: return "not " + to_string(lit.atom);
    case Literal::Kind::Compare:
      return to_string(lit.atom) + " " + std::string(to_string(lit.op)) + " " + to_string(lit.rhs);
  }
  return {};
}

std::string to_string(const Distribution& d) {
  return std::string(family_name(d.family)) + "(" + distribution_args(d) + ")";
}

std::string to_string(const Clause& c) {
  std::string out;
  if (c.kind == Clause::Kind::ProbFact) out += format_real(c.prob) + "::";
  out += to_string(c.head);
  if (c.kind == Clause::Kind::Dist && c.dist) out += " ~ " + to_string(*c.dist);
  if (!c.body.empty()) {
    out += " <- ";
    for (std::size_t i = 0; i < c.body.size(); ++i) {
      if (i > 0) out += ", ";
      out += to_string(c.body[i]);
    }
  }
  out += '.';
  return out;
}

std::string to_string(const Formula& f) {
  std::string out;
  render(f, out, 0);
  return out;
}

std::string to_string(const ProgramExpr& p) {
  std::string out;
  render(p, out, 0);
  return out;
}

std::string pretty_print(const Program& program) {
  std::string out;
  for (const auto& c : program.clauses) out += to_string(c) + "\n";
  if (program.theory) {
    out += "#actions\n";
    print_theory(*program.theory, out);
  }
  if (program.control) {
    out += "#control\n";
    out += to_string(*program.control) + ".\n";
  }
  return out;
}

}  // namespace ppw
