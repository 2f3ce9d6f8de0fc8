#include "ppw/belief.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ppw/distribution.hpp"
#include "ppw/error.hpp"
#include "ppw/printer.hpp"

namespace ppw {
namespace {

// Stands for the per-particle actual argument of a noisy action.
const Symbol& actual_marker() {
  static const Symbol s("$actual");
  return s;
}

bool is_marker(const Term& t) { return t.is_variable() && t.name() == actual_marker(); }

// ------------------------------------------------------------ expressions

struct Expr {
  enum class Op { Const, Fluent, Slot, Add, Sub, Mul };
  struct Node {
    Op op = Op::Const;
    double value = 0.0;
    int index = -1;
    int lhs = -1;
    int rhs = -1;
  };
  std::vector<Node> nodes;
  int root = -1;

  double eval(const double* vals, double slot) const { return eval_node(root, vals, slot); }

  double eval_node(int n, const double* vals, double slot) const {
    const Node& node = nodes[static_cast<std::size_t>(n)];
    switch (node.op) {
      case Op::Const:
        return node.value;
      case Op::Fluent:
        return vals[node.index];
      case Op::Slot:
        return slot;
      case Op::Add:
        return eval_node(node.lhs, vals, slot) + eval_node(node.rhs, vals, slot);
      case Op::Sub:
        return eval_node(node.lhs, vals, slot) - eval_node(node.rhs, vals, slot);
      case Op::Mul:
        return eval_node(node.lhs, vals, slot) * eval_node(node.rhs, vals, slot);
    }
    return 0.0;
  }
};

// Variable bindings during SSA/likelihood matching. A binding to the marker
// means "the sampled actual value".
using Bindings = std::map<Symbol, Term>;

class ExprCompiler {
 public:
  ExprCompiler(const ActionModel& model, const Bindings& bindings) : model_(model), bindings_(bindings) {}

  Expr compile(const Term& t) {
    Expr e;
    e.root = add(e, t);
    return e;
  }

  // Substitutes bindings and folds arithmetic; the result names a fluent
  // or a value.
  Term ground(const Term& t) {
    switch (t.kind()) {
      case TermKind::Variable: {
        auto it = bindings_.find(t.name());
        if (it == bindings_.end()) {
          throw Error(ErrorKind::UnboundVariable, "unbound variable " + std::string(t.name().str()));
        }
        return it->second;
      }
      case TermKind::Compound: {
        std::vector<Term> args;
        for (const auto& a : t.args()) args.push_back(ground(a));
        return Term::compound(t.name(), std::move(args));
      }
      default:
        return t;
    }
  }

 private:
  int push(Expr& e, Expr::Node n) {
    e.nodes.push_back(n);
    return static_cast<int>(e.nodes.size() - 1);
  }

  int add(Expr& e, const Term& t) {
    switch (t.kind()) {
      case TermKind::Variable: {
        auto it = bindings_.find(t.name());
        if (it == bindings_.end()) {
          throw Error(ErrorKind::UnboundVariable, "unbound variable " + std::string(t.name().str()) + " in expression");
        }
        if (is_marker(it->second)) return push(e, {Expr::Op::Slot});
        return add(e, it->second);
      }
      case TermKind::Integer:
      case TermKind::Real:
        return push(e, {Expr::Op::Const, t.number()});
      case TermKind::Constant: {
        int idx = model_.index_of(t);
        if (idx >= 0) return push(e, {Expr::Op::Fluent, 0.0, idx});
        if (t.name() == sym::true_()) return push(e, {Expr::Op::Const, 1.0});
        if (t.name() == sym::false_()) return push(e, {Expr::Op::Const, 0.0});
        return push(e, {Expr::Op::Const, static_cast<double>(t.name().id())});
      }
      case TermKind::Eval:
        return add_fluent(e, t.inner());
      case TermKind::Compound:
        break;
    }
    if (t.is_arithmetic()) {
      int l = add(e, t.args()[0]);
      int r = add(e, t.args()[1]);
      Expr::Op op = t.name() == sym::plus() ? Expr::Op::Add : t.name() == sym::minus() ? Expr::Op::Sub : Expr::Op::Mul;
      return push(e, {op, 0.0, -1, l, r});
    }
    return add_fluent(e, t);
  }

  int add_fluent(Expr& e, const Term& t) {
    Term g = ground(t);
    int idx = model_.index_of(g);
    if (idx < 0) throw Error(ErrorKind::Model, "unknown fluent " + to_string(g));
    return push(e, {Expr::Op::Fluent, 0.0, idx});
  }

  const ActionModel& model_;
  const Bindings& bindings_;
};

// ------------------------------------------------------------ formulas

struct CompiledFormula {
  enum class Op { True, False, Holds, Compare, Not, And, Or };
  struct Node {
    Node(Op o, CompareOp c = CompareOp::Eq) : op(o), cmp(c) {}
    Op op;
    CompareOp cmp;
    int lhs = -1;  // expr index or child node
    int rhs = -1;
    std::vector<int> children;
  };
  std::vector<Node> nodes;
  std::vector<Expr> exprs;
  int root = -1;

  bool eval(const double* vals) const { return eval_node(root, vals); }

  bool eval_node(int n, const double* vals) const {
    const Node& node = nodes[static_cast<std::size_t>(n)];
    switch (node.op) {
      case Op::True:
        return true;
      case Op::False:
        return false;
      case Op::Holds:
        return exprs[static_cast<std::size_t>(node.lhs)].eval(vals, 0.0) != 0.0;
      case Op::Compare:
        return compare_numbers(node.cmp, exprs[static_cast<std::size_t>(node.lhs)].eval(vals, 0.0),
                               exprs[static_cast<std::size_t>(node.rhs)].eval(vals, 0.0));
      case Op::Not:
        return !eval_node(node.children[0], vals);
      case Op::And:
        for (int c : node.children) {
          if (!eval_node(c, vals)) return false;
        }
        return true;
      case Op::Or:
        for (int c : node.children) {
          if (eval_node(c, vals)) return true;
        }
        return false;
    }
    return false;
  }
};

class FormulaCompiler {
 public:
  explicit FormulaCompiler(const ActionModel& model) : model_(model) {}

  CompiledFormula compile(const Formula& f) {
    out_.root = add(f);
    return std::move(out_);
  }

 private:
  int push(CompiledFormula::Node n) {
    out_.nodes.push_back(std::move(n));
    return static_cast<int>(out_.nodes.size() - 1);
  }

  int expr(const Term& t) {
    ExprCompiler c(model_, env_);
    out_.exprs.push_back(c.compile(t));
    return static_cast<int>(out_.exprs.size() - 1);
  }

  int add(const Formula& f) {
    using Op = CompiledFormula::Op;
    switch (f.kind) {
      case Formula::Kind::True:
        return push({Op::True});
      case Formula::Kind::False:
        return push({Op::False});
      case Formula::Kind::Atom: {
        ExprCompiler c(model_, env_);
        Term g = c.ground(f.lhs);
        if (g.is_constant() && g.name() == sym::true_()) return push({Op::True});
        if (g.is_constant() && g.name() == sym::false_()) return push({Op::False});
        if (model_.index_of(g) < 0) throw Error(ErrorKind::Model, "unknown fluent " + to_string(g) + " in formula");
        CompiledFormula::Node n{Op::Holds};
        n.lhs = expr(g);
        return push(std::move(n));
      }
      case Formula::Kind::Compare: {
        CompiledFormula::Node n{Op::Compare, f.op};
        n.lhs = expr(f.lhs);
        n.rhs = expr(f.rhs);
        return push(std::move(n));
      }
      case Formula::Kind::Not: {
        CompiledFormula::Node n{Op::Not};
        n.children.push_back(add(f.children[0]));
        return push(std::move(n));
      }
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        CompiledFormula::Node n{f.kind == Formula::Kind::And ? Op::And : Op::Or};
        n.children.push_back(add(f.children[0]));
        n.children.push_back(add(f.children[1]));
        return push(std::move(n));
      }
      case Formula::Kind::Exists:
      case Formula::Kind::Forall: {
        if (model_.domain().empty()) {
          throw Error(ErrorKind::Argument, "quantifier over " + std::string(f.var.str()) + " needs a declared domain");
        }
        CompiledFormula::Node n{f.kind == Formula::Kind::Exists ? Op::Or : Op::And};
        auto saved = env_.find(f.var) != env_.end() ? std::optional<Term>(env_[f.var]) : std::nullopt;
        for (Symbol o : model_.domain()) {
          env_[f.var] = Term::constant(o);
          n.children.push_back(add(f.children[0]));
        }
        if (saved) {
          env_[f.var] = *saved;
        } else {
          env_.erase(f.var);
        }
        return push(std::move(n));
      }
    }
    return push({Op::False});
  }

  const ActionModel& model_;
  Bindings env_;
  CompiledFormula out_;
};

// ------------------------------------------------------------ actions

bool match(const Term& pattern, const Term& value, Bindings& b) {
  if (pattern.is_variable()) {
    auto it = b.find(pattern.name());
    if (it == b.end()) {
      b.emplace(pattern.name(), value);
      return true;
    }
    if (is_marker(it->second) || is_marker(value)) return is_marker(it->second) && is_marker(value);
    return same_value(it->second, value);
  }
  if (is_marker(value)) {
    throw Error(ErrorKind::Model, "pattern " + to_string(pattern) + " constrains the sampled actual argument");
  }
  if (pattern.is_compound()) {
    if (!value.is_compound() || pattern.name() != value.name() || pattern.arity() != value.arity()) return false;
    for (std::size_t i = 0; i < pattern.arity(); ++i) {
      if (!match(pattern.args()[i], value.args()[i], b)) return false;
    }
    return true;
  }
  return same_value(pattern, value);
}

struct Update {
  int fluent;
  Expr effect;
};

struct Density {
  Distribution::Family family = Distribution::Family::Delta;
  std::vector<Expr> params;
  std::vector<std::pair<Expr, Expr>> outcomes;
  Term source;  // for messages

  double param(std::size_t k, const double* vals) const { return params[k].eval(vals, 0.0); }

  double sample(const double* vals, SplitMix& gen) const {
    using F = Distribution::Family;
    switch (family) {
      case F::Gaussian: {
        double var = param(1, vals);
        if (!(var > 0.0)) throw Error(ErrorKind::Model, "non-positive variance in likelihood of " + to_string(source));
        return std::normal_distribution<double>(param(0, vals), std::sqrt(var))(gen);
      }
      case F::Uniform:
        return std::uniform_real_distribution<double>(param(0, vals), param(1, vals))(gen);
      case F::Poisson:
        return static_cast<double>(std::poisson_distribution<std::int64_t>(param(0, vals))(gen));
      case F::Delta:
        return param(0, vals);
      case F::Discrete: {
        double u = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
        double acc = 0.0;
        for (const auto& [w, v] : outcomes) {
          acc += w.eval(vals, 0.0);
          if (u < acc) return v.eval(vals, 0.0);
        }
        return outcomes.back().second.eval(vals, 0.0);
      }
    }
    return 0.0;
  }

  double density(const double* vals, double z) const {
    using F = Distribution::Family;
    switch (family) {
      case F::Gaussian:
        return gaussian_pdf(z, param(0, vals), param(1, vals));
      case F::Uniform: {
        double lo = param(0, vals), hi = param(1, vals);
        return (z >= lo && z <= hi && hi > lo) ? 1.0 / (hi - lo) : 0.0;
      }
      case F::Poisson: {
        double rate = param(0, vals);
        if (z < 0.0 || z != std::floor(z)) return 0.0;
        return std::exp(z * std::log(rate) - rate - std::lgamma(z + 1.0));
      }
      case F::Delta:
        return param(0, vals) == z ? 1.0 : 0.0;
      case F::Discrete: {
        double p = 0.0;
        for (const auto& [w, v] : outcomes) {
          if (v.eval(vals, 0.0) == z) p += w.eval(vals, 0.0);
        }
        return p;
      }
    }
    return 0.0;
  }
};

enum class Mode { NoiseFree, Sampled, Observed };

struct PreparedAction {
  Mode mode = Mode::NoiseFree;
  Term action;  // full arity; the marker stands in for a sampled actual
  double observed = 0.0;
  std::optional<Density> density;
  std::vector<Update> updates;
};

Density compile_density(const ActionModel& model, const LikelihoodModel& lm, const Term& action) {
  Bindings b;
  Term pattern = lm.action;
  if (!match(pattern, action, b)) {
    throw Error(ErrorKind::Model, "likelihood " + to_string(lm.action) + " does not match " + to_string(action));
  }
  b.erase(lm.target);
  ExprCompiler c(model, b);
  Density d;
  d.family = lm.density.family;
  d.source = action;
  for (const auto& p : lm.density.params) d.params.push_back(c.compile(p));
  for (const auto& o : lm.density.outcomes) d.outcomes.emplace_back(c.compile(o.weight), c.compile(o.value));
  return d;
}

std::vector<Update> compile_updates(const ActionModel& model, const Term& action) {
  std::map<PredKey, const Ssa*> by_fluent;
  for (const auto& s : model.theory().ssas) by_fluent[pred_key(s.fluent)] = &s;
  std::vector<Update> out;
  for (std::size_t fi = 0; fi < model.fluent_count(); ++fi) {
    const Term& fluent = model.fluent(fi);
    auto it = by_fluent.find(pred_key(fluent));
    if (it == by_fluent.end()) continue;
    const Ssa& ssa = *it->second;
    Bindings head;
    if (!match(ssa.fluent, fluent, head)) continue;
    const SsaCase* chosen = nullptr;
    Bindings chosen_bindings;
    for (const auto& c : ssa.cases) {
      Bindings b = head;
      if (!match(c.action, action, b)) continue;
      if (chosen) {
        throw Error(ErrorKind::Model, "SSA cases " + to_string(chosen->action) + " and " + to_string(c.action) +
                                          " both match " + to_string(action) + " for " + to_string(fluent));
      }
      chosen = &c;
      chosen_bindings = std::move(b);
    }
    if (!chosen) continue;
    ExprCompiler comp(model, chosen_bindings);
    out.push_back({static_cast<int>(fi), comp.compile(chosen->effect)});
  }
  return out;
}

bool is_ground_except_marker(const Term& t) {
  if (is_marker(t)) return true;
  if (t.is_variable()) return false;
  return std::all_of(t.args().begin(), t.args().end(), is_ground_except_marker);
}

PreparedAction prepare(const ActionModel& model, const Term& given) {
  if (!given.is_callable()) throw Error(ErrorKind::Argument, "not an action: " + to_string(given));
  PreparedAction p;
  Symbol name = given.name();
  std::size_t n = given.arity();
  // A noisy action may be written without its actual argument.
  std::size_t full = n + 1;
  const NoisyDecl* noisy = model.noisy(name, full);
  if (!noisy) {
    full = n;
    noisy = model.noisy(name, full);
  }
  const LikelihoodModel* lm = model.likelihood(name, full);
  if (noisy && !lm) throw Error(ErrorKind::Model, "noisy action " + std::string(name.str()) + " has no likelihood");
  if (!lm && model.likelihood(name, n + 1)) {
    throw Error(ErrorKind::Argument, "sensing action " + to_string(given) + " needs its observed value");
  }

  std::vector<Term> args = given.args();
  if (lm) {
    std::size_t pos = 0;
    if (noisy) {
      pos = noisy->actual - 1;
    } else {
      for (std::size_t i = 0; i < lm->action.arity(); ++i) {
        const Term& a = lm->action.args()[i];
        if (a.is_variable() && a.name() == lm->target) pos = i;
      }
    }
    if (args.size() + 1 == full) {
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(pos), Term::variable(actual_marker()));
    } else if (args[pos].is_variable()) {
      args[pos] = Term::variable(actual_marker());
    }
    if (is_marker(args[pos])) {
      if (!noisy) {
        throw Error(ErrorKind::Argument,
                    "sensing action " + to_string(given) + " needs its observed value");
      }
      p.mode = Mode::Sampled;
    } else {
      if (!args[pos].is_number()) {
        throw Error(ErrorKind::Argument, "observed value of " + to_string(given) + " must be a number");
      }
      p.mode = Mode::Observed;
      p.observed = args[pos].number();
    }
  }
  p.action = Term::compound(name, std::move(args));
  if (given.arity() == 0 && p.mode == Mode::NoiseFree) p.action = given;
  if (!is_ground_except_marker(p.action)) {
    throw Error(ErrorKind::Argument, "action " + to_string(given) + " is not ground");
  }
  if (lm) p.density = compile_density(model, *lm, p.action);
  p.updates = compile_updates(model, p.action);
  return p;
}

void apply_updates(BeliefState& b, const PreparedAction& p, const std::vector<double>* actuals) {
  if (p.updates.empty()) return;
  std::size_t F = b.model->fluent_count();
  std::vector<double> next(p.updates.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    double* vals = b.values.data() + i * F;
    double slot = actuals ? (*actuals)[i] : p.observed;
    for (std::size_t k = 0; k < p.updates.size(); ++k) next[k] = p.updates[k].effect.eval(vals, slot);
    for (std::size_t k = 0; k < p.updates.size(); ++k) {
      auto f = static_cast<std::size_t>(p.updates[k].fluent);
      double v = next[k];
      if (b.model->sort(f) == Sort::Bool) v = v != 0.0 ? 1.0 : 0.0;
      vals[f] = v;
    }
  }
}

void resample(BeliefState& b, Seed seed) {
  std::size_t n = b.size(), F = b.model->fluent_count();
  SplitMix gen(seed);
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(gen) / static_cast<double>(n);
  std::vector<double> values(b.values.size());
  double acc = b.weights[0];
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double target = u + static_cast<double>(i) / static_cast<double>(n);
    while (target > acc && j + 1 < n) acc += b.weights[++j];
    std::copy_n(b.values.begin() + static_cast<std::ptrdiff_t>(j * F), F,
                values.begin() + static_cast<std::ptrdiff_t>(i * F));
  }
  b.values = std::move(values);
  std::fill(b.weights.begin(), b.weights.end(), 1.0 / static_cast<double>(n));
}

}  // namespace

// ------------------------------------------------------------ model

std::shared_ptr<const ActionModel> ActionModel::compile(const ActionTheory& theory) {
  auto m = std::make_shared<ActionModel>();
  m->theory_ = theory;
  for (const auto& decl : theory.fluents) {
    std::vector<std::size_t> idx(decl.arity, 0);
    if (decl.arity > 0 && theory.domain.empty()) continue;
    while (true) {
      Term ground;
      if (decl.arity == 0) {
        ground = Term::constant(decl.name);
      } else {
        std::vector<Term> args;
        for (auto k : idx) args.push_back(Term::constant(theory.domain[k]));
        ground = Term::compound(decl.name, std::move(args));
      }
      m->index_.emplace(ground, static_cast<int>(m->fluents_.size()));
      m->fluents_.push_back(std::move(ground));
      m->sorts_.push_back(decl.sort);
      std::size_t k = decl.arity;
      while (k > 0) {
        if (++idx[k - 1] < theory.domain.size()) break;
        idx[k - 1] = 0;
        --k;
      }
      if (k == 0) break;
    }
  }
  return m;
}

int ActionModel::index_of(const Term& ground) const {
  auto it = index_.find(ground);
  return it == index_.end() ? -1 : it->second;
}

double ActionModel::encode(const Term& value, Sort sort) const {
  if (value.is_number()) {
    if (sort == Sort::Bool) return value.number() != 0.0 ? 1.0 : 0.0;
    return value.number();
  }
  if (value.is_constant()) {
    if (value.name() == sym::true_()) return 1.0;
    if (value.name() == sym::false_()) return 0.0;
    if (sort == Sort::Object) return static_cast<double>(value.name().id());
  }
  throw Error(ErrorKind::Model, "value " + to_string(value) + " does not fit sort " + std::string(sort_name(sort)));
}

Term ActionModel::decode(double value, Sort sort) const {
  switch (sort) {
    case Sort::Bool:
      return Term::boolean(value != 0.0);
    case Sort::Int:
      return Term::integer(std::llround(value));
    case Sort::Real:
      return Term::real(value);
    case Sort::Object:
      return Term::constant(Symbol::from_id(static_cast<std::uint32_t>(value)));
  }
  return Term::real(value);
}

const NoisyDecl* ActionModel::noisy(Symbol action, std::size_t arity) const {
  for (const auto& n : theory_.noisy) {
    if (n.action == action && n.arity == arity) return &n;
  }
  return nullptr;
}

const LikelihoodModel* ActionModel::likelihood(Symbol action, std::size_t arity) const {
  for (const auto& l : theory_.likelihoods) {
    if (l.action.name() == action && l.action.arity() == arity) return &l;
  }
  return nullptr;
}

Term BeliefState::value_term(std::size_t particle, const Term& fluent) const {
  int idx = model->index_of(fluent);
  if (idx < 0) throw Error(ErrorKind::Argument, "unknown fluent " + to_string(fluent));
  auto f = static_cast<std::size_t>(idx);
  return model->decode(value(particle, f), model->sort(f));
}

double BeliefState::effective_sample_size() const {
  double s = 0.0, s2 = 0.0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

// ------------------------------------------------------------ operations

BeliefState init_belief(std::shared_ptr<const ActionModel> model, std::size_t member, std::size_t n, Seed seed) {
  if (n < 1) throw Error(ErrorKind::Argument, "particle count must be at least 1");
  if (member >= model->member_count()) {
    throw Error(ErrorKind::Argument, "prior family member " + std::to_string(member) + " out of range (family has " +
                                         std::to_string(model->member_count()) + ")");
  }
  BeliefState b;
  b.model = model;
  b.member = member;
  std::size_t F = model->fluent_count();
  b.weights.assign(n, 1.0 / static_cast<double>(n));
  b.values.assign(n * F, 0.0);
  const auto& priors = model->theory().priors;
  if (priors.empty()) {
    for (std::size_t f = 0; f < F; ++f) {
      if (model->sort(f) == Sort::Object) {
        throw Error(ErrorKind::Model, "object-valued fluent " + to_string(model->fluent(f)) + " needs a prior");
      }
      for (std::size_t i = 0; i < n; ++i) b.values[i * F + f] = 0.0;
    }
    return b;
  }
  auto prior = Model::compile(priors[member].clauses);
  WorldBuilder builder(prior);
  SamplingChooser chooser(seed);
  for (std::size_t i = 0; i < n; ++i) {
    chooser.reseed(derive(seed, i));
    builder.begin(chooser);
    builder.build_layer(0);
    const World& w = builder.world();
    for (std::size_t f = 0; f < F; ++f) {
      const Term& fluent = model->fluent(f);
      Sort sort = model->sort(f);
      double v;
      if (const Term* rv = w.rv_value(fluent)) {
        v = model->encode(*rv, sort);
      } else if (sort == Sort::Bool) {
        v = w.has_fact(fluent) ? 1.0 : 0.0;
      } else if (sort == Sort::Object) {
        throw Error(ErrorKind::Model, "prior " + std::to_string(member) + " gives no value for object-valued fluent " +
                                          to_string(fluent));
      } else {
        v = 0.0;
      }
      b.values[i * F + f] = v;
    }
  }
  return b;
}

Term ssa_value(const ActionModel& model, const Term& fluent, const Term& action, const Valuation& valuation) {
  int idx = model.index_of(fluent);
  if (idx < 0) throw Error(ErrorKind::Argument, "unknown fluent " + to_string(fluent));
  std::size_t F = model.fluent_count();
  std::vector<double> vals(F, 0.0);
  for (std::size_t f = 0; f < F; ++f) {
    auto it = valuation.find(model.fluent(f));
    if (it != valuation.end()) vals[f] = model.encode(it->second, model.sort(f));
  }
  if (!action.is_ground()) throw Error(ErrorKind::Argument, "action " + to_string(action) + " is not ground");
  for (const auto& u : compile_updates(model, action)) {
    if (u.fluent != idx) continue;
    double v = u.effect.eval(vals.data(), 0.0);
    auto f = static_cast<std::size_t>(idx);
    if (model.sort(f) == Sort::Bool) v = v != 0.0 ? 1.0 : 0.0;
    return model.decode(v, model.sort(f));
  }
  return model.decode(vals[static_cast<std::size_t>(idx)], model.sort(static_cast<std::size_t>(idx)));
}

BeliefState progress(const BeliefState& belief, const Term& action, Seed seed) {
  PreparedAction p = prepare(*belief.model, action);
  BeliefState out = belief;
  if (p.mode != Mode::Sampled) {
    apply_updates(out, p, nullptr);
    return out;
  }
  std::size_t F = out.model->fluent_count();
  std::vector<double> actuals(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    SplitMix gen(derive(seed, i));
    actuals[i] = p.density->sample(out.values.data() + i * F, gen);
  }
  apply_updates(out, p, &actuals);
  return out;
}

BeliefState observe(const BeliefState& belief, const Term& action, Seed seed) {
  PreparedAction p = prepare(*belief.model, action);
  if (p.mode != Mode::Observed) {
    throw Error(ErrorKind::Argument, "observe needs an action with a likelihood and a ground observed value, got " +
                                         to_string(action));
  }
  BeliefState out = belief;
  std::size_t F = out.model->fluent_count();
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.weights[i] *= p.density->density(out.values.data() + i * F, p.observed);
    total += out.weights[i];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorKind::ImpossibleEvidence,
                "observation " + to_string(action) + " has zero likelihood under every particle");
  }
  for (double& w : out.weights) w /= total;
  if (out.effective_sample_size() < static_cast<double>(out.size()) / 2.0) resample(out, seed);
  apply_updates(out, p, nullptr);
  return out;
}

BeliefState execute(const BeliefState& belief, const Term& action, Seed seed) {
  PreparedAction p = prepare(*belief.model, action);
  if (p.mode == Mode::Observed) return observe(belief, action, seed);
  return progress(belief, action, seed);
}

double degree_of_belief(const BeliefState& belief, const Formula& formula) {
  CompiledFormula f = FormulaCompiler(*belief.model).compile(formula);
  std::size_t F = belief.model->fluent_count();
  // ratio of the two sums, so that all-or-nothing beliefs are exactly 1 or 0
  double yes = 0.0;
  double no = 0.0;
  for (std::size_t i = 0; i < belief.size(); ++i) {
    (f.eval(belief.values.data() + i * F) ? yes : no) += belief.weights[i];
  }
  if (yes + no <= 0.0) return 0.0;
  return yes / (yes + no);
}

BeliefInterval belief_interval(std::shared_ptr<const ActionModel> model, const Formula& formula,
                               const std::vector<Term>& trace, std::size_t n_particles, Seed seed) {
  BeliefInterval out;
  for (std::size_t m = 0; m < model->member_count(); ++m) {
    Seed member_seed = derive(seed, m);
    BeliefState b = init_belief(model, m, n_particles, member_seed);
    for (std::size_t k = 0; k < trace.size(); ++k) b = execute(b, trace[k], derive(member_seed, k + 1));
    out.members.push_back(degree_of_belief(b, formula));
  }
  out.lo = *std::min_element(out.members.begin(), out.members.end());
  out.hi = *std::max_element(out.members.begin(), out.members.end());
  return out;
}

}  // namespace ppw
