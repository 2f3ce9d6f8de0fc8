#include "ppw/world.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>

#include "ppw/error.hpp"
#include "ppw/printer.hpp"

namespace ppw {
namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t value_hash(const Term& t) {
  switch (t.kind()) {
    case TermKind::Integer:
    case TermKind::Real: {
      double d = t.number();
      if (d == 0.0) d = 0.0;
      return mix(7, std::bit_cast<std::uint64_t>(d));
    }
    case TermKind::Variable:
    case TermKind::Constant:
      return mix(static_cast<std::size_t>(t.kind()), t.name().id());
    case TermKind::Compound:
    case TermKind::Eval: {
      std::size_t h = mix(static_cast<std::size_t>(t.kind()), t.name().id());
      for (const auto& a : t.args()) h = mix(h, value_hash(a));
      return h;
    }
  }
  return 0;
}

Term arithmetic(Symbol op, const Term& a, const Term& b) {
  if (!a.is_number() || !b.is_number()) {
    throw Error(ErrorKind::Model, "arithmetic on non-number: " + to_string(a) + " " + std::string(op.str()) + " " +
                                      to_string(b));
  }
  if (a.kind() == TermKind::Integer && b.kind() == TermKind::Integer) {
    std::int64_t x = a.as_int(), y = b.as_int();
    if (op == sym::plus()) return Term::integer(x + y);
    if (op == sym::minus()) return Term::integer(x - y);
    return Term::integer(x * y);
  }
  double x = a.number(), y = b.number();
  if (op == sym::plus()) return Term::real(x + y);
  if (op == sym::minus()) return Term::real(x - y);
  return Term::real(x * y);
}

bool compare_values(CompareOp op, const Term& a, const Term& b) {
  if (a.is_number() && b.is_number()) {
    if (a.kind() == TermKind::Integer && b.kind() == TermKind::Integer) {
      std::int64_t x = a.as_int(), y = b.as_int();
      switch (op) {
        case CompareOp::Eq: return x == y;
        case CompareOp::Ne: return x != y;
        case CompareOp::Lt: return x < y;
        case CompareOp::Le: return x <= y;
        case CompareOp::Gt: return x > y;
        case CompareOp::Ge: return x >= y;
      }
    }
    return compare_numbers(op, a.number(), b.number());
  }
  if (op == CompareOp::Eq) return same_value(a, b);
  if (op == CompareOp::Ne) return !same_value(a, b);
  throw Error(ErrorKind::Model, "ordering comparison needs numbers: " + to_string(a) + " " +
                                    std::string(to_string(op)) + " " + to_string(b));
}

bool is_true_const(const Term& t) { return t.is_constant() && t.name() == sym::true_(); }

// Derived terms deeper than this come from recursion that builds
// structure without bound; copying them dominates long before the step
// budget runs out.
constexpr int kMaxTermDepth = 128;

bool deeper_than(const Term& t, int limit) {
  if (limit < 0) return true;
  for (const auto& a : t.args()) {
    if (deeper_than(a, limit - 1)) return true;
  }
  return false;
}

// Folds a term without variables or evals to a value.
std::optional<Term> fold_ground(const Term& t) {
  switch (t.kind()) {
    case TermKind::Variable:
    case TermKind::Eval:
      return std::nullopt;
    case TermKind::Constant:
    case TermKind::Integer:
    case TermKind::Real:
      return t;
    case TermKind::Compound:
      break;
  }
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) {
    auto v = fold_ground(a);
    if (!v) return std::nullopt;
    args.push_back(std::move(*v));
  }
  if (t.is_arithmetic()) return arithmetic(t.name(), args[0], args[1]);
  return Term::compound(t.name(), std::move(args));
}

double as_param(const Term& v, const Distribution& d) {
  if (!v.is_number()) {
    throw Error(ErrorKind::Model, "non-numeric parameter " + to_string(v) + " in " + to_string(d));
  }
  return v.number();
}

// Builds a ground distribution from parameter values.
GroundDistribution make_ground(const Distribution& d, const std::vector<Term>& params,
                               const std::vector<std::pair<Term, Term>>& outcomes) {
  using F = Distribution::Family;
  GroundDistribution g;
  g.family = d.family;
  switch (d.family) {
    case F::Gaussian:
    case F::Uniform:
      g.a = as_param(params[0], d);
      g.b = as_param(params[1], d);
      break;
    case F::Poisson:
      g.a = as_param(params[0], d);
      break;
    case F::Delta:
      g.point = params[0];
      break;
    case F::Discrete:
      for (const auto& [w, v] : outcomes) {
        g.weights.push_back(as_param(w, d));
        g.values.push_back(v);
      }
      break;
  }
  check(g);
  return g;
}

std::optional<GroundDistribution> try_fix(const Distribution& d) {
  std::vector<Term> params;
  for (const auto& p : d.params) {
    auto v = fold_ground(p);
    if (!v) return std::nullopt;
    params.push_back(std::move(*v));
  }
  std::vector<std::pair<Term, Term>> outcomes;
  for (const auto& o : d.outcomes) {
    auto w = fold_ground(o.weight);
    auto v = fold_ground(o.value);
    if (!w || !v) return std::nullopt;
    outcomes.emplace_back(std::move(*w), std::move(*v));
  }
  return make_ground(d, params, outcomes);
}

// Variable renaming to dense slots.
struct Slotter {
  std::map<Symbol, int> slots;

  Term operator()(const Term& t) {
    switch (t.kind()) {
      case TermKind::Variable: {
        auto [it, inserted] = slots.emplace(t.name(), static_cast<int>(slots.size()));
        return Term::variable(t.name(), it->second);
      }
      case TermKind::Eval:
        return Term::eval((*this)(t.inner()));
      case TermKind::Compound: {
        std::vector<Term> args;
        args.reserve(t.args().size());
        for (const auto& a : t.args()) args.push_back((*this)(a));
        return Term::compound(t.name(), std::move(args));
      }
      default:
        return t;
    }
  }
};

struct Needs {
  std::set<int> required;
  std::set<int> provided;
};

void scan(const Term& t, bool bindable, Needs& n) {
  if (t.is_variable()) {
    (bindable ? n.provided : n.required).insert(t.slot());
    return;
  }
  if (t.is_eval() || t.is_arithmetic()) bindable = false;
  for (const auto& a : t.args()) scan(a, bindable, n);
}

Needs needs_of(const detail::CompiledLiteral& lit) {
  Needs n;
  switch (lit.kind) {
    case Literal::Kind::Positive:
      if (lit.between) {
        scan(lit.atom.args()[0], false, n);
        scan(lit.atom.args()[1], false, n);
        scan(lit.atom.args()[2], true, n);
      } else {
        scan(lit.atom, true, n);
      }
      break;
    case Literal::Kind::Negative:
      scan(lit.atom, false, n);
      break;
    case Literal::Kind::Compare:
      scan(lit.atom, false, n);
      scan(lit.rhs, false, n);
      break;
  }
  return n;
}

bool subset(const std::set<int>& a, const std::set<int>& b) {
  return std::all_of(a.begin(), a.end(), [&](int x) { return b.count(x) != 0; });
}

// Orders body literals so that negations and comparisons run once their
// variables are bound; generators keep their source order.
std::vector<detail::CompiledLiteral> order_body(std::vector<detail::CompiledLiteral> body, std::set<int> bound) {
  std::vector<detail::CompiledLiteral> out;
  while (!body.empty()) {
    std::size_t pick = 0;
    bool found = false;
    for (std::size_t i = 0; i < body.size() && !found; ++i) {
      const auto& lit = body[i];
      Needs n = needs_of(lit);
      if (lit.kind == Literal::Kind::Compare && lit.op == CompareOp::Eq) {
        std::set<int> lhs, rhs;
        Needs nl, nr;
        scan(lit.atom, false, nl);
        scan(lit.rhs, false, nr);
        bool lhs_bare = lit.atom.is_variable();
        bool rhs_bare = lit.rhs.is_variable();
        found = subset(n.required, bound) || (lhs_bare && subset(nr.required, bound)) ||
                (rhs_bare && subset(nl.required, bound));
      } else {
        found = subset(n.required, bound);
      }
      if (found) pick = i;
    }
    Needs n = needs_of(body[pick]);
    bound.insert(n.required.begin(), n.required.end());
    bound.insert(n.provided.begin(), n.provided.end());
    out.push_back(std::move(body[pick]));
    body.erase(body.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return out;
}

}  // namespace

std::size_t ValueHash::operator()(const Term& t) const noexcept { return value_hash(t); }

// ---------------------------------------------------------------- tables

const Term* GroundTable::find(const Term& key) const {
  if (keys_.size() < kIndexFrom) {
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      if (same_value(keys_[i], key)) return &values_[i];
    }
    return nullptr;
  }
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &values_[it->second];
}

bool GroundTable::insert(const Term& key, const Term& value) {
  if (find(key)) return false;
  keys_.push_back(key);
  values_.push_back(value);
  if (keys_.size() == kIndexFrom) {
    for (std::size_t i = 0; i < keys_.size(); ++i) index_.emplace(keys_[i], static_cast<std::uint32_t>(i));
  } else if (keys_.size() > kIndexFrom) {
    index_.emplace(key, static_cast<std::uint32_t>(keys_.size() - 1));
  }
  return true;
}

void GroundTable::clear() {
  keys_.clear();
  values_.clear();
  if (!index_.empty()) index_.clear();
}

void Layer::reset(std::size_t preds) {
  facts.resize(preds);
  rvs.resize(preds);
  for (auto& f : facts) f.clear();
  for (auto& r : rvs) r.clear();
}

// ---------------------------------------------------------------- model

int Model::intern(const PredKey& key) {
  auto [it, inserted] = ids_.emplace(key, static_cast<int>(preds_.size()));
  if (inserted) {
    preds_.push_back(key);
    dynamic_.push_back(false);
    rv_pred_.push_back(false);
  }
  return it->second;
}

int Model::pred_id(const PredKey& key) const {
  auto it = ids_.find(key);
  return it == ids_.end() ? -1 : it->second;
}

std::pair<int, Term> Model::resolve_atom(const Term& atom, int t) const {
  if (!atom.is_callable()) return {-1, atom};
  PredKey key = pred_key(atom);
  int id = pred_id(key);
  if (id >= 0) return {id, atom};
  int timed = pred_id(PredKey{key.name, key.arity + 1});
  if (timed >= 0 && is_dynamic(timed)) {
    std::vector<Term> args = atom.args();
    args.push_back(Term::integer(t));
    return {timed, Term::compound(key.name, std::move(args))};
  }
  return {-1, atom};
}

std::shared_ptr<const Model> Model::compile(const std::vector<Clause>& clauses, std::size_t derivation_limit) {
  auto model = std::make_shared<Model>();
  Model& m = *model;
  m.derivation_limit_ = derivation_limit;
  ProgramAnalysis analysis = analyze(clauses);
  for (const auto& d : analysis.diagnostics) {
    if (d.severity == Severity::Error) throw Error(ErrorKind::Model, d.message);
  }

  std::set<PredKey> dynamic = analysis.dynamic;
  for (const auto& c : clauses) {
    if (c.head.name() == sym::poss() && c.head.arity() == 2 && c.head.args()[0].is_callable()) {
      const Term& action = c.head.args()[0];
      dynamic.insert(PredKey{action.name(), static_cast<std::uint32_t>(action.arity() + 1)});
    }
  }
  for (const auto& c : clauses) {
    for (const auto& o : occurrences(c)) {
      if (o.atom->is_callable()) m.intern(pred_key(*o.atom));
    }
  }
  for (const auto& k : dynamic) m.dynamic_[static_cast<std::size_t>(m.intern(k))] = true;

  for (std::size_t ci = 0; ci < clauses.size(); ++ci) {
    const Clause& src = clauses[ci];
    detail::CompiledClause c;
    c.id = ci;
    c.kind = src.kind;
    c.prob = src.prob;
    c.loc = src.loc;
    Slotter slot;
    c.head = slot(src.head);
    c.head_pred = m.intern(pred_key(src.head));
    c.dynamic = m.is_dynamic(c.head_pred);
    std::set<int> prebound;
    if (c.dynamic) {
      TimeArg ta = time_arg(src.head);
      c.time_kind = ta.kind;
      c.time_offset = ta.offset;
      if (ta.kind == TimeArg::Kind::Var) {
        c.time_slot = slot(Term::variable(ta.var)).slot();
        prebound.insert(c.time_slot);
      } else if (ta.kind != TimeArg::Kind::Const) {
        throw Error(ErrorKind::Model, "time-indexed head " + to_string(src.head) +
                                          " must end in a time argument T, T+k or an integer");
      }
    }
    if (src.kind == Clause::Kind::Dist) {
      m.rv_pred_[static_cast<std::size_t>(c.head_pred)] = true;
      Distribution d = *src.dist;
      for (auto& p : d.params) p = slot(p);
      for (auto& o : d.outcomes) {
        o.weight = slot(o.weight);
        o.value = slot(o.value);
      }
      using F = Distribution::Family;
      if (d.family == F::Gaussian || d.family == F::Uniform || d.family == F::Poisson) m.infinite_support_ = true;
      c.fixed = try_fix(d);
      c.dist = std::move(d);
    }
    std::vector<detail::CompiledLiteral> body;
    for (const auto& lit : src.body) {
      detail::CompiledLiteral cl;
      cl.kind = lit.kind;
      cl.atom = slot(lit.atom);
      cl.op = lit.op;
      cl.rhs = slot(lit.rhs);
      cl.loc = lit.loc;
      if (lit.kind != Literal::Kind::Compare) {
        if (lit.atom.is_constant() && (lit.atom.name() == sym::true_() || lit.atom.name() == sym::false_())) {
          cl.truth = true;
        } else if (lit.atom.name() == sym::between() && lit.atom.arity() == 3 &&
                   lit.kind == Literal::Kind::Positive) {
          cl.between = true;
        } else {
          cl.pred = m.intern(pred_key(lit.atom));
        }
      }
      body.push_back(std::move(cl));
    }
    c.body = order_body(std::move(body), prebound);
    c.nvars = static_cast<int>(slot.slots.size());
    m.clauses_.push_back(std::move(c));
  }
  auto convert = [](const std::vector<Stratum>& in) {
    std::vector<detail::CompiledStratum> out;
    for (const auto& s : in) out.push_back({s.clauses, s.recursive});
    return out;
  };
  m.static_strata_ = convert(analysis.static_strata);
  m.dynamic_strata_ = convert(analysis.dynamic_strata);
  return model;
}

// ---------------------------------------------------------------- choosers

bool SamplingChooser::coin(double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p;
}

std::size_t SamplingChooser::pick(const std::vector<double>& weights) {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

// ---------------------------------------------------------------- world

World::World(std::shared_ptr<const Model> model) : model_(std::move(model)) {
  timeless_.reset(model_->pred_count());
  coins_.resize(model_->clauses().size());
}

const Layer* World::layer_for(int pred, const Term& atom) const {
  if (!model_->is_dynamic(pred)) return &timeless_;
  if (atom.arity() == 0) return nullptr;
  const Term& time = atom.args().back();
  if (time.kind() != TermKind::Integer) return nullptr;
  std::int64_t t = time.as_int();
  if (t < 0) return nullptr;
  if (t > horizon()) {
    throw Error(ErrorKind::Argument,
                "reference to time " + std::to_string(t) + " beyond horizon " + std::to_string(horizon()));
  }
  return &layers_[static_cast<std::size_t>(t)];
}

bool World::has_fact(const Term& atom) const {
  if (!atom.is_callable()) return false;
  int pred = model_->pred_id(pred_key(atom));
  if (pred < 0) return false;
  const Layer* l = layer_for(pred, atom);
  return l && l->facts[static_cast<std::size_t>(pred)].contains(atom);
}

const Term* World::rv_value(const Term& rv) const {
  if (!rv.is_callable()) return nullptr;
  int pred = model_->pred_id(pred_key(rv));
  if (pred < 0) return nullptr;
  const Layer* l = layer_for(pred, rv);
  return l ? l->rvs[static_cast<std::size_t>(pred)].find(rv) : nullptr;
}

std::vector<Term> World::facts_at(int t) const {
  std::vector<Term> out;
  for (const Layer* l : {&timeless_, &layer(t)}) {
    for (const auto& table : l->facts) {
      for (std::size_t i = 0; i < table.size(); ++i) out.push_back(table.key(i));
    }
  }
  return out;
}

std::vector<std::pair<Term, Term>> World::rvs_at(int t) const {
  std::vector<std::pair<Term, Term>> out;
  for (const Layer* l : {&timeless_, &layer(t)}) {
    for (const auto& table : l->rvs) {
      for (std::size_t i = 0; i < table.size(); ++i) out.emplace_back(table.key(i), table.value(i));
    }
  }
  return out;
}

std::string World::state_key(int t) const {
  std::vector<std::string> items;
  for (const Layer* l : {&timeless_, &layer(t)}) {
    for (std::size_t p = 0; p < l->facts.size(); ++p) {
      const PredKey& k = model_->pred(static_cast<int>(p));
      if (k.name == sym::poss() || k.name == sym::reward()) continue;
      const auto& facts = l->facts[p];
      for (std::size_t i = 0; i < facts.size(); ++i) items.push_back(canonical(facts.key(i)));
      const auto& rvs = l->rvs[p];
      for (std::size_t i = 0; i < rvs.size(); ++i) {
        items.push_back(canonical(rvs.key(i)) + "=" + canonical(rvs.value(i)));
      }
    }
  }
  std::sort(items.begin(), items.end());
  std::string out;
  for (const auto& s : items) {
    out += s;
    out += ';';
  }
  return out;
}

// ---------------------------------------------------------------- builder

namespace {

bool heads_may_unify(const Term& pattern, const Term& ground) {
  if (pattern.is_variable()) return true;
  if (pattern.is_eval() || pattern.is_arithmetic()) return true;
  if (pattern.is_compound()) {
    if (!ground.is_compound() || pattern.name() != ground.name() || pattern.arity() != ground.arity()) return false;
    for (std::size_t i = 0; i < pattern.arity(); ++i) {
      if (!heads_may_unify(pattern.args()[i], ground.args()[i])) return false;
    }
    return true;
  }
  return same_value(pattern, ground);
}

}  // namespace

WorldBuilder::WorldBuilder(std::shared_ptr<const Model> model, const Evidence& evidence)
    : model_(std::move(model)), world_(model_) {
  for (const auto& item : evidence) {
    EvidenceRule rule;
    rule.target = item.target;
    rule.value = item.value;
    rule.pred = item.target.is_callable() ? model_->pred_id(pred_key(item.target)) : -1;
    if (rule.pred >= 0) {
      std::vector<std::size_t> producers;
      for (const auto& c : model_->clauses()) {
        if (c.head_pred == rule.pred && heads_may_unify(c.head, item.target)) producers.push_back(c.id);
      }
      bool rv = false;
      for (auto id : producers) rv |= model_->clauses()[id].kind == Clause::Kind::Dist;
      rule.is_rv = rv;
      if (!rv && producers.size() == 1 && model_->clauses()[producers[0]].kind == Clause::Kind::ProbFact) {
        rule.clamp_coin = true;
        rule.clause = producers[0];
      }
    }
    if (!rule.is_rv && !(item.value.is_constant() &&
                         (item.value.name() == sym::true_() || item.value.name() == sym::false_()))) {
      throw Error(ErrorKind::Argument, "evidence on atom " + to_string(item.target) + " needs value true or false");
    }
    evidence_.push_back(std::move(rule));
  }
}

void WorldBuilder::begin(Chooser& chooser) {
  chooser_ = &chooser;
  std::size_t n = model_->pred_count();
  if (!world_.model_) world_ = World(model_);
  world_.timeless_.reset(n);
  for (auto& c : world_.coins_) c.clear();
  world_.layers_.clear();
  world_.weight_ = 1.0;
  memo_.resize(n);
  for (auto& m : memo_) m.clear();
  steps_ = 0;
  t_ = -1;
  timeless_pass_ = true;
  run_strata(model_->static_strata(), -1);
  timeless_pass_ = false;
}

void WorldBuilder::resume(World world, Chooser& chooser) {
  world_ = std::move(world);
  chooser_ = &chooser;
  memo_.resize(model_->pred_count());
  for (auto& m : memo_) m.clear();
  steps_ = 0;
  t_ = world_.horizon();
}

void WorldBuilder::build_layer(int t, const Term* action) {
  std::size_t n = model_->pred_count();
  auto& layers = world_.layers_;
  if (t == static_cast<int>(layers.size())) {
    layers.emplace_back();
    layers.back().reset(n);
  } else if (t == static_cast<int>(layers.size()) - 1) {
    Layer& l = layers.back();
    std::swap(memo_, l.rvs);
    l.reset(n);
  } else {
    throw Error(ErrorKind::Argument, "layer " + std::to_string(t) + " cannot be built after " +
                                         std::to_string(static_cast<int>(layers.size()) - 1));
  }
  t_ = t;
  if (action) {
    std::vector<Term> args = action->args();
    args.push_back(Term::integer(t));
    Term fact = Term::compound(action->name(), std::move(args));
    int pred = model_->pred_id(pred_key(fact));
    if (pred >= 0) layers.back().facts[static_cast<std::size_t>(pred)].insert(fact);
  }
  run_strata(model_->dynamic_strata(), t);
  for (auto& m : memo_) m.clear();
}

void WorldBuilder::finish() {
  for (const auto& rule : evidence_) {
    if (world_.weight_ == 0.0) return;
    if (rule.is_rv) {
      const Term* v = world_.rv_value(rule.target);
      if (!v || !same_value(*v, rule.value)) world_.weight_ = 0.0;
    } else {
      bool want = is_true_const(rule.value);
      if (world_.has_fact(rule.target) != want) world_.weight_ = 0.0;
    }
  }
}

void WorldBuilder::run_strata(const std::vector<detail::CompiledStratum>& strata, int t) {
  for (const auto& s : strata) {
    if (!s.recursive) {
      for (auto ci : s.clauses) run_clause(model_->clauses()[ci], t);
      continue;
    }
    do {
      changed_ = false;
      for (auto ci : s.clauses) run_clause(model_->clauses()[ci], t);
    } while (changed_);
  }
}

void WorldBuilder::run_clause(const detail::CompiledClause& c, int t) {
  slots_.assign(static_cast<std::size_t>(c.nvars), Term());
  bound_.assign(static_cast<std::size_t>(c.nvars), 0);
  trail_.clear();
  if (c.dynamic) {
    if (c.time_kind == TimeArg::Kind::Var) {
      std::int64_t v = t - c.time_offset;
      if (v < 0) return;
      bind(c.time_slot, Term::integer(v));
    } else if (c.time_offset != t) {
      return;
    }
  }
  solve(c, 0);
}

void WorldBuilder::bind(int slot, const Term& value) {
  slots_[static_cast<std::size_t>(slot)] = value;
  bound_[static_cast<std::size_t>(slot)] = 1;
  trail_.push_back(slot);
}

void WorldBuilder::undo(std::size_t mark) {
  while (trail_.size() > mark) {
    bound_[static_cast<std::size_t>(trail_.back())] = 0;
    trail_.pop_back();
  }
}

void WorldBuilder::count_step() {
  if (++steps_ > model_->derivation_limit()) {
    throw Error(ErrorKind::DepthLimit, "derivation limit of " + std::to_string(model_->derivation_limit()) +
                                           " steps exceeded (recursion without time progression?)");
  }
}

bool WorldBuilder::resolve(const Term& t, Term& out) {
  switch (t.kind()) {
    case TermKind::Variable:
      if (bound_[static_cast<std::size_t>(t.slot())]) {
        out = slots_[static_cast<std::size_t>(t.slot())];
      } else {
        out = t;
      }
      return true;
    case TermKind::Constant:
    case TermKind::Integer:
    case TermKind::Real:
      out = t;
      return true;
    case TermKind::Eval: {
      Term inner;
      if (!resolve(t.inner(), inner)) return false;
      if (!inner.is_ground()) {
        throw Error(ErrorKind::UnboundVariable, "random variable " + to_string(inner) + " is not ground");
      }
      int pred = inner.is_callable() ? model_->pred_id(pred_key(inner)) : -1;
      if (pred < 0) return false;
      const Layer* l = lookup_layer(pred, inner, false);
      if (!l) return false;
      const Term* v = l->rvs[static_cast<std::size_t>(pred)].find(inner);
      if (!v) return false;
      out = *v;
      return true;
    }
    case TermKind::Compound:
      break;
  }
  if (t.is_arithmetic()) {
    Term a, b;
    if (!resolve(t.args()[0], a) || !resolve(t.args()[1], b)) return false;
    if (!a.is_ground() || !b.is_ground()) {
      throw Error(ErrorKind::UnboundVariable, "arithmetic over unbound variable in " + to_string(t));
    }
    out = arithmetic(t.name(), a, b);
    return true;
  }
  std::vector<Term> args(t.args().size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!resolve(t.args()[i], args[i])) return false;
  }
  out = Term::compound(t.name(), std::move(args));
  return true;
}

bool WorldBuilder::resolve_ground(const Term& t, Term& out, const detail::CompiledLiteral* lit) {
  if (!resolve(t, out)) return false;
  if (!out.is_ground()) {
    std::string where = lit ? " in literal at line " + std::to_string(lit->loc.line) : std::string();
    throw Error(ErrorKind::UnboundVariable, "unbound variable in " + to_string(out) + where);
  }
  return true;
}

bool WorldBuilder::unify(const Term& pattern, const Term& value) {
  if (pattern.is_variable()) {
    auto s = static_cast<std::size_t>(pattern.slot());
    if (bound_[s]) return same_value(slots_[s], value);
    bind(pattern.slot(), value);
    return true;
  }
  if (pattern.is_compound()) {
    if (!value.is_compound() || pattern.name() != value.name() || pattern.arity() != value.arity()) return false;
    for (std::size_t i = 0; i < pattern.arity(); ++i) {
      if (!unify(pattern.args()[i], value.args()[i])) return false;
    }
    return true;
  }
  return same_value(pattern, value);
}

const Layer* WorldBuilder::lookup_layer(int pred, const Term& atom, bool negated) {
  if (!model_->is_dynamic(pred)) return &world_.timeless_;
  if (atom.arity() == 0) return nullptr;
  const Term& time = atom.args().back();
  if (time.kind() != TermKind::Integer) return nullptr;
  std::int64_t t = time.as_int();
  if (t < 0) return nullptr;
  if (t > t_) {
    if (negated) {
      throw Error(ErrorKind::Model, "negated literal " + to_string(atom) + " refers to a time not yet derived");
    }
    return nullptr;
  }
  return &world_.layers_[static_cast<std::size_t>(t)];
}

void WorldBuilder::solve(const detail::CompiledClause& c, std::size_t i) {
  if (i == c.body.size()) {
    emit(c);
    return;
  }
  const detail::CompiledLiteral& lit = c.body[i];
  switch (lit.kind) {
    case Literal::Kind::Positive: {
      if (lit.truth) {
        if (lit.atom.name() == sym::true_()) solve(c, i + 1);
        return;
      }
      if (lit.between) {
        Term lo, hi, x;
        if (!resolve_ground(lit.atom.args()[0], lo, &lit) || !resolve_ground(lit.atom.args()[1], hi, &lit)) return;
        if (!resolve(lit.atom.args()[2], x)) return;
        if (!lo.is_number() || !hi.is_number()) {
          throw Error(ErrorKind::Model, "between/3 needs numeric bounds, got " + to_string(lit.atom));
        }
        auto first = static_cast<std::int64_t>(std::ceil(lo.number()));
        auto last = static_cast<std::int64_t>(std::floor(hi.number()));
        if (x.is_ground()) {
          if (x.is_number() && x.number() == std::floor(x.number()) && x.number() >= static_cast<double>(first) &&
              x.number() <= static_cast<double>(last)) {
            solve(c, i + 1);
          }
          return;
        }
        if (!x.is_variable()) throw Error(ErrorKind::UnboundVariable, "between/3 cannot bind " + to_string(x));
        std::size_t mark = trail_.size();
        for (std::int64_t k = first; k <= last; ++k) {
          count_step();
          bind(x.slot(), Term::integer(k));
          solve(c, i + 1);
          undo(mark);
        }
        return;
      }
      Term pattern;
      if (!resolve(lit.atom, pattern)) return;
      auto pred = static_cast<std::size_t>(lit.pred);
      auto scan_table = [&](const GroundTable& table) {
        if (pattern.is_ground()) {
          if (table.contains(pattern)) solve(c, i + 1);
          return;
        }
        std::size_t mark = trail_.size();
        for (std::size_t j = 0; j < table.size(); ++j) {
          bool ok = unify(pattern, table.key(j));
          if (ok) solve(c, i + 1);
          undo(mark);
        }
      };
      if (model_->is_dynamic(lit.pred) && pattern.arity() > 0 && pattern.args().back().is_variable()) {
        for (int t = 0; t <= t_; ++t) scan_table(world_.layers_[static_cast<std::size_t>(t)].facts[pred]);
        return;
      }
      const Layer* l = lookup_layer(lit.pred, pattern, false);
      if (l) scan_table(l->facts[pred]);
      return;
    }
    case Literal::Kind::Negative: {
      if (lit.truth) {
        if (lit.atom.name() == sym::false_()) solve(c, i + 1);
        return;
      }
      Term atom;
      if (!resolve(lit.atom, atom)) return;
      if (!atom.is_ground()) {
        throw Error(ErrorKind::UnboundVariable, "negated literal not " + to_string(atom) + " is not ground");
      }
      if (lit.pred < 0) {
        solve(c, i + 1);
        return;
      }
      const Layer* l = lookup_layer(lit.pred, atom, true);
      if (!l || !l->facts[static_cast<std::size_t>(lit.pred)].contains(atom)) solve(c, i + 1);
      return;
    }
    case Literal::Kind::Compare: {
      if (lit.op == CompareOp::Eq) {
        const Term* var = nullptr;
        const Term* other = nullptr;
        if (lit.atom.is_variable() && !bound_[static_cast<std::size_t>(lit.atom.slot())]) {
          var = &lit.atom;
          other = &lit.rhs;
        } else if (lit.rhs.is_variable() && !bound_[static_cast<std::size_t>(lit.rhs.slot())]) {
          var = &lit.rhs;
          other = &lit.atom;
        }
        if (var) {
          Term value;
          if (!resolve_ground(*other, value, &lit)) return;
          std::size_t mark = trail_.size();
          bind(var->slot(), value);
          solve(c, i + 1);
          undo(mark);
          return;
        }
      }
      Term a, b;
      if (!resolve_ground(lit.atom, a, &lit) || !resolve_ground(lit.rhs, b, &lit)) return;
      if (compare_values(lit.op, a, b)) solve(c, i + 1);
      return;
    }
  }
}

Layer& WorldBuilder::target_layer(const detail::CompiledClause& c) {
  if (!c.dynamic) return world_.timeless_;
  return world_.layers_[static_cast<std::size_t>(t_)];
}

std::optional<Term> WorldBuilder::draw_value(const detail::CompiledClause& c, const Term& head) {
  auto pred = static_cast<std::size_t>(c.head_pred);
  if (c.dynamic) {
    if (const Term* memo = memo_[pred].find(head)) return *memo;
  }
  const GroundDistribution* gd = c.fixed ? &*c.fixed : nullptr;
  GroundDistribution local;
  if (!gd) {
    const Distribution& d = *c.dist;
    std::vector<Term> params(d.params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!resolve_ground(d.params[i], params[i], nullptr)) return std::nullopt;
    }
    std::vector<std::pair<Term, Term>> outcomes(d.outcomes.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (!resolve_ground(d.outcomes[i].weight, outcomes[i].first, nullptr) ||
          !resolve_ground(d.outcomes[i].value, outcomes[i].second, nullptr)) {
        return std::nullopt;
      }
    }
    local = make_ground(d, params, outcomes);
    gd = &local;
  }
  for (const auto& rule : evidence_) {
    if (rule.is_rv && rule.pred == c.head_pred && same_value(rule.target, head)) {
      world_.weight_ *= density(*gd, rule.value);
      return rule.value;
    }
  }
  switch (gd->family) {
    case Distribution::Family::Delta:
      return gd->point;
    case Distribution::Family::Discrete:
      return gd->values[chooser_->pick(gd->weights)];
    default:
      return chooser_->draw(*gd);
  }
}

void WorldBuilder::emit(const detail::CompiledClause& c) {
  count_step();  // every rule application, new or not
  Term head;
  if (!resolve(c.head, head)) return;
  if (!head.is_ground()) {
    throw Error(ErrorKind::UnboundVariable, "head " + to_string(head) + " is not ground after its body holds");
  }
  if (deeper_than(head, kMaxTermDepth)) {
    throw Error(ErrorKind::DepthLimit, "derived term nesting exceeds " + std::to_string(kMaxTermDepth) +
                                           " levels in " + std::string(model_->pred(c.head_pred).name.str()) +
                                           " (recursion without time progression?)");
  }
  if (c.dynamic) {
    const Term& time = head.args().back();
    if (time.kind() != TermKind::Integer || time.as_int() != t_) return;
  }
  Layer& layer = target_layer(c);
  auto pred = static_cast<std::size_t>(c.head_pred);
  switch (c.kind) {
    case Clause::Kind::Rule:
      if (layer.facts[pred].insert(head)) changed_ = true;
      return;
    case Clause::Kind::ProbFact: {
      if (layer.facts[pred].contains(head)) return;
      GroundTable& coins = world_.coins_[c.id];
      bool value;
      if (const Term* drawn = coins.find(head)) {
        value = is_true_const(*drawn);
      } else {
        const EvidenceRule* clamp = nullptr;
        for (const auto& rule : evidence_) {
          if (rule.clamp_coin && rule.clause == c.id && same_value(rule.target, head)) clamp = &rule;
        }
        if (clamp) {
          value = is_true_const(clamp->value);
          world_.weight_ *= value ? c.prob : 1.0 - c.prob;
        } else {
          value = chooser_->coin(c.prob);
        }
        coins.insert(head, Term::boolean(value));
      }
      if (value && layer.facts[pred].insert(head)) changed_ = true;
      return;
    }
    case Clause::Kind::Dist: {
      if (layer.rvs[pred].contains(head)) return;
      auto value = draw_value(c, head);
      if (!value) return;  // a parameter refers to an undefined rv
      layer.rvs[pred].insert(head, *value);
      changed_ = true;
      return;
    }
  }
}

// ---------------------------------------------------------------- queries

World sample_world(std::shared_ptr<const Model> model, int horizon, Seed seed, const Evidence& evidence) {
  if (horizon < 0) throw Error(ErrorKind::Argument, "horizon must be non-negative");
  SamplingChooser chooser(seed);
  WorldBuilder builder(std::move(model), evidence);
  builder.begin(chooser);
  for (int t = 0; t <= horizon; ++t) builder.build_layer(t);
  builder.finish();
  return builder.take();
}

World sample_world(const Program& program, int horizon, Seed seed) {
  return sample_world(Model::compile(program.clauses), horizon, seed);
}

namespace {

using Env = std::vector<std::pair<Symbol, Term>>;

std::optional<Term> eval_term(const World& w, const Term& t, int time, const Env& env) {
  switch (t.kind()) {
    case TermKind::Variable:
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        if (it->first == t.name()) return it->second;
      }
      throw Error(ErrorKind::UnboundVariable, "free variable " + std::string(t.name().str()) + " in formula");
    case TermKind::Constant:
    case TermKind::Integer:
    case TermKind::Real:
      return t;
    case TermKind::Eval: {
      auto inner = eval_term(w, t.inner(), time, env);
      if (!inner) return std::nullopt;
      auto [pred, full] = w.model().resolve_atom(*inner, time);
      if (pred < 0) return std::nullopt;
      const Term* v = w.rv_value(full);
      if (!v) return std::nullopt;
      return *v;
    }
    case TermKind::Compound:
      break;
  }
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) {
    auto v = eval_term(w, a, time, env);
    if (!v) return std::nullopt;
    args.push_back(std::move(*v));
  }
  if (t.is_arithmetic()) return arithmetic(t.name(), args[0], args[1]);
  return Term::compound(t.name(), std::move(args));
}

bool eval_formula(const World& w, const Formula& f, int t, const std::vector<Symbol>& domain, Env& env) {
  switch (f.kind) {
    case Formula::Kind::True:
      return true;
    case Formula::Kind::False:
      return false;
    case Formula::Kind::Atom: {
      auto atom = eval_term(w, f.lhs, t, env);
      if (!atom) return false;
      if (atom->is_constant() && atom->name() == sym::true_()) return true;
      if (atom->is_constant() && atom->name() == sym::false_()) return false;
      auto [pred, full] = w.model().resolve_atom(*atom, t);
      if (pred < 0) return false;
      return w.has_fact(full);
    }
    case Formula::Kind::Compare: {
      auto a = eval_term(w, f.lhs, t, env);
      auto b = eval_term(w, f.rhs, t, env);
      if (!a || !b) return false;
      return compare_values(f.op, *a, *b);
    }
    case Formula::Kind::Not:
      return !eval_formula(w, f.children[0], t, domain, env);
    case Formula::Kind::And:
      return eval_formula(w, f.children[0], t, domain, env) && eval_formula(w, f.children[1], t, domain, env);
    case Formula::Kind::Or:
      return eval_formula(w, f.children[0], t, domain, env) || eval_formula(w, f.children[1], t, domain, env);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      if (domain.empty()) {
        throw Error(ErrorKind::Argument, "quantifier over " + std::string(f.var.str()) + " needs an object domain");
      }
      bool exists = f.kind == Formula::Kind::Exists;
      for (Symbol o : domain) {
        env.emplace_back(f.var, Term::constant(o));
        bool v = eval_formula(w, f.children[0], t, domain, env);
        env.pop_back();
        if (v == exists) return exists;
      }
      return !exists;
    }
  }
  return false;
}

}  // namespace

bool holds(const World& world, const Formula& formula, int t, const std::vector<Symbol>& domain) {
  if (t < 0 || t > world.horizon()) {
    throw Error(ErrorKind::Argument,
                "time " + std::to_string(t) + " outside horizon 0.." + std::to_string(world.horizon()));
  }
  Env env;
  return eval_formula(world, formula, t, domain, env);
}

std::optional<Term> evaluate(const World& world, const Term& term, int t) {
  return eval_term(world, term, t, Env{});
}

}  // namespace ppw
