#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ppw/analysis.hpp"
#include "ppw/ast.hpp"
#include "ppw/distribution.hpp"
#include "ppw/rng.hpp"

namespace ppw {

/// Hash and equality that agree with same_value(): 1 and 1.0 are one key.
struct ValueHash {
  std::size_t operator()(const Term& t) const noexcept;
};
struct ValueEq {
  bool operator()(const Term& a, const Term& b) const { return same_value(a, b); }
};

/// Insertion-ordered set of ground terms with an optional payload per key.
class GroundTable {
 public:
  const Term* find(const Term& key) const;  // payload, or nullptr
  bool contains(const Term& key) const { return find(key) != nullptr; }
  bool insert(const Term& key, const Term& value = Term());
  void clear();

  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  const Term& key(std::size_t i) const { return keys_[i]; }
  const Term& value(std::size_t i) const { return values_[i]; }

 private:
  static constexpr std::size_t kIndexFrom = 8;
  std::vector<Term> keys_;
  std::vector<Term> values_;
  std::unordered_map<Term, std::uint32_t, ValueHash, ValueEq> index_;
};

/// One time slice: derived facts and random-variable values, both grouped
/// by predicate id.
struct Layer {
  std::vector<GroundTable> facts;
  std::vector<GroundTable> rvs;

  void reset(std::size_t preds);
};

namespace detail {

struct CompiledLiteral {
  Literal::Kind kind = Literal::Kind::Positive;
  Term atom;
  CompareOp op = CompareOp::Eq;
  Term rhs;
  int pred = -1;
  bool between = false;
  bool truth = false;  // `true` / `false` as a body atom
  SourceLoc loc;
};

struct CompiledClause {
  std::size_t id = 0;
  Clause::Kind kind = Clause::Kind::Rule;
  double prob = 1.0;
  Term head;
  int head_pred = -1;
  bool dynamic = false;
  TimeArg::Kind time_kind = TimeArg::Kind::Absent;
  int time_slot = -1;
  std::int64_t time_offset = 0;
  std::optional<Distribution> dist;
  std::optional<GroundDistribution> fixed;  // parameters known at compile time
  std::vector<CompiledLiteral> body;
  int nvars = 0;
  SourceLoc loc;
};

struct CompiledStratum {
  std::vector<std::size_t> clauses;
  bool recursive = false;
};

}  // namespace detail

/// A clause list prepared for repeated sampling: predicates numbered,
/// variables slotted, bodies ordered so filters follow their generators.
class Model {
 public:
  /// Throws Error(Model) when the clause list cannot be stratified.
  static std::shared_ptr<const Model> compile(const std::vector<Clause>& clauses,
                                              std::size_t derivation_limit = 10000);

  int pred_id(const PredKey& key) const;  // -1 when unknown
  const PredKey& pred(int id) const { return preds_[static_cast<std::size_t>(id)]; }
  std::size_t pred_count() const { return preds_.size(); }
  bool is_dynamic(int id) const { return dynamic_[static_cast<std::size_t>(id)]; }
  /// Ground rv heads defined by Dist clauses, and atoms produced by clauses.
  bool is_rv_pred(int id) const { return rv_pred_[static_cast<std::size_t>(id)]; }
  /// True when some distribution is continuous or has unbounded support.
  bool has_infinite_support() const { return infinite_support_; }
  std::size_t derivation_limit() const { return derivation_limit_; }

  const std::vector<detail::CompiledClause>& clauses() const { return clauses_; }
  const std::vector<detail::CompiledStratum>& static_strata() const { return static_strata_; }
  const std::vector<detail::CompiledStratum>& dynamic_strata() const { return dynamic_strata_; }

  /// Resolves a query atom to (pred id, atom with time argument), appending
  /// `t` when the atom names a time-indexed predicate without its time.
  std::pair<int, Term> resolve_atom(const Term& atom, int t) const;

 private:
  int intern(const PredKey& key);

  std::vector<PredKey> preds_;
  std::unordered_map<PredKey, int> ids_;
  std::vector<bool> dynamic_;
  std::vector<bool> rv_pred_;
  std::vector<detail::CompiledClause> clauses_;
  std::vector<detail::CompiledStratum> static_strata_;
  std::vector<detail::CompiledStratum> dynamic_strata_;
  bool infinite_support_ = false;
  std::size_t derivation_limit_ = 10000;
};

/// Source of every random choice made while building a world. Sampling
/// draws from an Rng; exact enumeration replays and extends a choice prefix.
class Chooser {
 public:
  virtual ~Chooser() = default;
  virtual bool coin(double p) = 0;
  virtual std::size_t pick(const std::vector<double>& weights) = 0;
  /// Continuous or unbounded discrete draw.
  virtual Term draw(const GroundDistribution& d) = 0;
};

class SamplingChooser : public Chooser {
 public:
  explicit SamplingChooser(Seed seed) : rng_(make_rng(seed)) {}
  void reseed(Seed seed) { rng_.seed(seed.value); }

  bool coin(double p) override;
  std::size_t pick(const std::vector<double>& weights) override;
  Term draw(const GroundDistribution& d) override { return sample(d, rng_); }

 private:
  Rng rng_;
};

/// Observed value of a random variable (`pos(c) = 1.2`) or atom (`a = true`).
struct EvidenceItem {
  Term target;
  Term value;
};
using Evidence = std::vector<EvidenceItem>;

/// One sampled trajectory: time-independent facts plus layers 0..horizon.
class World {
 public:
  World() = default;
  explicit World(std::shared_ptr<const Model> model);

  const Model& model() const { return *model_; }
  std::shared_ptr<const Model> model_ptr() const { return model_; }
  int horizon() const { return static_cast<int>(layers_.size()) - 1; }
  double weight() const { return weight_; }

  const Layer& timeless() const { return timeless_; }
  const Layer& layer(int t) const { return layers_.at(static_cast<std::size_t>(t)); }

  /// Atom or rv lookup; dynamic atoms carry their time as last argument.
  bool has_fact(const Term& atom) const;
  const Term* rv_value(const Term& rv) const;

  /// All facts and rv values visible at time t (timeless first), as text.
  std::vector<Term> facts_at(int t) const;
  std::vector<std::pair<Term, Term>> rvs_at(int t) const;

  /// Canonical state at time t: sorted facts and rv values of the layer and
  /// the timeless part, reals rounded to 1e-9; poss/reward are excluded.
  std::string state_key(int t) const;

 private:
  friend class WorldBuilder;

  const Layer* layer_for(int pred, const Term& atom) const;

  std::shared_ptr<const Model> model_;
  Layer timeless_;
  std::vector<Layer> layers_;
  std::vector<GroundTable> coins_;  // per clause id: ground head -> drawn coin
  double weight_ = 1.0;
};

/// Bottom-up world construction: the timeless part first, then one layer at
/// a time. A layer may be rebuilt with an action fact seeded; draws already
/// made in the layer are reused.
class WorldBuilder {
 public:
  explicit WorldBuilder(std::shared_ptr<const Model> model, const Evidence& evidence = {});

  /// Starts a fresh world and derives its time-independent part.
  void begin(Chooser& chooser);
  /// Continues from an existing world (e.g. a planner state).
  void resume(World world, Chooser& chooser);
  /// (Re)derives layer t; when `action` is given, `action(args..., t)` is
  /// asserted first. Layers up to t-1 must exist.
  void build_layer(int t, const Term* action = nullptr);
  /// Applies the end-of-world evidence checks to the weight.
  void finish();

  World& world() { return world_; }
  const World& world() const { return world_; }
  World take() { return std::move(world_); }

 private:
  struct EvidenceRule {
    int pred = -1;
    Term target;
    Term value;
    bool is_rv = false;
    bool clamp_coin = false;
    std::size_t clause = 0;
  };

  void run_strata(const std::vector<detail::CompiledStratum>& strata, int t);
  void run_clause(const detail::CompiledClause& c, int t);
  void solve(const detail::CompiledClause& c, std::size_t i);
  void emit(const detail::CompiledClause& c);
  Layer& target_layer(const detail::CompiledClause& c);
  std::optional<Term> draw_value(const detail::CompiledClause& c, const Term& head);
  bool resolve(const Term& t, Term& out);
  bool resolve_ground(const Term& t, Term& out, const detail::CompiledLiteral* lit);
  bool unify(const Term& pattern, const Term& value);
  void bind(int slot, const Term& value);
  void undo(std::size_t mark);
  const Layer* lookup_layer(int pred, const Term& atom, bool negated);
  void count_step();

  std::shared_ptr<const Model> model_;
  std::vector<EvidenceRule> evidence_;
  World world_;
  Chooser* chooser_ = nullptr;
  std::vector<GroundTable> memo_;  // rvs of the layer being rebuilt
  int t_ = -1;
  bool timeless_pass_ = false;
  std::size_t steps_ = 0;
  bool changed_ = false;
  std::vector<Term> slots_;
  std::vector<char> bound_;
  std::vector<int> trail_;
};

/// Ancestral sample of the program's clauses for times 0..horizon.
World sample_world(const Program& program, int horizon, Seed seed);
World sample_world(std::shared_ptr<const Model> model, int horizon, Seed seed, const Evidence& evidence = {});

/// Truth of a closed formula at time t. Quantifiers range over `domain`;
/// Error(Argument) when t exceeds the world's horizon or a quantifier has
/// no domain.
bool holds(const World& world, const Formula& formula, int t, const std::vector<Symbol>& domain = {});

/// Evaluates arithmetic and `~=` in a ground term; nullopt when it refers
/// to an rv that is undefined in the world.
std::optional<Term> evaluate(const World& world, const Term& term, int t);

}  // namespace ppw
