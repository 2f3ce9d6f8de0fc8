#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ppw/ast.hpp"
#include "ppw/rng.hpp"
#include "ppw/world.hpp"

namespace ppw {

/// Ground fluents of an action theory (each fluent over domain^arity),
/// numbered densely. Values are stored as doubles: booleans as 0/1,
/// objects as symbol ids.
class ActionModel {
 public:
  static std::shared_ptr<const ActionModel> compile(const ActionTheory& theory);

  const ActionTheory& theory() const { return theory_; }
  const std::vector<Symbol>& domain() const { return theory_.domain; }
  std::size_t fluent_count() const { return fluents_.size(); }
  const Term& fluent(std::size_t i) const { return fluents_[i]; }
  Sort sort(std::size_t i) const { return sorts_[i]; }
  /// Index of a ground fluent term, or -1.
  int index_of(const Term& ground) const;
  std::size_t member_count() const { return std::max<std::size_t>(1, theory_.priors.size()); }

  double encode(const Term& value, Sort sort) const;
  Term decode(double value, Sort sort) const;

  const NoisyDecl* noisy(Symbol action, std::size_t arity) const;
  const LikelihoodModel* likelihood(Symbol action, std::size_t arity) const;

 private:
  ActionTheory theory_;
  std::vector<Term> fluents_;
  std::vector<Sort> sorts_;
  std::unordered_map<Term, int, ValueHash, ValueEq> index_;
};

/// Weighted particles over ground-fluent valuations.
struct BeliefState {
  std::shared_ptr<const ActionModel> model;
  std::size_t member = 0;  // prior family member this belief started from
  std::vector<double> weights;
  std::vector<double> values;  // particle-major: values[i * F + f]

  std::size_t size() const { return weights.size(); }
  double value(std::size_t particle, std::size_t fluent) const {
    return values[particle * model->fluent_count() + fluent];
  }
  Term value_term(std::size_t particle, const Term& fluent) const;
  double effective_sample_size() const;
};

using Valuation = std::unordered_map<Term, Term, ValueHash, ValueEq>;

/// `n` equally weighted particles drawn from prior family member `member`.
/// A theory without priors has one implicit member that sets every fluent
/// to its sort's default (false, 0, 0.0).
BeliefState init_belief(std::shared_ptr<const ActionModel> model, std::size_t member, std::size_t n, Seed seed);

/// Value of `fluent` after the ground `action` under `valuation`: the
/// effect of the unique matching SSA case, else the current value.
/// Throws Error(Model) when two cases match.
Term ssa_value(const ActionModel& model, const Term& fluent, const Term& action, const Valuation& valuation);

/// Applies a physical action. For a noisy action whose actual argument is
/// omitted or a variable, each particle samples the actual from the
/// likelihood model first. Weights are unchanged.
BeliefState progress(const BeliefState& belief, const Term& action, Seed seed);

/// Weights particles by the likelihood of the action's ground actual value,
/// normalizes, and resamples when ESS < N/2. Also applies the action's SSA
/// effects with the observed value.
BeliefState observe(const BeliefState& belief, const Term& action, Seed seed);

/// observe() for actions with a likelihood and a ground actual value,
/// progress() otherwise.
BeliefState execute(const BeliefState& belief, const Term& action, Seed seed);

/// Total weight of particles satisfying a closed formula; quantifiers are
/// expanded over the domain.
double degree_of_belief(const BeliefState& belief, const Formula& formula);

struct BeliefInterval {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> members;  // degree of belief per family member
};

/// Runs the trace from every prior family member and reports the range of
/// the formula's degree of belief.
BeliefInterval belief_interval(std::shared_ptr<const ActionModel> model, const Formula& formula,
                               const std::vector<Term>& trace, std::size_t n_particles, Seed seed);

}  // namespace ppw
