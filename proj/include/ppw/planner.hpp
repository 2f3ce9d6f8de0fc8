#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ppw/rng.hpp"
#include "ppw/world.hpp"

namespace ppw {

struct PlanConfig {
  int horizon = 5;
  double discount = 0.95;
  std::size_t rollouts = 100;  // per (state, action)
  int max_depth = -1;          // lookahead depth; negative means the horizon
  Seed seed;
};

/// Mapping from (StateKey, time) to ground actions. Keys that were never
/// planned for map to the no-op.
struct Policy {
  std::map<std::pair<std::string, int>, Term> actions;
  Term default_action = Term::constant(sym::noop());
  double value = 0.0;      // estimated V(s0, 0)
  double std_error = 0.0;  // of `value`
  Term first_action = Term::constant(sym::noop());
  std::size_t states_expanded = 0;

  const Term& action_for(const std::string& key, int t) const;
};

struct PolicyEvaluation {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t episodes = 0;
};

/// Ground actions a with poss(a, t) in the world, ordered by canonical text.
std::vector<Term> applicable_actions(const World& world, int t);

/// Sum of N over the reward(N, t) facts of the world.
double reward_of(const World& world, int t);

/// Sparse-sampling lookahead. V(s, H) is the reward at the horizon;
/// V(s, t) = max_a mean_i [r_t(s, a) + discount * V(s'_i, t + 1)] over
/// `rollouts` sampled successors, memoized on (state key, t).
Policy plan(std::shared_ptr<const Model> model, const PlanConfig& config);

/// Mean discounted return sum_t discount^t r_t of episodes that follow the
/// policy, with the standard error of the mean.
PolicyEvaluation evaluate_policy(std::shared_ptr<const Model> model, const Policy& policy, std::size_t episodes,
                                 const PlanConfig& config);

}  // namespace ppw
