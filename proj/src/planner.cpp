#include "ppw/planner.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "ppw/error.hpp"

namespace ppw {

const Term& Policy::action_for(const std::string& key, int t) const {
  auto it = actions.find({key, t});
  return it == actions.end() ? default_action : it->second;
}

std::vector<Term> applicable_actions(const World& world, int t) {
  int pred = world.model().pred_id(PredKey{sym::poss(), 2});
  std::vector<std::pair<std::string, Term>> found;
  if (pred >= 0) {
    const GroundTable& table = world.layer(t).facts[static_cast<std::size_t>(pred)];
    for (std::size_t i = 0; i < table.size(); ++i) {
      const Term& action = table.key(i).args()[0];
      found.emplace_back(canonical(action), action);
    }
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Term> out;
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (i > 0 && found[i].first == found[i - 1].first) continue;
    out.push_back(found[i].second);
  }
  return out;
}

double reward_of(const World& world, int t) {
  int pred = world.model().pred_id(PredKey{sym::reward(), 2});
  if (pred < 0) return 0.0;
  const GroundTable& table = world.layer(t).facts[static_cast<std::size_t>(pred)];
  double total = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const Term& value = table.key(i).args()[0];
    if (!value.is_number()) throw Error(ErrorKind::Model, "non-numeric reward " + to_string(table.key(i)));
    total += value.number();
  }
  return total;
}

namespace {

struct Estimate {
  double value = 0.0;
  double variance = 0.0;  // squared standard error
};

// Mean of sampled returns plus the propagated error of shared child estimates.
struct Accumulator {
  std::vector<double> samples;
  std::unordered_map<std::string, std::pair<std::size_t, double>> children;  // key -> (count, child variance)

  void add(double q, const std::string& child, double child_variance) {
    samples.push_back(q);
    auto& c = children[child];
    c.first++;
    c.second = child_variance;
  }

  Estimate result(double discount) const {
    auto n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double q : samples) mean += q;
    mean /= n;
    double ss = 0.0;
    for (double q : samples) ss += (q - mean) * (q - mean);
    double var = samples.size() > 1 ? ss / (n - 1.0) / n : 0.0;
    for (const auto& [key, c] : children) {
      double share = static_cast<double>(c.first) / n;
      var += discount * discount * share * share * c.second;
    }
    return {mean, var};
  }
};

class Planner {
 public:
  Planner(std::shared_ptr<const Model> model, const PlanConfig& config, Policy& policy)
      : model_(std::move(model)), config_(config), policy_(policy), builder_(model_), chooser_(config.seed) {
    depth_ = config.max_depth < 0 ? config.horizon : std::min(config.max_depth, config.horizon);
  }

  Estimate value(const World& world, const std::string& key, int t) {
    auto memo = memo_.find({key, t});
    if (memo != memo_.end()) return memo->second;
    Estimate out;
    if (t >= depth_) {
      out = {reward_of(world, t), 0.0};
      memo_.emplace(std::make_pair(key, t), out);
      return out;
    }
    ++policy_.states_expanded;
    std::vector<Term> actions = applicable_actions(world, t);
    if (actions.empty()) actions.push_back(policy_.default_action);
    bool have_best = false;
    Term best_action;
    for (const auto& action : actions) {
      Seed base = derive(config_.seed, hash_text(key + '|' + std::to_string(t) + '|' + canonical(action)));
      Accumulator acc;
      for (std::size_t i = 0; i < config_.rollouts; ++i) {
        chooser_.reseed(derive(base, i));
        builder_.resume(world, chooser_);
        builder_.build_layer(t, &action);
        double r = reward_of(builder_.world(), t);
        builder_.build_layer(t + 1);
        World next = builder_.take();
        std::string next_key = next.state_key(t + 1);
        Estimate child = value(next, next_key, t + 1);
        acc.add(r + config_.discount * child.value, next_key, child.variance);
      }
      Estimate q = acc.result(config_.discount);
      if (!have_best || q.value > out.value) {
        have_best = true;
        out = q;
        best_action = action;
      }
    }
    if (!(best_action.is_constant() && best_action.name() == sym::noop())) {
      policy_.actions[{key, t}] = best_action;
    }
    memo_.emplace(std::make_pair(key, t), out);
    return out;
  }

 private:
  std::shared_ptr<const Model> model_;
  PlanConfig config_;
  Policy& policy_;
  WorldBuilder builder_;
  SamplingChooser chooser_;
  int depth_ = 0;
  std::map<std::pair<std::string, int>, Estimate> memo_;
};

void check_config(const PlanConfig& config) {
  if (config.horizon < 0) throw Error(ErrorKind::Argument, "horizon must be non-negative");
  if (!(config.discount >= 0.0 && config.discount <= 1.0)) {
    throw Error(ErrorKind::Argument, "discount must lie in [0,1]");
  }
  if (config.rollouts < 1) throw Error(ErrorKind::Argument, "rollouts must be at least 1");
}

}  // namespace

Policy plan(std::shared_ptr<const Model> model, const PlanConfig& config) {
  check_config(config);
  Policy policy;
  Planner planner(model, config, policy);
  WorldBuilder builder(model);
  SamplingChooser chooser(config.seed);
  Seed roots = derive(config.seed, hash_text("initial states"));
  Accumulator acc;
  for (std::size_t i = 0; i < config.rollouts; ++i) {
    chooser.reseed(derive(roots, i));
    builder.begin(chooser);
    builder.build_layer(0);
    World start = builder.take();
    std::string key = start.state_key(0);
    Estimate v = planner.value(start, key, 0);
    if (i == 0) policy.first_action = policy.action_for(key, 0);
    acc.add(v.value, key, v.variance);
  }
  // Root samples are values already; the shared-child term carries their error.
  Estimate root = acc.result(1.0);
  policy.value = root.value;
  policy.std_error = std::sqrt(root.variance);
  return policy;
}

PolicyEvaluation evaluate_policy(std::shared_ptr<const Model> model, const Policy& policy, std::size_t episodes,
                                 const PlanConfig& config) {
  check_config(config);
  if (episodes < 1) throw Error(ErrorKind::Argument, "episodes must be at least 1");
  WorldBuilder builder(model);
  SamplingChooser chooser(config.seed);
  Seed base = derive(config.seed, hash_text("policy evaluation"));
  std::vector<double> returns;
  returns.reserve(episodes);
  for (std::size_t e = 0; e < episodes; ++e) {
    chooser.reseed(derive(base, e));
    builder.begin(chooser);
    builder.build_layer(0);
    double total = 0.0, scale = 1.0;
    for (int t = 0; t < config.horizon; ++t) {
      Term action = policy.action_for(builder.world().state_key(t), t);
      builder.build_layer(t, &action);
      total += scale * reward_of(builder.world(), t);
      builder.build_layer(t + 1);
      scale *= config.discount;
    }
    total += scale * reward_of(builder.world(), config.horizon);
    returns.push_back(total);
  }
  PolicyEvaluation out;
  out.episodes = episodes;
  auto n = static_cast<double>(episodes);
  for (double r : returns) out.mean += r;
  out.mean /= n;
  double ss = 0.0;
  for (double r : returns) ss += (r - out.mean) * (r - out.mean);
  out.std_error = episodes > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return out;
}

}  // namespace ppw
