// ppw: query, plan, run and check `.dcl` documents. Prints one JSON report
// per invocation (or a table with --pretty); diagnostics are also written
// to stderr as JSON lines.

#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "ppw/report.hpp"

namespace {

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("PP_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "ppw: ignoring non-numeric PP_SEED\n";
    }
  }
  return 0;
}

int emit(const ppw::RunReport& report, bool pretty) {
  for (const auto& d : report.diagnostics) std::cerr << ppw::diagnostic_json(d).dump() << '\n';
  if (pretty) {
    std::cout << report.pretty();
  } else {
    std::cout << report.to_json().dump() << '\n';
  }
  return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic planning workbench"};
  app.require_subcommand(1);
  bool pretty = false;
  std::optional<std::uint64_t> seed;
  auto common = [&](CLI::App* cmd) {
    cmd->add_flag("--pretty", pretty, "Human-readable table instead of JSON");
    cmd->add_option("--seed", seed, "Master seed (falls back to $PP_SEED, then 0)");
  };

  ppw::QueryArgs q;
  auto* query = app.add_subcommand("query", "Probability of a formula");
  query->add_option("file", q.file, ".dcl document")->required();
  query->add_option("query", q.query, "Formula, e.g. 'inRoom(c)'")->required();
  query->add_option("--samples", q.samples, "Likelihood-weighted samples")->capture_default_str();
  query->add_option("--horizon", q.horizon, "Time point the query refers to")->capture_default_str();
  query->add_flag("--exact", q.exact, "Enumerate worlds instead of sampling");
  query->add_option("--evidence", q.evidence, "Observation such as 'pos(c) = 1.2' (repeatable)");
  query->add_option("--threads", q.threads, "Sampling threads")->capture_default_str();

  ppw::PlanArgs p;
  auto* plan = app.add_subcommand("plan", "Sparse-sampling policy for the reward model");
  plan->add_option("file", p.file, ".dcl document")->required();
  plan->add_option("--horizon", p.horizon, "Planning horizon")->capture_default_str();
  plan->add_option("--discount", p.discount, "Discount factor")->capture_default_str();
  plan->add_option("--rollouts", p.rollouts, "Sampled successors per state and action")->capture_default_str();
  plan->add_option("--max-depth", p.max_depth, "Lookahead depth (negative: the horizon)")->capture_default_str();
  plan->add_option("--episodes", p.episodes, "Policy evaluation episodes")->capture_default_str();

  ppw::RunArgs r;
  auto* run = app.add_subcommand("run", "Execute the #control program over a belief state");
  run->add_option("file", r.file, ".dcl document")->required();
  run->add_option("--particles", r.particles, "Belief particles")->capture_default_str();
  run->add_option("--theta", r.theta, "Degree of belief needed for tests to pass")->capture_default_str();
  run->add_option("--depth", r.depth, "Maximum number of primitive actions")->capture_default_str();
  run->add_option("--member", r.member, "Prior family member to start from")->capture_default_str();
  run->add_flag("--interval", r.interval, "Report [lo, hi] over the prior family for each query");
  run->add_option("--query", r.queries, "Formula to evaluate on the final belief (repeatable)");

  ppw::CheckArgs c;
  auto* check = app.add_subcommand("check", "Parse and validate only");
  check->add_option("file", c.file, ".dcl document")->required();

  for (auto* cmd : {query, plan, run, check}) common(cmd);

  CLI11_PARSE(app, argc, argv);

  std::uint64_t s = resolve_seed(seed);
  if (*query) return emit(ppw::cmd_query(q, s), pretty);
  if (*plan) return emit(ppw::cmd_plan(p, s), pretty);
  if (*run) return emit(ppw::cmd_run(r, s), pretty);
  return emit(ppw::cmd_check(c, s), pretty);
}
