#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ppw/ast.hpp"
#include "ppw/belief.hpp"
#include "ppw/rng.hpp"

namespace ppw {

struct ExecConfig {
  int max_depth = 25;  // bound on the number of primitive actions
  double theta = 0.999;
  std::size_t particles = 10000;
  Seed seed;
};

enum class Status { Success, Failure, DepthExhausted };

std::string_view status_name(Status s);

struct Outcome {
  Status status = Status::Failure;
  std::vector<Term> trace;
  BeliefState final_belief;
  std::optional<double> goal_degree;  // check_plan: degree of belief in the goal
  std::size_t nodes = 0;              // search steps taken
};

/// Seed used for the step that executes the last action of `trace`.
Seed step_seed(Seed master, const std::vector<Term>& trace);

/// Executes a control program by iterative-deepening depth-first search on
/// the trace length. Tests pass when the degree of belief reaches theta;
/// Pick enumerates the domain in declared order; Star tries zero
/// iterations first. Failure means no execution exists; DepthExhausted
/// means none was found within max_depth actions.
Outcome run(const ProgramExpr& program, const BeliefState& belief, const ExecConfig& config);

/// run() of `a1; ...; an; ?(goal)`, reporting the goal's final degree.
Outcome check_plan(const std::vector<Term>& actions, const Formula& goal, const BeliefState& belief,
                   const ExecConfig& config);

}  // namespace ppw
