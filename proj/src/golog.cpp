#include "ppw/golog.hpp"

#include <memory>

#include "ppw/error.hpp"
#include "ppw/printer.hpp"

namespace ppw {

std::string_view status_name(Status s) {
  switch (s) {
    case Status::Success:
      return "success";
    case Status::Failure:
      return "failure";
    case Status::DepthExhausted:
      return "depth_exhausted";
  }
  return "failure";
}

Seed step_seed(Seed master, const std::vector<Term>& trace) {
  std::string text;
  for (const auto& a : trace) {
    text += canonical(a);
    text += ';';
  }
  return derive(master, hash_text(text));
}

namespace {

using ExprPtr = std::shared_ptr<const ProgramExpr>;

// Remaining work: a program to run, or a check that the trace has grown
// past a length (keeps loop bodies from iterating without acting).
struct Item {
  ExprPtr expr;
  std::size_t guard = 0;
};

struct Agenda {
  Item item;
  std::shared_ptr<const Agenda> next;
};
using AgendaPtr = std::shared_ptr<const Agenda>;

AgendaPtr push(ExprPtr e, AgendaPtr rest) { return std::make_shared<const Agenda>(Agenda{{std::move(e), 0}, rest}); }

AgendaPtr push_guard(std::size_t len, AgendaPtr rest) {
  return std::make_shared<const Agenda>(Agenda{{nullptr, len}, rest});
}

ExprPtr child(const ExprPtr& parent, std::size_t i) { return ExprPtr(parent, &parent->children[i]); }

ExprPtr make(ProgramExpr e) { return std::make_shared<const ProgramExpr>(std::move(e)); }

class Search {
 public:
  Search(const ExecConfig& config, Outcome& out) : config_(config), out_(out) {}

  bool dfs(const AgendaPtr& agenda, const BeliefState& belief) {
    ++out_.nodes;
    if (!agenda) {
      out_.trace = trace_;
      out_.final_belief = belief;
      return true;
    }
    const Item& item = agenda->item;
    const AgendaPtr& rest = agenda->next;
    if (!item.expr) return trace_.size() > item.guard && dfs(rest, belief);
    const ExprPtr& e = item.expr;
    switch (e->kind) {
      case ProgramExpr::Kind::Prim: {
        if (trace_.size() >= bound_) {
          cut_ = true;
          return false;
        }
        if (!e->action.is_ground()) {
          throw Error(ErrorKind::Argument, "primitive action " + to_string(e->action) + " is not ground");
        }
        trace_.push_back(e->action);
        bool ok = false;
        try {
          BeliefState next = execute(belief, e->action, step_seed(config_.seed, trace_));
          ok = dfs(rest, next);
        } catch (const Error& err) {
          // an observation that no particle explains closes this branch
          if (err.kind() != ErrorKind::ImpossibleEvidence) throw;
        }
        trace_.pop_back();
        return ok;
      }
      case ProgramExpr::Kind::Test:
        return degree_of_belief(belief, e->condition) >= config_.theta && dfs(rest, belief);
      case ProgramExpr::Kind::Seq:
        return dfs(push(child(e, 0), push(child(e, 1), rest)), belief);
      case ProgramExpr::Kind::Choice:
        return dfs(push(child(e, 0), rest), belief) || dfs(push(child(e, 1), rest), belief);
      case ProgramExpr::Kind::Pick:
        for (Symbol o : belief.model->domain()) {
          if (dfs(push(make(substitute(e->children[0], e->var, Term::constant(o))), rest), belief)) return true;
        }
        return false;
      case ProgramExpr::Kind::Star:
        if (dfs(rest, belief)) return true;
        return dfs(push(child(e, 0), push_guard(trace_.size(), push(e, rest))), belief);
      case ProgramExpr::Kind::While: {
        if (dfs(push(make(ProgramExpr::test(Formula::negation(e->condition))), rest), belief)) return true;
        auto body = push(child(e, 0), push_guard(trace_.size(), push(e, rest)));
        return dfs(push(make(ProgramExpr::test(e->condition)), body), belief);
      }
      case ProgramExpr::Kind::If: {
        auto then_part = push(make(ProgramExpr::test(e->condition)), push(child(e, 0), rest));
        if (dfs(then_part, belief)) return true;
        auto else_part = push(make(ProgramExpr::test(Formula::negation(e->condition))), push(child(e, 1), rest));
        return dfs(else_part, belief);
      }
    }
    return false;
  }

  void set_bound(std::size_t b) {
    bound_ = b;
    cut_ = false;
  }
  bool cut() const { return cut_; }

 private:
  const ExecConfig& config_;
  Outcome& out_;
  std::vector<Term> trace_;
  std::size_t bound_ = 0;
  bool cut_ = false;
};

void check_config(const ExecConfig& config) {
  if (config.max_depth < 0) throw Error(ErrorKind::Argument, "search depth must be non-negative");
  if (!(config.theta > 0.0 && config.theta <= 1.0)) throw Error(ErrorKind::Argument, "theta must lie in (0,1]");
}

}  // namespace

Outcome run(const ProgramExpr& program, const BeliefState& belief, const ExecConfig& config) {
  check_config(config);
  Outcome out;
  out.final_belief = belief;
  Search search(config, out);
  auto root = push(make(program), nullptr);
  for (int bound = 0; bound <= config.max_depth; ++bound) {
    search.set_bound(static_cast<std::size_t>(bound));
    if (search.dfs(root, belief)) {
      out.status = Status::Success;
      return out;
    }
    if (!search.cut()) {
      out.status = Status::Failure;
      return out;
    }
  }
  out.status = Status::DepthExhausted;
  return out;
}

Outcome check_plan(const std::vector<Term>& actions, const Formula& goal, const BeliefState& belief,
                   const ExecConfig& config) {
  check_config(config);
  Outcome out;
  out.final_belief = belief;
  if (actions.size() > static_cast<std::size_t>(config.max_depth)) {
    out.status = Status::DepthExhausted;
    return out;
  }
  std::vector<Term> trace;
  BeliefState b = belief;
  for (const auto& a : actions) {
    if (!a.is_ground()) throw Error(ErrorKind::Argument, "plan action " + to_string(a) + " is not ground");
    trace.push_back(a);
    ++out.nodes;
    b = execute(b, a, step_seed(config.seed, trace));
  }
  double degree = degree_of_belief(b, goal);
  out.goal_degree = degree;
  out.trace = trace;
  out.final_belief = std::move(b);
  out.status = degree >= config.theta ? Status::Success : Status::Failure;
  return out;
}

}  // namespace ppw
