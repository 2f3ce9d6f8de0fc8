#include "ppw/report.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <sstream>

#include "ppw/belief.hpp"
#include "ppw/error.hpp"
#include "ppw/golog.hpp"
#include "ppw/inference.hpp"
#include "ppw/parser.hpp"
#include "ppw/planner.hpp"
#include "ppw/printer.hpp"
#include "ppw/validate.hpp"

namespace ppw {

Json diagnostic_json(const Diagnostic& d) {
  Json j;
  j["severity"] = d.severity == Severity::Error ? "error" : "warning";
  j["message"] = d.message;
  j["line"] = d.loc.line;
  j["column"] = d.loc.column;
  return j;
}

Json RunReport::to_json() const {
  Json j;
  Json cmd;
  cmd["name"] = command;
  for (const auto& [k, v] : echo.items()) cmd[k] = v;
  j["command"] = cmd;
  j["seed"] = seed;
  j["elapsed_ms"] = elapsed_ms;
  j["result"] = result;
  j["diagnostics"] = Json::array();
  for (const auto& d : diagnostics) j["diagnostics"].push_back(diagnostic_json(d));
  return j;
}

namespace {

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

}  // namespace

std::string RunReport::pretty() const {
  std::vector<std::pair<std::string, std::string>> rows;
  rows.emplace_back("command", command);
  rows.emplace_back("seed", std::to_string(seed));
  std::ostringstream ms;
  ms.precision(3);
  ms << std::fixed << elapsed_ms << " ms";
  rows.emplace_back("elapsed", ms.str());
  flatten(result, "", rows);
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  std::ostringstream out;
  for (const auto& [k, v] : rows) out << k << std::string(width - k.size() + 2, ' ') << v << '\n';
  for (const auto& d : diagnostics) out << to_string(d) << '\n';
  return out.str();
}

namespace {

class Session {
 public:
  Session(RunReport& report, std::string command, std::uint64_t seed) : report_(report) {
    report_.command = std::move(command);
    report_.seed = seed;
  }

  void fail(int code, std::string message, SourceLoc loc = {}) {
    report_.diagnostics.push_back({Severity::Error, std::move(message), loc});
    report_.exit_code = code;
  }

  // Reads, parses and validates the document; false with the exit code set
  // when any step fails.
  bool load(const std::string& file, Program& out) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      fail(kExitParse, "cannot read " + file);
      return false;
    }
    std::ostringstream text;
    text << in.rdbuf();
    auto parsed = parse_program(text.str());
    if (!ok(parsed)) {
      for (auto& d : std::get<1>(parsed)) report_.diagnostics.push_back(std::move(d));
      report_.exit_code = kExitParse;
      return false;
    }
    out = std::move(std::get<0>(parsed));
    auto diags = validate(out);
    bool bad = has_errors(diags);
    for (auto& d : diags) report_.diagnostics.push_back(std::move(d));
    if (bad) {
      report_.exit_code = kExitValidate;
      return false;
    }
    return true;
  }

  template <typename T>
  bool parse_arg(Parsed<T> parsed, std::string_view what, T& out) {
    if (!ok(parsed)) {
      for (auto& d : std::get<1>(parsed)) fail(kExitParse, std::string(what) + ": " + d.message, d.loc);
      return false;
    }
    out = std::move(std::get<0>(parsed));
    return true;
  }

  // Runs the body, turning library errors into exit code 3 and recording
  // the wall time.
  void guarded(const std::function<void()>& body) {
    auto start = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const Error& e) {
      report_.result = Json::object();
      fail(kExitInference, e.what());
    } catch (const std::exception& e) {
      report_.result = Json::object();
      fail(kExitInference, e.what());
    }
    auto stop = std::chrono::steady_clock::now();
    report_.elapsed_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  }

 private:
  RunReport& report_;
};

bool parse_evidence(Session& s, const std::string& text, EvidenceItem& out) {
  Formula f;
  if (!s.parse_arg(parse_formula(text), "evidence", f)) return false;
  if (f.kind == Formula::Kind::Compare && f.op == CompareOp::Eq) {
    out = {f.lhs, f.rhs};
    return true;
  }
  if (f.kind == Formula::Kind::Atom) {
    out = {f.lhs, Term::constant(sym::true_())};
    return true;
  }
  if (f.kind == Formula::Kind::Not && f.children[0].kind == Formula::Kind::Atom) {
    out = {f.children[0].lhs, Term::constant(sym::false_())};
    return true;
  }
  s.fail(kExitParse, "evidence must be `target = value`, `atom` or `not atom`: " + text);
  return false;
}

std::vector<Symbol> domain_of(const Program& p) { return p.theory ? p.theory->domain : std::vector<Symbol>{}; }

Json term_list(const std::vector<Term>& terms) {
  Json a = Json::array();
  for (const auto& t : terms) a.push_back(to_string(t));
  return a;
}

}  // namespace

RunReport cmd_query(const QueryArgs& args, std::uint64_t seed) {
  RunReport r;
  Session s(r, "query", seed);
  r.echo["file"] = args.file;
  r.echo["query"] = args.query;
  s.guarded([&] {
    Program program;
    if (!s.load(args.file, program)) return;
    Formula query;
    if (!s.parse_arg(parse_formula(args.query), "query", query)) return;
    Evidence evidence;
    for (const auto& e : args.evidence) {
      EvidenceItem item;
      if (!parse_evidence(s, e, item)) return;
      evidence.push_back(std::move(item));
    }
    auto model = Model::compile(program.clauses);
    Json config;
    config["mode"] = args.exact ? "exact" : "sampling";
    config["samples"] = args.samples;
    config["horizon"] = args.horizon;
    config["threads"] = args.threads;
    config["evidence"] = Json::array();
    for (const auto& e : evidence) config["evidence"].push_back(to_string(e.target) + " = " + to_string(e.value));
    Json res;
    res["query"] = to_string(query);
    if (args.exact) {
      res["estimate"] = exact_query(model, query, evidence, args.horizon, domain_of(program));
      res["std_error"] = 0.0;
      res["n_samples"] = 0;
      res["effective_sample_size"] = nullptr;
    } else {
      QueryOptions opts;
      opts.samples = args.samples;
      opts.horizon = args.horizon;
      opts.seed = Seed{seed};
      opts.threads = args.threads;
      opts.domain = domain_of(program);
      QueryResult q = estimate_query(model, query, evidence, opts);
      res["estimate"] = q.estimate;
      res["std_error"] = q.std_error;
      res["n_samples"] = q.n_samples;
      res["effective_sample_size"] = q.effective_sample_size;
    }
    res["config"] = config;
    r.result = res;
  });
  return r;
}

RunReport cmd_plan(const PlanArgs& args, std::uint64_t seed) {
  RunReport r;
  Session s(r, "plan", seed);
  r.echo["file"] = args.file;
  s.guarded([&] {
    Program program;
    if (!s.load(args.file, program)) return;
    if (args.horizon < 0) {
      s.fail(kExitParse, "horizon must be non-negative");
      return;
    }
    auto model = Model::compile(program.clauses);
    PlanConfig cfg;
    cfg.horizon = args.horizon;
    cfg.discount = args.discount;
    cfg.rollouts = args.rollouts;
    cfg.max_depth = args.max_depth;
    cfg.seed = Seed{seed};
    Policy policy = plan(model, cfg);
    PolicyEvaluation eval = evaluate_policy(model, policy, args.episodes, cfg);
    Json res;
    res["first_action"] = to_string(policy.first_action);
    res["value"] = policy.value;
    res["std_error"] = policy.std_error;
    res["states_expanded"] = policy.states_expanded;
    res["policy_size"] = policy.actions.size();
    Json ev;
    ev["mean"] = eval.mean;
    ev["std_error"] = eval.std_error;
    ev["episodes"] = eval.episodes;
    res["evaluation"] = ev;
    Json config;
    config["horizon"] = args.horizon;
    config["discount"] = args.discount;
    config["rollouts"] = args.rollouts;
    config["max_depth"] = args.max_depth;
    config["episodes"] = args.episodes;
    res["config"] = config;
    r.result = res;
  });
  return r;
}

RunReport cmd_run(const RunArgs& args, std::uint64_t seed) {
  RunReport r;
  Session s(r, "run", seed);
  r.echo["file"] = args.file;
  r.echo["queries"] = args.queries;
  s.guarded([&] {
    Program program;
    if (!s.load(args.file, program)) return;
    if (!program.theory) {
      s.fail(kExitValidate, "run requires an #actions section");
      return;
    }
    // without a control program the queries describe the initial belief
    ProgramExpr control = program.control ? *program.control : ProgramExpr::test(Formula::truth(true));
    std::vector<Formula> queries;
    for (const auto& q : args.queries) {
      Formula f;
      if (!s.parse_arg(parse_formula(q), "query", f)) return;
      queries.push_back(std::move(f));
    }
    auto am = ActionModel::compile(*program.theory);
    if (args.member >= am->member_count()) {
      s.fail(kExitValidate, "prior member " + std::to_string(args.member) + " out of range (family has " +
                                std::to_string(am->member_count()) + ")");
      return;
    }
    Seed master{seed};
    BeliefState belief = init_belief(am, args.member, args.particles, derive(master, hash_text("initial belief")));
    ExecConfig cfg;
    cfg.max_depth = args.depth;
    cfg.theta = args.theta;
    cfg.particles = args.particles;
    cfg.seed = derive(master, hash_text("program"));
    Outcome out = run(control, belief, cfg);
    Json res;
    res["status"] = status_name(out.status);
    res["trace"] = term_list(out.trace);
    res["trace_length"] = out.trace.size();
    res["nodes"] = out.nodes;
    res["queries"] = Json::array();
    for (const auto& f : queries) {
      Json q;
      q["formula"] = to_string(f);
      q["degree"] = degree_of_belief(out.final_belief, f);
      if (args.interval) {
        BeliefInterval iv =
            belief_interval(am, f, out.trace, args.particles, derive(master, hash_text("interval " + to_string(f))));
        q["lo"] = iv.lo;
        q["hi"] = iv.hi;
        q["members"] = iv.members;
      }
      res["queries"].push_back(q);
    }
    Json config;
    config["particles"] = args.particles;
    config["theta"] = args.theta;
    config["depth"] = args.depth;
    config["member"] = args.member;
    config["family_size"] = am->member_count();
    config["interval"] = args.interval;
    res["config"] = config;
    r.result = res;
  });
  return r;
}

RunReport cmd_check(const CheckArgs& args, std::uint64_t seed) {
  RunReport r;
  Session s(r, "check", seed);
  r.echo["file"] = args.file;
  s.guarded([&] {
    Program program;
    bool valid = s.load(args.file, program);
    Json res;
    res["valid"] = valid;
    if (r.exit_code != kExitParse) {
      res["clauses"] = program.clauses.size();
      res["fluents"] = program.theory ? program.theory->fluents.size() : 0;
      res["prior_members"] = program.theory ? program.theory->priors.size() : 0;
      res["has_control"] = program.control.has_value();
    }
    std::size_t warnings = 0;
    for (const auto& d : r.diagnostics) warnings += d.severity == Severity::Warning ? 1 : 0;
    res["warnings"] = warnings;
    r.result = res;
  });
  return r;
}

}  // namespace ppw
