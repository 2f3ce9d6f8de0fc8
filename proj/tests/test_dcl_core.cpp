#include <doctest.h>

#include <algorithm>

#include "ast_fuzz.hpp"
#include "ppw/analysis.hpp"
#include "ppw/lexer.hpp"
#include "ppw/parser.hpp"
#include "ppw/printer.hpp"
#include "ppw/validate.hpp"
#include "support.hpp"

using namespace ppw;

namespace {

std::vector<Diagnostic> parse_errors(const std::string& text) {
  auto r = parse_program(text);
  REQUIRE_FALSE(ok(r));
  return std::get<1>(r);
}

bool mentions(const std::vector<Diagnostic>& diags, const std::string& needle) {
  return std::any_of(diags.begin(), diags.end(),
                     [&](const Diagnostic& d) { return d.message.find(needle) != std::string::npos; });
}

std::vector<Diagnostic> errors_of(const std::string& text) {
  auto diags = validate(test::program(text));
  std::erase_if(diags, [](const Diagnostic& d) { return d.severity != Severity::Error; });
  return diags;
}

}  // namespace

TEST_CASE("probabilistic fact") {
  Program p = test::program("0.6::onTable(c).");
  REQUIRE(p.clauses.size() == 1);
  const Clause& c = p.clauses[0];
  CHECK(c.kind == Clause::Kind::ProbFact);
  CHECK(c.prob == doctest::Approx(0.6));
  CHECK(c.head == Term::compound("onTable", {Term::constant("c")}));
  CHECK(c.body.empty());
  CHECK(pretty_print(p) == "0.6::onTable(c).\n");
}

TEST_CASE("paper's leading-dot probability") {
  Program p = test::program(".6::onTable(c).");
  CHECK(p.clauses[0].prob == doctest::Approx(0.6));
}

TEST_CASE("urn program") {
  Program p = test::program("n ~ poisson(6). pos(X) ~ uniform(1,10) <- between(1, ~=(n), X).");
  REQUIRE(p.clauses.size() == 2);
  CHECK(p.clauses[0].kind == Clause::Kind::Dist);
  CHECK(p.clauses[0].dist->family == Distribution::Family::Poisson);
  const Clause& pos = p.clauses[1];
  CHECK(pos.kind == Clause::Kind::Dist);
  CHECK(pos.dist->family == Distribution::Family::Uniform);
  REQUIRE(pos.body.size() == 1);
  const Term& between = pos.body[0].atom;
  CHECK(between.name() == Symbol("between"));
  CHECK(between.args()[1].is_eval());
  CHECK(between.args()[1].inner() == Term::constant("n"));
  CHECK(between.args()[2].is_variable());

  std::string text = pretty_print(p);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(test::program(text) == p);
  CHECK(validate(p).empty());
}

TEST_CASE("probability out of range") {
  auto diags = parse_errors("1.5::a.");
  CHECK(mentions(diags, "probability"));
  CHECK(diags[0].loc.line == 1);
}

TEST_CASE("empty program prints as nothing") {
  CHECK(pretty_print(Program{}).empty());
  CHECK(test::program("") == Program{});
  CHECK(test::program("% only a comment\n") == Program{});
}

TEST_CASE("syntax errors carry positions inside the text") {
  const std::vector<std::string> bad{
      "a <- .",         "p(X ~ gaussian(0,1).", "#actions\nfluent pos/1 : colour.", "#control\nprim .",
      "a(1,.",          "0.5:: <- b.",          "x ~ nosuch(1).",                          "a <- b,, c.",
      "#bogus\na.",     "f(X) ~ gaussian(1).",  "#actions\nssa pos(X) { }\nssa pos(Y) { }",  "a. $",
  };
  for (const auto& text : bad) {
    CAPTURE(text);
    auto diags = parse_errors(text);
    REQUIRE_FALSE(diags.empty());
    std::size_t lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) + 1;
    for (const auto& d : diags) {
      CHECK(d.loc.line >= 1);
      CHECK(d.loc.line <= lines);
      CHECK(d.loc.offset <= text.size());
    }
  }
}

TEST_CASE("duplicate SSA is a parse error") {
  auto diags = parse_errors("#actions\nfluent pos/1 : real.\nssa pos(X) { }\nssa pos(Y) { }\n");
  CHECK(mentions(diags, "duplicate SSA"));
  CHECK(diags.back().loc.line == 4);
}

TEST_CASE("action theory section") {
  Program p = test::model("kalman.dcl");
  REQUIRE(p.theory);
  const ActionTheory& th = *p.theory;
  REQUIRE(th.fluents.size() == 1);
  CHECK(th.fluents[0].sort == Sort::Real);
  CHECK(th.fluents[0].arity == 1);
  REQUIRE(th.noisy.size() == 1);
  CHECK(th.noisy[0].intended == 2);
  CHECK(th.noisy[0].actual == 3);
  CHECK(th.likelihoods.size() == 2);
  CHECK(th.likelihoods[0].target == Symbol("Z"));
  CHECK(th.domain == std::vector<Symbol>{Symbol("c")});
  REQUIRE(th.priors.size() == 1);
  CHECK(th.priors[0].clauses[0].dist->family == Distribution::Family::Gaussian);
  REQUIRE(p.control);
  CHECK(p.control->kind == ProgramExpr::Kind::Seq);
  CHECK(test::program(pretty_print(p)) == p);
}

TEST_CASE("control program operators") {
  Program p = test::model("clear_table.dcl");
  REQUIRE(p.control);
  const ProgramExpr& top = *p.control;
  REQUIRE(top.kind == ProgramExpr::Kind::Seq);
  const ProgramExpr& star = top.children[0];
  REQUIRE(star.kind == ProgramExpr::Kind::Star);
  const ProgramExpr& pick = star.children[0];
  REQUIRE(pick.kind == ProgramExpr::Kind::Pick);
  CHECK(pick.var == Symbol("X"));
  CHECK(pick.children[0].kind == ProgramExpr::Kind::Seq);
  const ProgramExpr& goal = top.children[1];
  REQUIRE(goal.kind == ProgramExpr::Kind::Test);
  CHECK(goal.condition.kind == Formula::Kind::Not);
  CHECK(goal.condition.children[0].kind == Formula::Kind::Exists);

  Program choice = test::program("#actions\ndomain {a}.\n#control\nprim a | prim b ; ?(true).");
  CHECK(choice.control->kind == ProgramExpr::Kind::Choice);
  CHECK(choice.control->children[1].kind == ProgramExpr::Kind::Seq);
}

TEST_CASE("formula precedence") {
  Formula f = test::formula("a & b | not c");
  CHECK(f.kind == Formula::Kind::Or);
  CHECK(f.children[0].kind == Formula::Kind::And);
  CHECK(f.children[1].kind == Formula::Kind::Not);
  Formula q = test::formula("forall X . exists Y . r(X, Y)");
  CHECK(q.kind == Formula::Kind::Forall);
  CHECK(q.children[0].kind == Formula::Kind::Exists);
  Formula cmp = test::formula("~=(pos(c)) + 1 >= 2 * 3");
  CHECK(cmp.kind == Formula::Kind::Compare);
  CHECK(cmp.op == CompareOp::Ge);
  CHECK(cmp.lhs.is_arithmetic());
}

TEST_CASE("arithmetic keeps its grouping through printing") {
  for (const char* text : {"a - (b - c)", "(a - b) - c", "a * (b + c)", "-3 - -2", "2 * 3 + 4", "~=(x) - 1.5"}) {
    CAPTURE(text);
    Term t = test::term(text);
    CHECK(test::term(to_string(t)) == t);
  }
  Term t = test::term("a - (b - c)");
  CHECK(t.args()[1].is_arithmetic());
}

TEST_CASE("integers and reals stay distinct") {
  Term i = test::term("2");
  Term r = test::term("2.0");
  CHECK(i.kind() == TermKind::Integer);
  CHECK(r.kind() == TermKind::Real);
  CHECK_FALSE(i == r);
  CHECK(same_value(i, r));
  CHECK(test::term(to_string(r)).kind() == TermKind::Real);
}

TEST_CASE("round trip over fuzzed documents") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    CAPTURE(seed);
    Program p = test::AstFuzzer(seed).program();
    std::string text = pretty_print(p);
    auto back = parse_program(text);
    REQUIRE_MESSAGE(ok(back), text);
    CHECK(std::get<0>(back) == p);
  }
}

TEST_CASE("parsing is deterministic") {
  std::string text = test::read_file(test::model_path("line_world_stochastic.dcl"));
  CHECK(test::program(text) == test::program(text));
  CHECK(pretty_print(test::program(text)) == pretty_print(test::program(text)));
}

TEST_CASE("validator accepts the bundled models") {
  for (const char* name : {"on_table.dcl", "urn.dcl", "line_world.dcl", "line_world_stochastic.dcl", "kalman.dcl",
                           "clear_table.dcl", "interval.dcl", "line4.dcl", "some_on_table.dcl"}) {
    CAPTURE(name);
    CHECK(errors_of(test::read_file(test::model_path(name))).empty());
  }
}

TEST_CASE("discrete weights must sum to one") {
  auto diags = errors_of("x ~ discrete(0.5: a, 0.6: b).");
  REQUIRE(diags.size() == 1);
  CHECK(mentions(diags, "weights sum to 1.1"));
  CHECK(errors_of("x ~ discrete(0.5: a, 0.5: b).").empty());
}

TEST_CASE("reserved predicates") {
  CHECK(mentions(errors_of("poss(a)."), "poss requires time argument"));
  CHECK(mentions(errors_of("reward(5)."), "reward requires"));
  CHECK(errors_of("poss(a, 0). reward(1, 0).").empty());
}

TEST_CASE("distribution parameter checks") {
  CHECK(mentions(errors_of("x ~ gaussian(0, 0)."), "variance"));
  CHECK(mentions(errors_of("x ~ poisson(-1)."), "rate"));
  CHECK(mentions(errors_of("x ~ uniform(3, 1)."), "uniform"));
  CHECK(mentions(errors_of("x(Y) ~ gaussian(Z, 1) <- p(Y)."), "distribution parameter variable Z"));
  CHECK(errors_of("p(1). x(Y) ~ gaussian(Y, 1) <- p(Y).").empty());
}

TEST_CASE("range restriction") {
  CHECK(mentions(errors_of("q(X) <- p(Y)."), "X"));
  CHECK(mentions(errors_of("q <- not p(X)."), "X"));
  CHECK(errors_of("p(1). q(X) <- p(X), not r(X).").empty());
}

TEST_CASE("negative cycle inside a layer") {
  CHECK(mentions(errors_of("a <- not b. b <- not a."), "negation"));
  CHECK(errors_of("a(T + 1) <- not b(T), a(T). b(T) <- a(T). a(0).").empty());
}

TEST_CASE("arity inconsistency is a warning") {
  auto diags = validate(test::program("p(1). p(1, 2). q <- p(1)."));
  REQUIRE_FALSE(diags.empty());
  CHECK_FALSE(has_errors(diags));
  CHECK(mentions(diags, "p"));
}

TEST_CASE("action theory checks") {
  const std::string fluent = "#actions\nfluent pos/1 : real.\n";
  CHECK(mentions(errors_of(fluent + "ssa pos(X) { }\nfluent pos/1 : real.\n"), "declared twice"));
  CHECK(mentions(errors_of(fluent + "ssa pos(X) { }\nssa size(X) { }\n"), "size"));
  CHECK(mentions(errors_of(fluent + "ssa pos(X) { move(X, Y) => W; }\n"), "W"));
  CHECK(mentions(errors_of(fluent + "ssa pos(X) { }\nnoisy move/3 intended=2 actual=3.\n"), "likelihood"));
  CHECK(mentions(errors_of(fluent + "ssa pos(X) { }\ndomain {a, a}.\n"), "a"));
  CHECK(errors_of(fluent + "ssa pos(X) { move(X, Y) => pos(X) + Y; }\n").empty());
}

TEST_CASE("control program checks") {
  const std::string theory = "#actions\nfluent on/1 : bool.\nssa on(X) { take(X) => false; }\ndomain {a}.\n";
  CHECK(mentions(errors_of("#control\nprim a."), "#actions"));
  CHECK(mentions(errors_of(theory + "#control\nprim take(X)."), "X"));
  CHECK(mentions(errors_of(theory + "#control\npick X . pick X . prim take(X)."), "X"));
  CHECK(errors_of(theory + "#control\npick X . prim take(X).").empty());
  const std::string no_domain = "#actions\nfluent on/1 : bool.\nssa on(X) { }\n";
  CHECK(mentions(errors_of(no_domain + "#control\n?(exists X . on(X))."), "domain"));
}

TEST_CASE("dynamic predicates are inferred from time-advancing clauses") {
  Program p = test::model("line_world.dcl");
  ProgramAnalysis a = analyze(p.clauses);
  CHECK(a.is_dynamic(PredKey{Symbol("at"), 2}));
  CHECK(a.is_dynamic(PredKey{Symbol("done"), 1}));
  CHECK(a.is_dynamic(PredKey{Symbol("move"), 2}));
  CHECK(a.is_dynamic(PredKey{Symbol("acted"), 1}));

  ProgramAnalysis urn = analyze(test::model("urn.dcl").clauses);
  CHECK_FALSE(urn.is_dynamic(PredKey{Symbol("pos"), 1}));
  CHECK_FALSE(urn.is_dynamic(PredKey{Symbol("n"), 0}));
}

TEST_CASE("strata order producers before consumers") {
  ProgramAnalysis a = analyze(test::program("c <- b. b <- a. a.").clauses);
  REQUIRE(a.static_strata.size() == 3);
  CHECK(a.static_strata[0].clauses == std::vector<std::size_t>{2});
  CHECK(a.static_strata[2].clauses == std::vector<std::size_t>{0});
  ProgramAnalysis rec = analyze(test::program("e(1,2). p(X,Y) <- e(X,Y). p(X,Z) <- p(X,Y), e(Y,Z).").clauses);
  CHECK(std::any_of(rec.static_strata.begin(), rec.static_strata.end(), [](const Stratum& s) { return s.recursive; }));
}

TEST_CASE("lexer reports unknown characters") {
  LexResult r = lex("a. @");
  REQUIRE_FALSE(r.diagnostics.empty());
  CHECK(r.diagnostics[0].loc.column == 4);
}
