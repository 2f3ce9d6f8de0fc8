#include <doctest.h>

#include <cmath>

#include "discrete_oracle.hpp"
#include "ppw/error.hpp"
#include "ppw/inference.hpp"
#include "ppw/world.hpp"
#include "support.hpp"

using namespace ppw;

namespace {

bool throws_kind(ErrorKind kind, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("urn worlds") {
  auto model = Model::compile(test::model("urn.dcl").clauses);
  for (std::uint64_t s = 0; s < 200; ++s) {
    World w = sample_world(model, 0, Seed{s});
    const Term* n = w.rv_value(Term::constant("n"));
    REQUIRE(n != nullptr);
    REQUIRE(n->kind() == TermKind::Integer);
    CHECK(n->as_int() >= 0);
    std::int64_t balls = 0;
    for (const auto& [rv, value] : w.rvs_at(0)) {
      if (rv.name() != Symbol("pos")) continue;
      ++balls;
      std::int64_t i = rv.args()[0].as_int();
      CHECK(i >= 1);
      CHECK(i <= n->as_int());
      CHECK(value.number() >= 1.0);
      CHECK(value.number() <= 10.0);
    }
    CHECK(balls == n->as_int());
  }
}

TEST_CASE("mean of the urn's ball count") {
  auto model = Model::compile(test::model("urn.dcl").clauses);
  double sum = 0.0;
  const int n = 10000;
  for (int s = 0; s < n; ++s) sum += sample_world(model, 0, derive(Seed{11}, static_cast<std::uint64_t>(s))).rv_value(Term::constant("n"))->number();
  CHECK(std::fabs(sum / n - 6.0) <= 3.0 * std::sqrt(6.0 / n));
}

TEST_CASE("certain fact") {
  World w = sample_world(test::program("1.0::a."), 0, Seed{1});
  CHECK(w.has_fact(Term::constant("a")));
  CHECK(holds(w, test::formula("a"), 0));
}

TEST_CASE("holds") {
  auto model = Model::compile(test::model("on_table.dcl").clauses);
  bool seen = false;
  for (std::uint64_t s = 0; s < 50 && !seen; ++s) {
    World w = sample_world(model, 0, Seed{s});
    if (!w.has_fact(test::term("onTable(c)"))) {
      CHECK_FALSE(holds(w, test::formula("inRoom(c)"), 0));
      continue;
    }
    seen = true;
    CHECK(holds(w, test::formula("inRoom(c)"), 0));
    CHECK(holds(w, test::formula("exists X . inRoom(X)"), 0, {Symbol("a"), Symbol("c")}));
    CHECK_FALSE(holds(w, test::formula("forall X . inRoom(X)"), 0, {Symbol("a"), Symbol("c")}));
  }
  CHECK(seen);

  World empty = sample_world(test::program(""), 0, Seed{0});
  CHECK_FALSE(holds(empty, test::formula("nothing"), 0));
  CHECK(holds(empty, test::formula("not nothing"), 0));
  CHECK(throws_kind(ErrorKind::Argument, [&] { holds(empty, test::formula("a"), 1); }));
  CHECK(throws_kind(ErrorKind::Argument, [&] { holds(empty, test::formula("exists X . p(X)"), 0); }));
}

TEST_CASE("comparisons read drawn values") {
  auto model = Model::compile(test::model("urn.dcl").clauses);
  for (std::uint64_t s = 0; s < 100; ++s) {
    World w = sample_world(model, 0, Seed{s});
    double n = w.rv_value(Term::constant("n"))->number();
    CHECK(holds(w, test::formula("~=(n) >= 1"), 0) == (n >= 1));
    CHECK(holds(w, test::formula("~=(n) = " + std::to_string(static_cast<int>(n))), 0));
    // an undefined rv makes the comparison false rather than an error
    CHECK_FALSE(holds(w, test::formula("~=(pos(1000)) > 0"), 0));
  }
}

TEST_CASE("likelihood-weighted estimates") {
  QueryOptions opt;
  opt.samples = 10000;
  opt.seed = Seed{7};
  QueryResult r = estimate_query(test::model("on_table.dcl"), test::formula("inRoom(c)"), {}, opt);
  CHECK(std::fabs(r.estimate - 0.6) <= 0.015);
  CHECK(r.n_samples == 10000);
  // empty evidence: unit weights
  CHECK(r.effective_sample_size == doctest::Approx(10000.0));
  CHECK(r.std_error <= 0.5 / std::sqrt(10000.0) + 1e-12);

  QueryResult urn = estimate_query(test::model("urn.dcl"), test::formula("~=(n) >= 1"), {}, opt);
  CHECK(std::fabs(urn.estimate - (1.0 - std::exp(-6.0))) <= 0.002);
}

TEST_CASE("single sample gives an indicator") {
  QueryOptions opt;
  opt.samples = 1;
  for (std::uint64_t s = 0; s < 20; ++s) {
    opt.seed = Seed{s};
    double e = estimate_query(test::model("on_table.dcl"), test::formula("inRoom(c)"), {}, opt).estimate;
    CHECK((e == 0.0 || e == 1.0));
  }
}

TEST_CASE("gaussian evidence is weighted by its density") {
  // x ~ N(0,1), y ~ N(x,1), y = 1.2  =>  x | y ~ N(0.6, 0.5)
  Program p = test::program("x ~ gaussian(0, 1). y ~ gaussian(~=(x), 1).");
  Evidence ev{{Term::constant("y"), Term::real(1.2)}};
  QueryOptions opt;
  opt.samples = 20000;
  opt.seed = Seed{3};
  QueryResult r = estimate_query(p, test::formula("~=(x) > 1"), ev, opt);
  double expected = 1.0 - normal_cdf((1.0 - 0.6) / std::sqrt(0.5));
  CHECK(r.effective_sample_size < 20000.0);
  CHECK(std::fabs(r.estimate - expected) <= 4.0 * r.std_error + 0.005);
}

TEST_CASE("impossible evidence is reported") {
  Program p = test::program("0.0::a. b <- a.");
  Evidence ev{{Term::constant("b"), Term::boolean(true)}};
  QueryOptions opt;
  opt.samples = 100;
  CHECK(throws_kind(ErrorKind::ImpossibleEvidence,
                    [&] { estimate_query(p, test::formula("b"), ev, opt); }));
}

TEST_CASE("exact enumeration") {
  CHECK(exact_query(test::model("on_table.dcl"), test::formula("inRoom(c)"), {}) == doctest::Approx(0.6));
  CHECK(exact_query(test::program("0.0::a."), test::formula("a"), {}) == 0.0);
  CHECK(exact_query(test::program("0.5::a. 0.5::b."), test::formula("a & b"), {}) == doctest::Approx(0.25));
  CHECK(throws_kind(ErrorKind::Enumeration,
                    [] { exact_query(test::model("urn.dcl"), test::formula("~=(n) > 2"), {}); }));
}

TEST_CASE("exact conditioning") {
  Program p = test::program("0.5::a. 0.5::b. x ~ discrete(0.2: 1, 0.3: 2, 0.5: 3). c <- a, ~=(x) > 1.");
  // P(c | x = 3) = P(a) = 0.5
  CHECK(exact_query(p, test::formula("c"), {{Term::constant("x"), Term::integer(3)}}) == doctest::Approx(0.5));
  // P(c | a) = P(x > 1) = 0.8
  CHECK(exact_query(p, test::formula("c"), {{Term::constant("a"), Term::boolean(true)}}) == doctest::Approx(0.8));
}

TEST_CASE("exact query agrees with brute-force enumeration") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    test::RandomDiscreteProgram g(seed);
    CAPTURE(g.text());
    CAPTURE(g.query_text());
    double oracle = g.probability();
    CHECK(exact_query(test::program(g.text()), test::formula(g.query_text()), {}) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("time-indexed chain") {
  // P(x_t = 1) = 0.5 + (0.2 - 0.5) * 0.8^t for a symmetric 0.1 flip
  Program p = test::program(
      "x(0) ~ discrete(0.8: 0, 0.2: 1).\n"
      "x(T + 1) ~ discrete(0.9: V, 0.1: 1 - V) <- ~=(x(T)) = V.\n");
  for (int t = 0; t <= 4; ++t) {
    CAPTURE(t);
    double expected = 0.5 - 0.3 * std::pow(0.8, t);
    CHECK(exact_query(p, test::formula("~=(x) = 1"), {}, t) == doctest::Approx(expected).epsilon(1e-12));
  }
  World w = sample_world(p, 3, Seed{5});
  CHECK(w.horizon() == 3);
  for (int t = 0; t <= 3; ++t) CHECK(w.rv_value(Term::compound("x", {Term::integer(t)})) != nullptr);
}

TEST_CASE("sampling is deterministic") {
  auto model = Model::compile(test::model("line_world_stochastic.dcl").clauses);
  for (std::uint64_t s = 0; s < 10; ++s) {
    World a = sample_world(model, 4, Seed{s});
    World b = sample_world(model, 4, Seed{s});
    for (int t = 0; t <= 4; ++t) CHECK(a.state_key(t) == b.state_key(t));
  }
  QueryOptions opt;
  opt.samples = 2000;
  opt.seed = Seed{9};
  auto x = estimate_query(test::model("urn.dcl"), test::formula("~=(n) > 6"), {}, opt);
  auto y = estimate_query(test::model("urn.dcl"), test::formula("~=(n) > 6"), {}, opt);
  CHECK(x.estimate == y.estimate);
  CHECK(x.std_error == y.std_error);
}

TEST_CASE("thread count does not change the estimate") {
  QueryOptions opt;
  opt.samples = 3000;
  opt.seed = Seed{4};
  auto one = estimate_query(test::model("urn.dcl"), test::formula("~=(n) > 5"), {}, opt);
  opt.threads = 3;
  auto three = estimate_query(test::model("urn.dcl"), test::formula("~=(n) > 5"), {}, opt);
  CHECK(one.estimate == three.estimate);
  CHECK(one.std_error == three.std_error);
}

TEST_CASE("derivation limit") {
  CHECK(throws_kind(ErrorKind::DepthLimit, [] { sample_world(test::program("p(a). p(s(X)) <- p(X)."), 0, Seed{0}); }));
}

TEST_CASE("facts are supported") {
  // every derived edge of the transitive closure has a witness path
  Program p = test::program(
      "0.5::e(1, 2). 0.5::e(2, 3). 0.5::e(1, 3). 0.5::e(3, 4).\n"
      "path(X, Y) <- e(X, Y).\n"
      "path(X, Z) <- path(X, Y), e(Y, Z).\n");
  auto model = Model::compile(p.clauses);
  for (std::uint64_t s = 0; s < 40; ++s) {
    World w = sample_world(model, 0, Seed{s});
    auto edge = [&](int a, int b) { return w.has_fact(Term::compound("e", {Term::integer(a), Term::integer(b)})); };
    auto path = [&](int a, int b) { return w.has_fact(Term::compound("path", {Term::integer(a), Term::integer(b)})); };
    for (int a = 1; a <= 4; ++a) {
      for (int b = 1; b <= 4; ++b) {
        bool derived = edge(a, b);
        for (int m = 1; m <= 4; ++m) derived = derived || (path(a, m) && edge(m, b));
        CHECK(path(a, b) == derived);
      }
    }
  }
}
