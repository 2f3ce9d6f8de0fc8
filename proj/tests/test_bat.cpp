#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ppw/belief.hpp"
#include "ppw/error.hpp"
#include "support.hpp"

using namespace ppw;

namespace {

std::shared_ptr<const ActionModel> theory(const std::string& text) {
  Program p = test::program("#actions\n" + text);
  REQUIRE(p.theory);
  return ActionModel::compile(*p.theory);
}

const std::string kPos =
    "fluent pos/1 : real.\n"
    "ssa pos(X) { move(X, Y, Z) => pos(X) + Z; }\n"
    "noisy move/3 intended=2 actual=3.\n"
    "domain {c}.\n";

struct Moments {
  double mean = 0.0;
  double var = 0.0;
  double ess = 0.0;
};

Moments moments(const BeliefState& b, const std::string& fluent) {
  int f = b.model->index_of(test::term(fluent));
  REQUIRE(f >= 0);
  Moments m;
  double w = 0.0, w2 = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    m.mean += b.weights[i] * b.value(i, static_cast<std::size_t>(f));
    w += b.weights[i];
    w2 += b.weights[i] * b.weights[i];
  }
  m.mean /= w;
  for (std::size_t i = 0; i < b.size(); ++i) {
    double d = b.value(i, static_cast<std::size_t>(f)) - m.mean;
    m.var += b.weights[i] * d * d;
  }
  m.var /= w;
  m.ess = w * w / w2;
  return m;
}

double weight_sum(const BeliefState& b) {
  double s = 0.0;
  for (double w : b.weights) s += w;
  return s;
}

bool throws_kind(ErrorKind kind, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

}  // namespace

TEST_CASE("prior probabilistic fact") {
  auto m = theory("fluent onTable/1 : bool.\nssa onTable(X) { }\ndomain {c}.\nprior { 0.6::onTable(c). }\n");
  BeliefState b = init_belief(m, 0, 10000, Seed{1});
  CHECK(b.size() == 10000);
  CHECK(std::fabs(degree_of_belief(b, test::formula("onTable(c)")) - 0.6) <= 0.015);
  CHECK(weight_sum(b) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(throws_kind(ErrorKind::Argument, [&] { init_belief(m, 1, 10, Seed{1}); }));
}

TEST_CASE("delta prior gives identical particles") {
  auto m = theory(kPos + "likelihood move(X, Y, Z) : delta(Z; Y).\nprior { pos(c) ~ delta(2). }\n");
  BeliefState b = init_belief(m, 0, 500, Seed{2});
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(b.value(i, 0) == 2.0);
  // noise-free collapse: ground formulas are believed to degree 0 or 1
  BeliefState moved = progress(b, test::term("move(c, 1)"), Seed{3});
  for (std::size_t i = 0; i < moved.size(); ++i) CHECK(moved.value(i, 0) == 3.0);
  CHECK(degree_of_belief(moved, test::formula("pos(c) = 3")) == 1.0);
  CHECK(degree_of_belief(moved, test::formula("pos(c) > 3")) == 0.0);
}

TEST_CASE("gaussian prior") {
  auto m = theory(kPos + "likelihood move(X, Y, Z) : gaussian(Z; Y, 0.25).\nprior { pos(c) ~ gaussian(0, 1). }\n");
  Moments mo = moments(init_belief(m, 0, 10000, Seed{4}), "pos(c)");
  CHECK(std::fabs(mo.mean) <= 0.03);
  CHECK(mo.var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("successor state axioms") {
  auto m = theory(
      "fluent pos/1 : real.\n"
      "fluent onTable/1 : bool.\n"
      "ssa pos(X) { move(X, Y, Z) => pos(X) + Z; }\n"
      "ssa onTable(X) { removeObj(X) => false; }\n"
      "domain {c, d}.\n");
  Valuation v{{test::term("pos(c)"), Term::integer(2)},
              {test::term("pos(d)"), Term::integer(7)},
              {test::term("onTable(c)"), Term::boolean(true)},
              {test::term("onTable(d)"), Term::boolean(true)}};
  CHECK(ssa_value(*m, test::term("pos(c)"), test::term("move(c, 1, 3)"), v).number() == 5.0);
  CHECK(ssa_value(*m, test::term("pos(d)"), test::term("move(c, 1, 3)"), v).number() == 7.0);
  CHECK(ssa_value(*m, test::term("pos(c)"), test::term("paint(c)"), v).number() == 2.0);
  CHECK(ssa_value(*m, test::term("onTable(c)"), test::term("removeObj(c)"), v) == Term::boolean(false));
  CHECK(ssa_value(*m, test::term("onTable(d)"), test::term("removeObj(c)"), v) == Term::boolean(true));

  auto clash = theory("fluent pos/1 : real.\nssa pos(X) { move(X, Y) => 1; move(A, B) => 2; }\ndomain {c}.\n");
  Valuation p{{test::term("pos(c)"), Term::integer(0)}};
  CHECK(throws_kind(ErrorKind::Model, [&] { ssa_value(*clash, test::term("pos(c)"), test::term("move(c, 1)"), p); }));
}

TEST_CASE("noisy move adds gaussian noise") {
  auto m = theory(kPos + "likelihood move(X, Y, Z) : gaussian(Z; Y, 0.25).\nprior { pos(c) ~ gaussian(0, 1). }\n");
  BeliefState b = progress(init_belief(m, 0, 10000, Seed{5}), test::term("move(c, 1)"), Seed{6});
  Moments mo = moments(b, "pos(c)");
  CHECK(std::fabs(mo.mean - 1.0) <= 0.034);
  CHECK(mo.var == doctest::Approx(1.25).epsilon(0.10));
  for (double w : b.weights) CHECK(w == doctest::Approx(1.0 / 10000));
  // a variable in the actual position is sampled too
  BeliefState v = progress(init_belief(m, 0, 1000, Seed{5}), test::term("move(c, 1, Z)"), Seed{6});
  CHECK(moments(v, "pos(c)").mean == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("noise-free action") {
  auto m = theory("fluent onTable/1 : bool.\nssa onTable(X) { removeObj(X) => false; }\ndomain {b, c}.\n"
                  "prior { 0.6::onTable(c). onTable(b). }\n");
  BeliefState b = progress(init_belief(m, 0, 1000, Seed{7}), test::term("removeObj(c)"), Seed{8});
  CHECK(degree_of_belief(b, test::formula("onTable(c)")) == 0.0);
  CHECK(degree_of_belief(b, test::formula("onTable(b)")) == 1.0);
}

TEST_CASE("frame: unrelated actions change nothing") {
  auto m = theory(kPos + "likelihood move(X, Y, Z) : gaussian(Z; Y, 0.25).\nprior { pos(c) ~ gaussian(0, 1). }\n");
  BeliefState b = init_belief(m, 0, 2000, Seed{9});
  BeliefState after = progress(b, test::term("paint(c)"), Seed{10});
  std::vector<double> x(b.values), y(after.values);
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  CHECK(x == y);
  CHECK(after.weights == b.weights);
}

TEST_CASE("noisy action without a likelihood") {
  auto m = theory(kPos);
  BeliefState b = init_belief(m, 0, 10, Seed{1});
  CHECK(throws_kind(ErrorKind::Model, [&] { progress(b, test::term("move(c, 1)"), Seed{1}); }));
}

TEST_CASE("gaussian observation is a conjugate update") {
  // N(0,1) prior, z = 1 with variance 1  =>  N(0.5, 0.5)
  auto m = theory(kPos + "likelihood move(X, Y, Z) : gaussian(Z; Y, 0.25).\n"
                         "likelihood obs(X, Z) : gaussian(Z; pos(X), 1).\nprior { pos(c) ~ gaussian(0, 1). }\n");
  BeliefState b = observe(init_belief(m, 0, 10000, Seed{11}), test::term("obs(c, 1.0)"), Seed{12});
  CHECK(weight_sum(b) == doctest::Approx(1.0).epsilon(1e-9));
  for (double w : b.weights) CHECK(w >= 0.0);
  Moments mo = moments(b, "pos(c)");
  CHECK(std::fabs(mo.mean - 0.5) <= 0.05);
  CHECK(mo.var == doctest::Approx(0.5).epsilon(0.10));
}

TEST_CASE("kalman chain") {
  // predict: N(0,1) + N(1,0.25) -> N(1, 1.25); update with z = 1.2, R = 1
  const double prior_var = 1.25;
  const double gain = prior_var / (prior_var + 1.0);
  const double mean = 1.0 + gain * (1.2 - 1.0);
  const double var = (1.0 - gain) * prior_var;
  auto m = ActionModel::compile(*test::model("kalman.dcl").theory);
  BeliefState b = init_belief(m, 0, 10000, Seed{13});
  b = execute(b, test::term("move(c, 1)"), Seed{14});
  b = execute(b, test::term("obs(c, 1.2)"), Seed{15});
  Moments mo = moments(b, "pos(c)");
  double se_mean = std::sqrt(var / mo.ess);
  double se_var = var * std::sqrt(2.0 / mo.ess);
  CHECK(std::fabs(mo.mean - mean) <= 3.0 * se_mean);
  CHECK(std::fabs(mo.var - var) <= 3.0 * se_var);
}

TEST_CASE("delta observation that every particle explains") {
  auto m = theory(kPos + "likelihood move(X, Y, Z) : delta(Z; Y).\nlikelihood look(X, Z) : delta(Z; pos(X)).\n"
                         "prior { pos(c) ~ delta(2). }\n");
  BeliefState b = init_belief(m, 0, 100, Seed{1});
  BeliefState seen = observe(b, test::term("look(c, 2)"), Seed{2});
  REQUIRE(seen.size() == b.size());
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::fabs(seen.weights[i] - b.weights[i]) <= 1e-15);
  CHECK(seen.values == b.values);
  CHECK(throws_kind(ErrorKind::ImpossibleEvidence, [&] { observe(b, test::term("look(c, 5)"), Seed{2}); }));
}

TEST_CASE("observation concentrates mass") {
  auto m = theory(kPos + "likelihood move(X, Y, Z) : gaussian(Z; Y, 1).\n"
                         "likelihood obs(X, Z) : gaussian(Z; pos(X), 1).\n");
  BeliefState b = init_belief(m, 0, 2, Seed{1});
  b.values = {0.0, 10.0};
  b.weights = {0.5, 0.5};
  BeliefState post = observe(b, test::term("obs(c, 0)"), Seed{3});
  CHECK(degree_of_belief(post, test::formula("pos(c) = 0")) >= 1.0 - 1e-10);
}

TEST_CASE("resampling keeps the particle count") {
  auto m = theory(kPos + "likelihood move(X, Y, Z) : gaussian(Z; Y, 1).\n"
                         "likelihood obs(X, Z) : gaussian(Z; pos(X), 0.01).\nprior { pos(c) ~ gaussian(0, 1). }\n");
  BeliefState b = observe(init_belief(m, 0, 1000, Seed{1}), test::term("obs(c, 0.3)"), Seed{2});
  CHECK(b.size() == 1000);
  // the sharp observation forces a resample, which leaves uniform weights
  for (double w : b.weights) CHECK(w == doctest::Approx(1.0 / 1000));
  CHECK(weight_sum(b) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("degree of belief") {
  auto some = ActionModel::compile(*test::model("some_on_table.dcl").theory);
  BeliefState b = init_belief(some, 0, 10000, Seed{16});
  CHECK(std::fabs(degree_of_belief(b, test::formula("exists X . onTable(X)")) - 0.6) <= 0.015);
  CHECK(degree_of_belief(b, test::formula("forall X . X = X")) == 1.0);
  CHECK(degree_of_belief(b, test::formula("onTable(a) & onTable(b)")) == 0.0);

  auto two = theory("fluent onTable/1 : bool.\nssa onTable(X) { }\ndomain {b, c}.\n"
                    "prior { 0.5::onTable(c). 0.5::onTable(b). }\n");
  BeliefState ind = init_belief(two, 0, 10000, Seed{17});
  CHECK(std::fabs(degree_of_belief(ind, test::formula("onTable(c) & onTable(b)")) - 0.25) <= 0.015);
  CHECK(throws_kind(ErrorKind::Model, [&] { degree_of_belief(ind, test::formula("colour(c)")); }));
}

TEST_CASE("belief intervals over a prior family") {
  auto m = ActionModel::compile(*test::model("interval.dcl").theory);
  BeliefInterval iv = belief_interval(m, test::formula("onTable(c)"), {}, 10000, Seed{18});
  CHECK(std::fabs(iv.lo - 0.3) <= 0.02);
  CHECK(std::fabs(iv.hi - 0.7) <= 0.02);
  REQUIRE(iv.members.size() == 2);
  for (double d : iv.members) {
    CHECK(iv.lo <= d);
    CHECK(d <= iv.hi);
  }
  // the same member run by hand with the interval's seeds lands inside
  for (std::size_t k = 0; k < 2; ++k) {
    BeliefState b = init_belief(m, k, 10000, derive(Seed{18}, k));
    double d = degree_of_belief(b, test::formula("onTable(c)"));
    CHECK(d == iv.members[k]);
  }
  BeliefInterval gone = belief_interval(m, test::formula("onTable(c)"), {test::term("removeObj(c)")}, 1000, Seed{1});
  CHECK(gone.lo == 0.0);
  CHECK(gone.hi == 0.0);

  auto single = ActionModel::compile(*test::model("some_on_table.dcl").theory);
  BeliefInterval one = belief_interval(single, test::formula("exists X . onTable(X)"), {}, 2000, Seed{19});
  CHECK(one.lo == one.hi);
  CHECK(one.lo > 0.0);
}

TEST_CASE("implicit prior") {
  auto m = ActionModel::compile(*test::model("line4.dcl").theory);
  CHECK(m->member_count() == 1);
  BeliefState b = init_belief(m, 0, 10, Seed{0});
  CHECK(degree_of_belief(b, test::formula("pos = 0")) == 1.0);
  b = execute(b, test::term("right"), Seed{1});
  b = execute(b, test::term("right"), Seed{2});
  CHECK(degree_of_belief(b, test::formula("pos = 2")) == 1.0);
}

TEST_CASE("belief updates are deterministic") {
  auto m = ActionModel::compile(*test::model("kalman.dcl").theory);
  auto run = [&] {
    BeliefState b = init_belief(m, 0, 500, Seed{3});
    b = execute(b, test::term("move(c, 1)"), Seed{4});
    return execute(b, test::term("obs(c, 1.2)"), Seed{5});
  };
  BeliefState x = run(), y = run();
  CHECK(x.values == y.values);
  CHECK(x.weights == y.weights);
}
