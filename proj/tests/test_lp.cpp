#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <metasolve/lp.hpp>
#include <metasolve/rediscovery.hpp>

#include "oracles.hpp"

using namespace metasolve;

namespace {

LPProblem make_lp(std::vector<double> obj, std::vector<LPConstraint> cons,
                  std::vector<LPBounds> bounds = {}) {
  LPProblem lp;
  lp.objective = std::move(obj);
  lp.constraints = std::move(cons);
  lp.bounds = std::move(bounds);
  return lp;
}

ObjectiveTable front_of(std::vector<ObjectivePoint> pts, std::size_t n) {
  ObjectiveTable t;
  t.n_criteria = n;
  t.points = std::move(pts);
  return t;
}

}  // namespace

TEST_CASE("bounds alone pin the optimum") {
  SECTION("finite lower bound") {
    const auto sol = solve_lp(make_lp({1.0}, {}, {{1.0, std::numeric_limits<double>::infinity()}}));
    REQUIRE(sol.status == LPStatus::Optimal);
    CHECK(sol.x[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(sol.value == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("finite upper bound") {
    const auto sol = solve_lp(make_lp({-1.0}, {}, {{0.0, 5.0}}));
    REQUIRE(sol.status == LPStatus::Optimal);
    CHECK(sol.x[0] == Catch::Approx(5.0).margin(1e-12));
    CHECK(sol.value == Catch::Approx(-5.0).margin(1e-12));
  }
}

TEST_CASE("unbounded and infeasible programs are reported as such") {
  CHECK(solve_lp(make_lp({-1.0}, {})).status == LPStatus::Unbounded);

  LPConstraint impossible;
  impossible.coeffs = {1.0};
  impossible.rel = LPRelation::LessEq;
  impossible.rhs = -1.0;  // x <= -1 with x >= 0
  CHECK(solve_lp(make_lp({1.0}, {impossible})).status == LPStatus::Infeasible);
}

TEST_CASE("textbook two-variable program reaches the known vertex") {
  // minimize -3x - 5y subject to x <= 4, 2y <= 12, 3x + 2y <= 18.
  LPConstraint c1{{1.0, 0.0}, LPRelation::LessEq, 4.0};
  LPConstraint c2{{0.0, 2.0}, LPRelation::LessEq, 12.0};
  LPConstraint c3{{3.0, 2.0}, LPRelation::LessEq, 18.0};
  const auto sol = solve_lp(make_lp({-3.0, -5.0}, {c1, c2, c3}));
  REQUIRE(sol.status == LPStatus::Optimal);
  CHECK(sol.x[0] == Catch::Approx(2.0).margin(1e-10));
  CHECK(sol.x[1] == Catch::Approx(6.0).margin(1e-10));
  CHECK(sol.value == Catch::Approx(-36.0).margin(1e-9));
}

TEST_CASE("equality constraints go through phase one") {
  LPConstraint eq{{1.0, 1.0}, LPRelation::Eq, 2.0};
  const auto sol = solve_lp(make_lp({1.0, 1.0}, {eq}));
  REQUIRE(sol.status == LPStatus::Optimal);
  CHECK(sol.value == Catch::Approx(2.0).margin(1e-10));
  CHECK(sol.x[0] + sol.x[1] == Catch::Approx(2.0).margin(1e-10));
  CHECK(sol.x[0] >= -1e-12);
  CHECK(sol.x[1] >= -1e-12);
}

TEST_CASE("redundant equality rows do not break the basis") {
  LPConstraint eq{{1.0, 1.0}, LPRelation::Eq, 1.0};
  const auto sol = solve_lp(make_lp({2.0, 3.0}, {eq, eq}));
  REQUIRE(sol.status == LPStatus::Optimal);
  CHECK(sol.value == Catch::Approx(2.0).margin(1e-10));  // all weight on x
  CHECK(sol.x[0] == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("free variables reach negative optima") {
  SECTION("via split") {
    const double inf = std::numeric_limits<double>::infinity();
    LPConstraint lo{{-1.0}, LPRelation::LessEq, 3.0};  // -x <= 3, i.e. x >= -3
    const auto sol = solve_lp(make_lp({1.0}, {lo}, {{-inf, inf}}));
    REQUIRE(sol.status == LPStatus::Optimal);
    CHECK(sol.x[0] == Catch::Approx(-3.0).margin(1e-10));
  }
  SECTION("via shifted lower bound") {
    const auto sol =
        solve_lp(make_lp({1.0}, {}, {{-3.0, std::numeric_limits<double>::infinity()}}));
    REQUIRE(sol.status == LPStatus::Optimal);
    CHECK(sol.x[0] == Catch::Approx(-3.0).margin(1e-12));
  }
}

TEST_CASE("minimum over the simplex picks the smallest coefficient") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 2 + rng() % 6;
    std::vector<double> c(n);
    for (auto& v : c) v = uni(rng);
    LPConstraint sum;
    sum.coeffs.assign(n, 1.0);
    sum.rel = LPRelation::Eq;
    sum.rhs = 1.0;
    const auto sol = solve_lp(make_lp(c, {sum}));
    REQUIRE(sol.status == LPStatus::Optimal);
    CHECK(sol.value == Catch::Approx(*std::min_element(c.begin(), c.end())).margin(1e-9));
    double total = 0.0;
    for (double v : sol.x) {
      CHECK(v >= -1e-12);
      total += v;
    }
    CHECK(total == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("lp validation rejects malformed programs") {
  CHECK_THROWS_AS(solve_lp(make_lp({}, {})), Error);

  LPConstraint narrow{{1.0}, LPRelation::LessEq, 1.0};
  CHECK_THROWS_AS(solve_lp(make_lp({1.0, 2.0}, {narrow})), DimensionError);

  CHECK_THROWS_AS(solve_lp(make_lp({1.0, 2.0}, {}, {{0.0, 1.0}})), DimensionError);
  CHECK_THROWS_AS(solve_lp(make_lp({1.0}, {}, {{2.0, 1.0}})), Error);  // lo > hi
}

TEST_CASE("rediscovery lp encodes the supporting-hyperplane conditions") {
  const auto front =
      front_of({{"a", {0.0, 1.0}}, {"b", {0.5, 0.5}}, {"c", {1.0, 0.0}}}, 2);
  const auto lp = build_rediscovery_lp(front, "b");
  CHECK(lp.objective == std::vector<double>{0.5, 0.5});
  REQUIRE(lp.constraints.size() == 3);  // two gap rows + simplex equality
  CHECK(lp.constraints[0].coeffs == std::vector<double>{0.5, -0.5});  // b - a
  CHECK(lp.constraints[1].coeffs == std::vector<double>{-0.5, 0.5});  // b - c
  CHECK(lp.constraints[2].rel == LPRelation::Eq);
  CHECK(lp.constraints[2].rhs == 1.0);
  REQUIRE(lp.bounds.size() == 2);
  CHECK(lp.bounds[0].lo == 0.0);
  CHECK(lp.bounds[0].hi == 1.0);
}

TEST_CASE("every vertex of a convex front is rediscoverable") {
  const auto line =
      front_of({{"a", {0.0, 1.0}}, {"b", {0.5, 0.5}}, {"c", {1.0, 0.0}}}, 2);
  for (const auto& pt : line.points) {
    const auto res = rediscover(line, pt.id);
    INFO("target " << pt.id << ": " << res.explanation);
    CHECK(res.found);
    CHECK(res.certificate <= 1e-9);
    CHECK_NOTHROW(res.lambda.validate());
  }

  std::mt19937_64 rng(47);
  for (std::size_t n_crit : {3u, 7u}) {
    const auto front = oracles::convex_front(rng, 25, n_crit);
    for (const auto& pt : front.points) {
      const auto res = rediscover(front, pt.id);
      INFO("criteria " << n_crit << " target " << pt.id << ": " << res.explanation);
      CHECK(res.found);
      CHECK(res.certificate <= 1e-9);
    }
  }
}

TEST_CASE("rediscovered weights are certified against the whole front") {
  // Independent check: the announced weights really score the target best.
  const auto front =
      front_of({{"a", {0.0, 1.0}}, {"b", {0.3, 0.65}}, {"c", {1.0, 0.0}}}, 2);
  const auto res = rediscover(front, "b");
  REQUIRE(res.found);
  const auto score = weighted_sum(res.lambda);
  const double target_score = score(front.points[1].f);
  CHECK(target_score <= score(front.points[0].f) + 1e-9);
  CHECK(target_score <= score(front.points[2].f) + 1e-9);
}

TEST_CASE("points in a concave region admit no supporting weights") {
  const auto front =
      front_of({{"left", {0.0, 1.0}}, {"mid", {0.6, 0.6}}, {"right", {1.0, 0.0}}}, 2);

  const auto res = rediscover(front, "mid");
  CHECK_FALSE(res.found);
  CHECK(res.certificate > 1e-9);
  CHECK_THAT(res.explanation, Catch::Matchers::ContainsSubstring("non-convex"));

  // The extreme points stay supported.
  CHECK(rediscover(front, "left").found);
  CHECK(rediscover(front, "right").found);
}

TEST_CASE("single-point fronts are trivially supported") {
  const auto res = rediscover(front_of({{"only", {0.2, 0.8}}}, 2), "only");
  CHECK(res.found);
  CHECK(res.certificate == 0.0);
}

TEST_CASE("unknown rediscovery targets raise") {
  const auto front = front_of({{"a", {0.0, 1.0}}, {"b", {1.0, 0.0}}}, 2);
  CHECK_THROWS_AS(rediscover(front, "ghost"), NotOnFrontError);
  CHECK_THROWS_AS(build_rediscovery_lp(front, "ghost"), NotOnFrontError);
}
