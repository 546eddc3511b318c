#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include <metasolve/pareto.hpp>

#include "oracles.hpp"

using namespace metasolve;

namespace {

ObjectiveTable table_of(std::vector<ObjectivePoint> pts, std::size_t n) {
  ObjectiveTable t;
  t.n_criteria = n;
  t.points = std::move(pts);
  return t;
}

// Values on a coarse grid force ties and duplicate coordinates.
ObjectiveTable coarse_table(std::mt19937_64& rng, std::size_t n_points,
                            std::size_t n_criteria) {
  std::uniform_int_distribution<int> grid(0, 2);
  ObjectiveTable t;
  t.n_criteria = n_criteria;
  for (std::size_t i = 0; i < n_points; ++i) {
    ObjectivePoint p;
    p.id = "c" + std::to_string(i);
    p.f.resize(n_criteria);
    for (auto& v : p.f) v = static_cast<double>(grid(rng));
    t.points.push_back(std::move(p));
  }
  return t;
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("dominance distinguishes weak, strict, and incomparable") {
  const std::vector<double> a{1.0, 2.0};
  const std::vector<double> b{1.0, 3.0};
  const std::vector<double> c{2.0, 3.0};
  const std::vector<double> d{0.5, 9.0};

  CHECK(dominates(a, b) == Dominance::Dominates);         // one tie, one strict
  CHECK(dominates(a, c) == Dominance::StrictlyDominates);  // strict everywhere
  CHECK(dominates(b, a) == Dominance::None);
  CHECK(dominates(a, a) == Dominance::None);  // ties never dominate
  CHECK(dominates(a, d) == Dominance::None);  // incomparable both ways
  CHECK(dominates(d, a) == Dominance::None);

  CHECK_THROWS_AS(dominates(a, std::vector<double>{1.0, 2.0, 3.0}), DimensionError);
}

TEST_CASE("dominance is a strict partial order") {
  std::mt19937_64 rng(17);
  const auto t = coarse_table(rng, 40, 3);
  for (const auto& x : t.points)
    for (const auto& y : t.points) {
      const auto dxy = dominates(x.f, y.f);
      if (dxy != Dominance::None) CHECK(dominates(y.f, x.f) == Dominance::None);
      for (const auto& z : t.points) {
        if (dxy != Dominance::None && dominates(y.f, z.f) != Dominance::None)
          CHECK(dominates(x.f, z.f) != Dominance::None);
        if (dxy == Dominance::StrictlyDominates &&
            dominates(y.f, z.f) == Dominance::StrictlyDominates)
          CHECK(dominates(x.f, z.f) == Dominance::StrictlyDominates);
      }
    }
}

TEST_CASE("strong and weak sets on a worked example") {
  const auto t = table_of({{"a", {0.0, 1.0}},
                           {"b", {1.0, 0.0}},
                           {"c", {1.0, 1.0}},
                           {"d", {2.0, 2.0}}},
                          2);
  const auto res = pareto_set(t);
  CHECK(res.strong_ids == std::vector<std::string>{"a", "b"});
  // c is dominated (by a and b) but never strictly; d is strictly dominated.
  CHECK(res.weak_ids == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(res.front.size() == 2);
  CHECK(res.front[0] == std::vector<double>{0.0, 1.0});
  CHECK(res.weak_front[2] == std::vector<double>{1.0, 1.0});
}

TEST_CASE("pareto sets match the quadratic oracle") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n_pts = 1 + static_cast<std::size_t>(rng() % 120);
    const std::size_t n_crit = 2 + static_cast<std::size_t>(rng() % 6);
    const auto t = (rep % 2 == 0) ? oracles::random_table(rng, n_pts, n_crit)
                                  : coarse_table(rng, n_pts, n_crit);
    const auto res = pareto_set(t);
    const auto ref = oracles::brute_pareto(t);
    INFO("rep " << rep << ": " << n_pts << " points, " << n_crit << " criteria");
    CHECK(res.strong_ids == ref.strong_ids);
    CHECK(res.weak_ids == ref.weak_ids);
  }
}

TEST_CASE("pareto front vectors travel with their ids") {
  std::mt19937_64 rng(29);
  const auto t = oracles::random_table(rng, 50, 4);
  const auto res = pareto_set(t);
  REQUIRE(res.front.size() == res.strong_ids.size());
  for (std::size_t i = 0; i < res.strong_ids.size(); ++i) {
    const auto it = std::find_if(t.points.begin(), t.points.end(),
                                 [&](const auto& p) { return p.id == res.strong_ids[i]; });
    REQUIRE(it != t.points.end());
    CHECK(res.front[i] == it->f);
  }
}

TEST_CASE("adding a criterion never evicts front members") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    auto t = oracles::random_table(rng, 60, 3);
    const auto before = pareto_set(t);

    auto wider = t;
    wider.n_criteria = 4;
    for (auto& pt : wider.points) pt.f.push_back(uni(rng));
    const auto after = pareto_set(wider);

    const auto strong_after = sorted(after.strong_ids);
    for (const auto& id : before.strong_ids)
      CHECK(std::binary_search(strong_after.begin(), strong_after.end(), id));
  }
}

TEST_CASE("adding a criterion never evicts weak members, ties included") {
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<int> grid(0, 2);
  for (int rep = 0; rep < 20; ++rep) {
    auto t = coarse_table(rng, 60, 3);
    const auto before = pareto_set(t);

    auto wider = t;
    wider.n_criteria = 4;
    for (auto& pt : wider.points) pt.f.push_back(static_cast<double>(grid(rng)));
    const auto after = pareto_set(wider);

    const auto weak_after = sorted(after.weak_ids);
    for (const auto& id : before.weak_ids)
      CHECK(std::binary_search(weak_after.begin(), weak_after.end(), id));
  }
}

TEST_CASE("rescale maps each criterion onto the unit interval") {
  const auto t = table_of({{"a", {2.0, 5.0}}, {"b", {4.0, 5.0}}, {"c", {10.0, 5.0}}}, 2);
  const auto r = rescale(t);
  CHECK(r.table.points[0].f[0] == 0.0);
  CHECK(r.table.points[1].f[0] == 0.25);
  CHECK(r.table.points[2].f[0] == 1.0);
  CHECK_FALSE(r.degenerate[0]);

  // Constant column: flagged and mapped to zero rather than dividing by zero.
  CHECK(r.degenerate[1]);
  for (const auto& pt : r.table.points) CHECK(pt.f[1] == 0.0);
}

TEST_CASE("preference weights validate and build presets") {
  auto u7 = PreferenceWeights::uniform(7);
  CHECK_NOTHROW(u7.validate());
  for (double w : u7.lambda) CHECK(w == Catch::Approx(1.0 / 7.0).margin(1e-15));

  auto te = PreferenceWeights::emphasize_time_error(7);
  CHECK_NOTHROW(te.validate());
  CHECK(te.lambda[0] == 0.4);
  CHECK(te.lambda[1] == 0.4);
  for (std::size_t i = 2; i < 7; ++i)
    CHECK(te.lambda[i] == Catch::Approx(0.04).margin(1e-15));
  CHECK_THROWS_AS(PreferenceWeights::emphasize_time_error(2), InvalidWeightsError);

  PreferenceWeights bad;
  bad.lambda = {0.5, 0.6};
  CHECK_THROWS_AS(bad.validate(), InvalidWeightsError);
  bad.lambda = {-0.1, 1.1};
  CHECK_THROWS_AS(bad.validate(), InvalidWeightsError);
  bad.lambda = {0.5, 0.5};
  CHECK_NOTHROW(bad.validate());
}

TEST_CASE("weighted sum scores and guards lengths") {
  PreferenceWeights w;
  w.lambda = {0.25, 0.75};
  const auto p = weighted_sum(w);
  CHECK(p(std::vector<double>{1.0, 2.0}) == Catch::Approx(1.75).margin(1e-15));
  CHECK_THROWS_AS(p(std::vector<double>{1.0, 2.0, 3.0}), DimensionError);

  PreferenceWeights bad;
  bad.lambda = {2.0, -1.0};
  CHECK_THROWS_AS(weighted_sum(bad), InvalidWeightsError);
}

TEST_CASE("discover ranks by score with deterministic tie-breaks") {
  const auto t = table_of({{"balanced", {0.2, 0.2}},
                           {"fast", {0.1, 0.9}},
                           {"accurate", {0.9, 0.1}}},
                          2);
  const auto ranked = discover(t, weighted_sum(PreferenceWeights::uniform(2)));
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0] == "balanced");  // score 0.2 beats the tied 0.5s
  CHECK(ranked[1] == "fast");      // tie broken lexicographically on vectors
  CHECK(ranked[2] == "accurate");

  // Identical vectors: the id is the final tie-break.
  const auto dup = table_of({{"zeta", {0.5, 0.5}}, {"alpha", {0.5, 0.5}}}, 2);
  const auto r2 = discover(dup, weighted_sum(PreferenceWeights::uniform(2)));
  CHECK(r2 == std::vector<std::string>{"alpha", "zeta"});
}

TEST_CASE("merging new points equals recomputing from scratch") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 20; ++rep) {
    const auto all = (rep % 2 == 0) ? oracles::random_table(rng, 80, 4)
                                    : coarse_table(rng, 80, 4);
    ObjectiveTable head = all;
    head.points.resize(50);
    std::vector<ObjectivePoint> tail(all.points.begin() + 50, all.points.end());

    const auto merged = merge_monotone(pareto_set(head), tail, 4);
    const auto full = pareto_set(all);
    CHECK(sorted(merged.strong_ids) == sorted(full.strong_ids));
    CHECK(sorted(merged.weak_ids) == sorted(full.weak_ids));
  }
}

TEST_CASE("merge warns on duplicate performance vectors") {
  const auto head = table_of({{"a", {0.0, 1.0}}, {"b", {1.0, 0.0}}}, 2);
  const auto res = merge_monotone(pareto_set(head), {{"a2", {0.0, 1.0}}}, 2);
  REQUIRE_FALSE(res.warnings.empty());
  CHECK(res.warnings.front().find("a2") != std::string::npos);
  CHECK(res.warnings.front().find("duplicate") != std::string::npos);
}

TEST_CASE("objective tables validate shape and finiteness") {
  CHECK_THROWS_AS(pareto_set(table_of({}, 2)), Error);

  auto bad_len = table_of({{"a", {1.0}}}, 2);
  CHECK_THROWS_AS(pareto_set(bad_len), DimensionError);

  auto bad_val = table_of({{"a", {1.0, std::numeric_limits<double>::infinity()}}}, 2);
  CHECK_THROWS_AS(pareto_set(bad_val), Error);
}
