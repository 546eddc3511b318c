#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <metasolve/krylov.hpp>
#include <metasolve/poisson.hpp>
#include <metasolve/smoothers.hpp>

#include "oracles.hpp"

using namespace metasolve;

namespace {

std::vector<double> random_rhs(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> f(n);
  for (auto& v : f) v = uni(rng);
  return f;
}

Preconditioner jacobi_preconditioner(const SparseMatrix& A) {
  std::vector<double> diag(A.n_rows, 0.0);
  for (std::size_t i = 0; i < A.n_rows; ++i)
    for (std::size_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
      if (A.col_indices[k] == i) diag[i] = A.values[k];
  return [diag](std::span<const double> r, std::span<double> z, OpLedger& led) {
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] / diag[i];
    led.charge_macs(r.size());
  };
}

}  // namespace

TEST_CASE("all three methods solve a random SPD system") {
  std::mt19937_64 rng(7);
  const auto A = oracles::random_spd(rng, 24);
  const auto f = random_rhs(rng, 24);
  OpLedger led;
  const auto ref = solve_dense(oracles::to_dense(A), f, led);

  for (auto kind : {KrylovKind::FGMRES, KrylovKind::FCG, KrylovKind::FBiCGStab}) {
    INFO("method " << to_string(kind));
    KrylovConfig cfg;
    cfg.kind = kind;
    cfg.tol_rel = 1e-12;
    cfg.max_iters = 200;
    const auto res = krylov_solve(cfg, A, f, identity_preconditioner(), led);
    CHECK(res.trace.converged);
    CHECK(res.trace.residual_history.front() == 1.0);
    CHECK(res.trace.residual_history.size() == res.trace.iterations + 1);
    for (std::size_t i = 0; i < 24; ++i)
      CHECK(res.u[i] == Catch::Approx(ref[i]).margin(1e-9));
  }
}

TEST_CASE("converged flag is backed by the true residual") {
  const auto p = assemble_poisson(1, 63, "bump");
  OpLedger led;
  KrylovConfig cfg;
  cfg.kind = KrylovKind::FCG;
  cfg.tol_rel = 1e-11;
  cfg.max_iters = 500;
  const auto res = krylov_solve(cfg, p.A, p.f, jacobi_preconditioner(p.A), led);
  REQUIRE(res.trace.converged);
  std::vector<double> r(63);
  residual(p.A, res.u, p.f, r, led);
  CHECK(norm2(r, led) / norm2(p.f, led) <= 1e-11);
}

TEST_CASE("fgmres residual estimates never increase within one cycle") {
  std::mt19937_64 rng(21);
  KrylovConfig cfg;
  cfg.kind = KrylovKind::FGMRES;
  cfg.restart = 60;  // single cycle for n = 30
  cfg.tol_rel = 1e-10;
  cfg.max_iters = 60;

  SECTION("symmetric positive definite") {
    for (int rep = 0; rep < 5; ++rep) {
      const auto A = oracles::random_spd(rng, 30);
      const auto f = random_rhs(rng, 30);
      OpLedger led;
      const auto res = krylov_solve(cfg, A, f, identity_preconditioner(), led);
      CHECK(res.trace.converged);
      const auto& rh = res.trace.residual_history;
      for (std::size_t i = 1; i < rh.size(); ++i) CHECK(rh[i] <= rh[i - 1]);
    }
  }
  SECTION("nonsymmetric perturbation") {
    for (int rep = 0; rep < 5; ++rep) {
      auto dense = oracles::to_dense(oracles::random_spd(rng, 30));
      std::uniform_real_distribution<double> uni(-0.2, 0.2);
      std::vector<std::tuple<std::size_t, std::size_t, double>> trips;
      for (std::size_t i = 0; i < 30; ++i)
        for (std::size_t j = 0; j < 30; ++j) {
          const double skew = (i != j) ? uni(rng) : 0.0;
          trips.emplace_back(i, j, dense(i, j) + skew);
        }
      const auto A = SparseMatrix::from_triplets(30, 30, trips);
      const auto f = random_rhs(rng, 30);
      OpLedger led;
      const auto res = krylov_solve(cfg, A, f, identity_preconditioner(), led);
      CHECK(res.trace.converged);
      const auto& rh = res.trace.residual_history;
      for (std::size_t i = 1; i < rh.size(); ++i) CHECK(rh[i] <= rh[i - 1]);
    }
  }
}

TEST_CASE("fcg with a fixed spd preconditioner reproduces textbook pcg") {
  const auto p = assemble_poisson(1, 32, "const");
  std::vector<double> diag(32, 0.0);
  for (std::size_t i = 0; i < 32; ++i)
    for (std::size_t k = p.A.row_offsets[i]; k < p.A.row_offsets[i + 1]; ++k)
      if (p.A.col_indices[k] == i) diag[i] = p.A.values[k];

  const auto oracle = oracles::plain_pcg(
      p.A, p.f,
      [&](const std::vector<double>& r, std::vector<double>& z) {
        for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] / diag[i];
      },
      1e-10, 64);
  REQUIRE(oracle.converged);

  OpLedger led;
  KrylovConfig cfg;
  cfg.kind = KrylovKind::FCG;
  cfg.tol_rel = 1e-10;
  cfg.max_iters = 64;
  const auto res = krylov_solve(cfg, p.A, p.f, jacobi_preconditioner(p.A), led);
  REQUIRE(res.trace.converged);

  // Same direction recurrence in exact arithmetic: histories and iterates
  // agree to roundoff, iteration for iteration.
  REQUIRE(res.trace.iterations == oracle.iterations);
  for (std::size_t i = 0; i < res.trace.residual_history.size(); ++i)
    CHECK(res.trace.residual_history[i] ==
          Catch::Approx(oracle.rel_residuals[i]).epsilon(1e-6).margin(1e-12));
  for (std::size_t i = 0; i < 32; ++i)
    CHECK(res.u[i] == Catch::Approx(oracle.u[i]).margin(1e-10));
}

TEST_CASE("fbicgstab reports the vanished scalar on breakdown") {
  // Rotation matrix: (r_hat, A r_hat) = 0 on the first half-step.
  const auto A = SparseMatrix::from_triplets(2, 2, {{0, 1, -1.0}, {1, 0, 1.0}});
  const std::vector<double> f{1.0, 0.0};
  OpLedger led;
  KrylovConfig cfg;
  cfg.kind = KrylovKind::FBiCGStab;
  CHECK_THROWS_MATCHES(krylov_solve(cfg, A, f, identity_preconditioner(), led),
                       BreakdownError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("(r_hat, v)")));
}

TEST_CASE("fgmres restarts make progress") {
  std::mt19937_64 rng(3);
  const auto A = oracles::random_spd(rng, 4);
  const auto f = random_rhs(rng, 4);
  OpLedger led;
  KrylovConfig cfg;
  cfg.kind = KrylovKind::FGMRES;
  cfg.restart = 2;
  cfg.tol_rel = 1e-10;
  cfg.max_iters = 200;
  const auto res = krylov_solve(cfg, A, f, identity_preconditioner(), led);
  CHECK(res.trace.converged);
  CHECK(res.trace.iterations > 2);  // forced through at least one restart

  const auto ref = solve_dense(oracles::to_dense(A), f, led);
  for (std::size_t i = 0; i < 4; ++i) CHECK(res.u[i] == Catch::Approx(ref[i]).margin(1e-8));
}

TEST_CASE("iteration budget exhaustion reports nonconvergence") {
  const auto p = assemble_poisson(1, 63, "const");
  for (auto kind : {KrylovKind::FGMRES, KrylovKind::FCG, KrylovKind::FBiCGStab}) {
    INFO("method " << to_string(kind));
    OpLedger led;
    KrylovConfig cfg;
    cfg.kind = kind;
    cfg.tol_rel = 1e-13;
    cfg.max_iters = 2;
    const auto res = krylov_solve(cfg, p.A, p.f, identity_preconditioner(), led);
    CHECK_FALSE(res.trace.converged);
    CHECK(res.trace.iterations == 2);
  }
}

TEST_CASE("zero rhs converges immediately with a zero iterate") {
  const auto p = assemble_poisson(1, 15, "const");
  const std::vector<double> f(15, 0.0);
  for (auto kind : {KrylovKind::FGMRES, KrylovKind::FCG, KrylovKind::FBiCGStab}) {
    OpLedger led;
    KrylovConfig cfg;
    cfg.kind = kind;
    const auto res = krylov_solve(cfg, p.A, f, identity_preconditioner(), led);
    CHECK(res.trace.converged);
    CHECK(res.trace.iterations == 0);
    for (double v : res.u) CHECK(v == 0.0);
  }
}

TEST_CASE("krylov workspace is settled when the solve returns") {
  const auto p = assemble_poisson(1, 31, "const");
  for (auto kind : {KrylovKind::FGMRES, KrylovKind::FCG, KrylovKind::FBiCGStab}) {
    OpLedger led;
    KrylovConfig cfg;
    cfg.kind = kind;
    cfg.tol_rel = 1e-10;
    const auto res = krylov_solve(cfg, p.A, p.f, identity_preconditioner(), led);
    CHECK(res.trace.converged);
    CHECK(led.current_reals() == 0);
    CHECK(led.peak_reals() > 0);
  }
}

TEST_CASE("krylov rejects shape mismatches") {
  const auto A = SparseMatrix::from_triplets(2, 3, {{0, 0, 1.0}, {1, 1, 1.0}});
  const std::vector<double> f{1.0, 1.0};
  OpLedger led;
  KrylovConfig cfg;
  CHECK_THROWS_AS(krylov_solve(cfg, A, f, identity_preconditioner(), led), DimensionError);

  const auto B = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, 1.0}});
  const std::vector<double> f3{1.0, 1.0, 1.0};
  CHECK_THROWS_AS(krylov_solve(cfg, B, f3, identity_preconditioner(), led), DimensionError);
}

TEST_CASE("krylov names round-trip") {
  for (auto kind : {KrylovKind::FGMRES, KrylovKind::FCG, KrylovKind::FBiCGStab})
    CHECK(krylov_from_string(to_string(kind)) == kind);
  CHECK_THROWS_AS(krylov_from_string("CGS"), ConfigError);
}
