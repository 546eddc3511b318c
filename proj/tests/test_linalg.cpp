#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <metasolve/dense.hpp>
#include <metasolve/ledger.hpp>
#include <metasolve/sparse.hpp>
#include <metasolve/vector_ops.hpp>

#include "oracles.hpp"

using namespace metasolve;

TEST_CASE("ledger charges and allocation tracking") {
  OpLedger led;
  CHECK(led.macs() == 0);
  led.charge_macs(7);
  led.charge_macs(5);
  CHECK(led.macs() == 12);

  {
    TrackedVector a(10, led);
    CHECK(led.current_reals() == 10);
    {
      TrackedVector b(25, led);
      CHECK(led.current_reals() == 35);
      CHECK(led.peak_reals() == 35);
    }
    CHECK(led.current_reals() == 10);
    CHECK(led.peak_reals() == 35);
  }
  CHECK(led.current_reals() == 0);
  CHECK(led.peak_reals() == 35);

  led.reset();
  CHECK(led.macs() == 0);
  CHECK(led.peak_reals() == 0);
}

TEST_CASE("ledger free mismatch is an error") {
  OpLedger led;
  led.on_alloc(5);
  CHECK_THROWS_AS(led.on_free(6), MeasurementError);
}

TEST_CASE("tracked vector take releases accounting") {
  OpLedger led;
  TrackedVector v(4, led);
  v[2] = 3.0;
  std::vector<double> out = v.take();
  CHECK(led.current_reals() == 0);
  CHECK(out[2] == 3.0);
}

TEST_CASE("vector ops match references and charge n each") {
  OpLedger led;
  std::vector<double> a{1.0, -2.0, 3.0};
  std::vector<double> b{4.0, 5.0, -6.0};

  CHECK(dot(a, b, led) == Catch::Approx(1.0 * 4 - 2 * 5 - 3 * 6));
  CHECK(led.macs() == 3);

  axpy(2.0, a, b, led);  // b += 2 a
  CHECK(b[0] == Catch::Approx(6.0));
  CHECK(b[1] == Catch::Approx(1.0));
  CHECK(b[2] == Catch::Approx(0.0));
  CHECK(led.macs() == 6);

  CHECK(norm2(a, led) == Catch::Approx(std::sqrt(14.0)));
  CHECK(led.macs() == 9);

  scal(0.5, a, led);
  CHECK(a[0] == Catch::Approx(0.5));
  CHECK(led.macs() == 12);

  std::vector<double> wrong{1.0};
  CHECK_THROWS_AS(dot(a, wrong, led), DimensionError);
}

TEST_CASE("csr validation rejects malformed structure") {
  SparseMatrix A;
  A.n_rows = 2;
  A.n_cols = 2;
  A.row_offsets = {0, 1, 2};
  A.col_indices = {0, 1};
  A.values = {1.0, 1.0};
  CHECK_NOTHROW(A.validate());

  SECTION("column out of range") {
    A.col_indices[1] = 2;
    CHECK_THROWS_AS(A.validate(), DimensionError);
  }
  SECTION("offsets not monotone") {
    A.row_offsets = {0, 2, 1};
    CHECK_THROWS_AS(A.validate(), DimensionError);
  }
  SECTION("columns not strictly increasing within a row") {
    A.row_offsets = {0, 2, 2};
    A.col_indices = {1, 0};
    CHECK_THROWS_AS(A.validate(), DimensionError);
  }
}

TEST_CASE("from_triplets sums duplicates and sorts columns") {
  const auto A = SparseMatrix::from_triplets(
      2, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 0.5}, {1, 1, -1.0}});
  CHECK(A.row_offsets == std::vector<std::size_t>{0, 2, 3});
  CHECK(A.col_indices == std::vector<std::size_t>{0, 2, 1});
  CHECK(A.values[0] == 2.0);
  CHECK(A.values[1] == 1.5);
  CHECK(A.values[2] == -1.0);
}

TEST_CASE("spmv matches dense oracle and charges nnz") {
  std::mt19937_64 rng(11);
  const auto A = oracles::random_spd(rng, 12);
  std::vector<double> x(12);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (auto& v : x) v = uni(rng);

  OpLedger led;
  std::vector<double> y(12);
  spmv(A, x, y, led);
  CHECK(led.macs() == A.values.size());

  const auto y_ref = oracles::dense_matvec(oracles::to_dense(A), x);
  for (std::size_t i = 0; i < 12; ++i) CHECK(y[i] == Catch::Approx(y_ref[i]).margin(1e-12));
}

TEST_CASE("residual computes f - Au and charges only the spmv") {
  const auto A = SparseMatrix::from_triplets(2, 2, {{0, 0, 2.0}, {1, 1, 4.0}});
  std::vector<double> u{1.0, 1.0}, f{5.0, 5.0}, r(2);
  OpLedger led;
  residual(A, u, f, r, led);
  CHECK(r[0] == 3.0);
  CHECK(r[1] == 1.0);
  CHECK(led.macs() == A.values.size());
}

TEST_CASE("transpose, scaled, matmul, kron match dense oracles") {
  std::mt19937_64 rng(17);
  const auto A = oracles::random_spd(rng, 6);
  const auto B = oracles::random_spd(rng, 6);

  const auto At = transpose(A);
  const auto Ad = oracles::to_dense(A);
  const auto Atd = oracles::to_dense(At);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(Atd(i, j) == Ad(j, i));

  const auto S = scaled(A, -2.5);
  const auto Sd = oracles::to_dense(S);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(Sd(i, j) == Catch::Approx(-2.5 * Ad(i, j)));

  const auto C = matmul(A, B);
  const auto Bd = oracles::to_dense(B);
  const auto Cd = oracles::to_dense(C);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 6; ++k) s += Ad(i, k) * Bd(k, j);
      CHECK(Cd(i, j) == Catch::Approx(s).margin(1e-10));
    }

  const auto I2 = SparseMatrix::identity(2);
  const auto K = kron(I2, A);
  const auto Kd = oracles::to_dense(K);
  CHECK(K.n_rows == 12);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(Kd(i, j) == Ad(i, j));
      CHECK(Kd(6 + i, 6 + j) == Ad(i, j));
      CHECK(Kd(i, 6 + j) == 0.0);
    }
}

TEST_CASE("gemv both modes match oracle and charge rows*cols") {
  DenseMatrix M(3, 2);
  M(0, 0) = 1;
  M(0, 1) = 2;
  M(1, 0) = 3;
  M(1, 1) = 4;
  M(2, 0) = 5;
  M(2, 1) = 6;
  OpLedger led;
  std::vector<double> x{1.0, -1.0}, y(3);
  gemv(M, x, y, led);
  CHECK(y == std::vector<double>{-1.0, -1.0, -1.0});
  CHECK(led.macs() == 6);

  std::vector<double> z{1.0, 0.0, -1.0}, w(2);
  gemv(M, z, w, led, /*transpose=*/true);
  CHECK(w == std::vector<double>{-4.0, -4.0});
  CHECK(led.macs() == 12);
}

TEST_CASE("householder qr produces orthonormal factor with positive diagonal") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  DenseMatrix M(10, 4);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 4; ++j) M(i, j) = uni(rng);

  const QRResult qr = dense_qr(M);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < 10; ++i) s += qr.Q(i, a) * qr.Q(i, b);
      CHECK(s == Catch::Approx(a == b ? 1.0 : 0.0).margin(1e-12));
    }
  for (std::size_t k = 0; k < 4; ++k) CHECK(qr.R(k, k) > 0.0);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= j; ++k) s += qr.Q(i, k) * qr.R(k, j);
      CHECK(s == Catch::Approx(M(i, j)).margin(1e-12));
    }
}

TEST_CASE("qr rejects rank-deficient input") {
  DenseMatrix M(5, 2);
  for (std::size_t i = 0; i < 5; ++i) {
    M(i, 0) = static_cast<double>(i + 1);
    M(i, 1) = 2.0 * static_cast<double>(i + 1);
  }
  CHECK_THROWS_AS(dense_qr(M), RankDeficientError);
}

TEST_CASE("lu factor/solve matches qr-free dense solve and charges n^2 per solve") {
  std::mt19937_64 rng(31);
  const auto As = oracles::random_spd(rng, 8);
  const auto A = oracles::to_dense(As);
  std::vector<double> b(8);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (auto& v : b) v = uni(rng);

  OpLedger led;
  const LUFactor F = lu_factor(A, &led);
  const auto macs_after_factor = led.macs();
  const auto x = lu_solve(F, b, led);
  CHECK(led.macs() - macs_after_factor == 64);

  const auto Ax = oracles::dense_matvec(A, x);
  for (std::size_t i = 0; i < 8; ++i) CHECK(Ax[i] == Catch::Approx(b[i]).margin(1e-9));
}

TEST_CASE("lu rejects singular matrices") {
  DenseMatrix M(2, 2);
  M(0, 0) = 1.0;
  M(0, 1) = 2.0;
  M(1, 0) = 2.0;
  M(1, 1) = 4.0;
  CHECK_THROWS_AS(lu_factor(M), SingularMatrixError);
}
