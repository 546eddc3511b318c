#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "ledger.hpp"
#include "sparse.hpp"

namespace metasolve {

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> data;  // row-major, size n_rows * n_cols

  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : n_rows(rows), n_cols(cols), data(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * n_cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * n_cols + j]; }

  double max_abs() const {
    double m = 0.0;
    for (double v : data) m = std::max(m, std::abs(v));
    return m;
  }

  static DenseMatrix from_sparse(const SparseMatrix& A) {
    DenseMatrix M(A.n_rows, A.n_cols, 0.0);
    for (std::size_t i = 0; i < A.n_rows; ++i)
      for (std::size_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
        M(i, A.col_indices[k]) = A.values[k];
    return M;
  }
};

// y = M x (transpose=false) or y = M^T x (transpose=true).
// Charges n_rows * n_cols MACs either way.
inline void gemv(const DenseMatrix& M, std::span<const double> x, std::span<double> y,
                 OpLedger& ledger, bool transpose = false) {
  const std::size_t in = transpose ? M.n_rows : M.n_cols;
  const std::size_t out = transpose ? M.n_cols : M.n_rows;
  if (x.size() != in || y.size() != out) throw DimensionError("gemv: shape");
  std::fill(y.begin(), y.end(), 0.0);
  if (!transpose) {
    for (std::size_t i = 0; i < M.n_rows; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < M.n_cols; ++j) s += M(i, j) * x[j];
      y[i] = s;
    }
  } else {
    for (std::size_t i = 0; i < M.n_rows; ++i) {
      const double xi = x[i];
      for (std::size_t j = 0; j < M.n_cols; ++j) y[j] += M(i, j) * xi;
    }
  }
  ledger.charge_macs(static_cast<std::uint64_t>(M.n_rows) * M.n_cols);
}

struct QRResult {
  DenseMatrix Q;  // n_rows x n_cols, orthonormal columns
  DenseMatrix R;  // n_cols x n_cols, upper triangular, positive diagonal
};

// Thin Householder QR of an n x m matrix (n >= m). The R factor is
// normalized to a positive diagonal so factorizations are unique and the
// Q columns of an already-orthonormal input come back unchanged in sign.
// Throws RankDeficientError when |R_kk| <= 1e-12 * max_abs(M).
inline QRResult dense_qr(const DenseMatrix& M) {
  const std::size_t n = M.n_rows;
  const std::size_t m = M.n_cols;
  if (n < m) throw DimensionError("qr: requires n_rows >= n_cols");
  if (m == 0) throw DimensionError("qr: empty matrix");
  const double rank_tol = 1e-12 * M.max_abs();

  DenseMatrix A = M;                      // reduced in place to R
  std::vector<std::vector<double>> vs;    // Householder vectors
  vs.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    double norm_x = 0.0;
    for (std::size_t i = k; i < n; ++i) norm_x += A(i, k) * A(i, k);
    norm_x = std::sqrt(norm_x);
    std::vector<double> v(n - k, 0.0);
    if (norm_x > 0.0) {
      const double alpha = (A(k, k) >= 0.0) ? -norm_x : norm_x;
      v[0] = A(k, k) - alpha;
      for (std::size_t i = k + 1; i < n; ++i) v[i - k] = A(i, k);
      double vnorm = 0.0;
      for (double w : v) vnorm += w * w;
      if (vnorm > 0.0) {
        const double inv = 1.0 / std::sqrt(vnorm);
        for (double& w : v) w *= inv;
        // A <- (I - 2 v v^T) A on the trailing block.
        for (std::size_t j = k; j < m; ++j) {
          double s = 0.0;
          for (std::size_t i = k; i < n; ++i) s += v[i - k] * A(i, j);
          s *= 2.0;
          for (std::size_t i = k; i < n; ++i) A(i, j) -= s * v[i - k];
        }
      }
    }
    vs.push_back(std::move(v));
    if (std::abs(A(k, k)) <= rank_tol)
      throw RankDeficientError("qr: column " + std::to_string(k) + " dependent");
  }

  QRResult out;
  out.R = DenseMatrix(m, m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) out.R(i, j) = A(i, j);

  // Q = H_0 ... H_{m-1} applied to the first m identity columns.
  out.Q = DenseMatrix(n, m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    for (std::size_t k = m; k-- > 0;) {
      const std::vector<double>& v = vs[k];
      if (v.empty()) continue;
      double s = 0.0;
      for (std::size_t i = k; i < n; ++i) s += v[i - k] * e[i];
      s *= 2.0;
      for (std::size_t i = k; i < n; ++i) e[i] -= s * v[i - k];
    }
    for (std::size_t i = 0; i < n; ++i) out.Q(i, j) = e[i];
  }

  for (std::size_t k = 0; k < m; ++k) {
    if (out.R(k, k) < 0.0) {
      for (std::size_t j = k; j < m; ++j) out.R(k, j) = -out.R(k, j);
      for (std::size_t i = 0; i < n; ++i) out.Q(i, k) = -out.Q(i, k);
    }
  }
  return out;
}

// LU factorization with partial pivoting, stored packed (L unit lower).
struct LUFactor {
  DenseMatrix lu;
  std::vector<std::size_t> perm;  // row permutation applied to the input
  std::size_t n = 0;
};

// Factors a square matrix; charges the executed elimination multiplies and
// divisions to the ledger when one is supplied. Throws SingularMatrixError
// when the best available pivot falls below 1e-14 * max_abs(M).
inline LUFactor lu_factor(const DenseMatrix& M, OpLedger* ledger = nullptr) {
  if (M.n_rows != M.n_cols) throw DimensionError("lu: square matrix required");
  const std::size_t n = M.n_rows;
  const double pivot_tol = 1e-14 * M.max_abs();
  LUFactor F;
  F.lu = M;
  F.n = n;
  F.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) F.perm[i] = i;
  std::uint64_t macs = 0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(F.lu(i, k)) > std::abs(F.lu(p, k))) p = i;
    if (std::abs(F.lu(p, k)) <= pivot_tol)
      throw SingularMatrixError("lu: pivot below tolerance at step " + std::to_string(k));
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(F.lu(k, j), F.lu(p, j));
      std::swap(F.perm[k], F.perm[p]);
    }
    const double inv_pivot = 1.0 / F.lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      F.lu(i, k) *= inv_pivot;
      ++macs;  // the division forming the multiplier
      const double lik = F.lu(i, k);
      for (std::size_t j = k + 1; j < n; ++j) {
        F.lu(i, j) -= lik * F.lu(k, j);
        ++macs;
      }
    }
  }
  if (ledger) ledger->charge_macs(macs);
  return F;
}

// Solves M x = b from a cached factor. Charges n^2 MACs.
inline std::vector<double> lu_solve(const LUFactor& F, std::span<const double> b,
                                    OpLedger& ledger) {
  if (b.size() != F.n) throw DimensionError("lu_solve: rhs size");
  const std::size_t n = F.n;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[F.perm[i]];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= F.lu(i, j) * x[j];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= F.lu(i, j) * x[j];
    x[i] /= F.lu(i, i);
  }
  ledger.charge_macs(static_cast<std::uint64_t>(n) * n);
  return x;
}

// One-shot dense solve (factor + solve).
inline std::vector<double> solve_dense(const DenseMatrix& M, std::span<const double> b,
                                       OpLedger& ledger) {
  LUFactor F = lu_factor(M, &ledger);
  return lu_solve(F, b, ledger);
}

}  // namespace metasolve
