#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "ledger.hpp"

namespace metasolve {

// Compressed sparse row matrix over doubles.
//
// INVARIANTS (validated by validate(), enforced at construction):
//   row_offsets.size() == n_rows + 1, row_offsets[0] == 0, nondecreasing,
//   row_offsets[n_rows] == nnz; column indices within [0, n_cols), strictly
//   increasing within each row (sorted, no duplicates).
class SparseMatrix {
 public:
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_offsets;  // size n_rows + 1
  std::vector<std::size_t> col_indices;  // size nnz
  std::vector<double> values;            // size nnz

  SparseMatrix() : row_offsets(1, 0) {}

  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> offsets,
               std::vector<std::size_t> cols_idx, std::vector<double> vals)
      : n_rows(rows),
        n_cols(cols),
        row_offsets(std::move(offsets)),
        col_indices(std::move(cols_idx)),
        values(std::move(vals)) {
    validate();
  }

  std::size_t nnz() const { return values.size(); }

  void validate() const {
    if (row_offsets.size() != n_rows + 1) throw DimensionError("csr: row_offsets size");
    if (row_offsets.front() != 0) throw DimensionError("csr: row_offsets[0] != 0");
    if (col_indices.size() != values.size()) throw DimensionError("csr: col/value size mismatch");
    if (row_offsets.back() != values.size()) throw DimensionError("csr: offsets do not cover nnz");
    for (std::size_t i = 0; i < n_rows; ++i) {
      if (row_offsets[i] > row_offsets[i + 1]) throw DimensionError("csr: offsets decrease");
      for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
        if (col_indices[k] >= n_cols) throw DimensionError("csr: column index out of range");
        if (k > row_offsets[i] && col_indices[k] <= col_indices[k - 1])
          throw DimensionError("csr: columns not strictly increasing within row");
      }
    }
  }

  // Builds a CSR matrix from (row, col, value) triplets. Duplicate entries
  // are summed; fully zero rows are allowed.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<std::tuple<std::size_t, std::size_t, double>> trip) {
    std::sort(trip.begin(), trip.end(), [](const auto& a, const auto& b) {
      return std::tie(std::get<0>(a), std::get<1>(a)) <
             std::tie(std::get<0>(b), std::get<1>(b));
    });
    SparseMatrix m;
    m.n_rows = rows;
    m.n_cols = cols;
    m.row_offsets.assign(rows + 1, 0);
    m.col_indices.clear();
    m.values.clear();
    m.col_indices.reserve(trip.size());
    m.values.reserve(trip.size());
    for (std::size_t t = 0; t < trip.size();) {
      const std::size_t r = std::get<0>(trip[t]);
      const std::size_t c = std::get<1>(trip[t]);
      if (r >= rows || c >= cols) throw Error("csr: triplet out of range");
      double v = 0.0;
      while (t < trip.size() && std::get<0>(trip[t]) == r && std::get<1>(trip[t]) == c) {
        v += std::get<2>(trip[t]);
        ++t;
      }
      m.col_indices.push_back(c);
      m.values.push_back(v);
      ++m.row_offsets[r + 1];
    }
    for (std::size_t i = 0; i < rows; ++i) m.row_offsets[i + 1] += m.row_offsets[i];
    m.validate();
    return m;
  }

  static SparseMatrix identity(std::size_t n) {
    SparseMatrix m;
    m.n_rows = m.n_cols = n;
    m.row_offsets.resize(n + 1);
    m.col_indices.resize(n);
    m.values.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      m.row_offsets[i + 1] = i + 1;
      m.col_indices[i] = i;
    }
    return m;
  }

  double diagonal_entry(std::size_t i) const {
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
      if (col_indices[k] == i) return values[k];
    return 0.0;
  }
};

// y = A x. Charges nnz(A) MACs.
inline void spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> y,
                 OpLedger& ledger) {
  if (x.size() != A.n_cols || y.size() != A.n_rows) throw DimensionError("spmv: shape");
  for (std::size_t i = 0; i < A.n_rows; ++i) {
    double s = 0.0;
    for (std::size_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
      s += A.values[k] * x[A.col_indices[k]];
    y[i] = s;
  }
  ledger.charge_macs(A.nnz());
}

inline std::vector<double> spmv(const SparseMatrix& A, std::span<const double> x,
                                OpLedger& ledger) {
  std::vector<double> y(A.n_rows);
  spmv(A, x, y, ledger);
  return y;
}

// r = f - A u. Charges nnz(A) MACs (subtractions are unpaired adds).
inline void residual(const SparseMatrix& A, std::span<const double> u,
                     std::span<const double> f, std::span<double> r, OpLedger& ledger) {
  if (f.size() != A.n_rows || r.size() != A.n_rows) throw DimensionError("residual: shape");
  spmv(A, u, r, ledger);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = f[i] - r[i];
}

// Structural transpose (uncharged; setup-phase utility).
inline SparseMatrix transpose(const SparseMatrix& A) {
  SparseMatrix T;
  T.n_rows = A.n_cols;
  T.n_cols = A.n_rows;
  T.row_offsets.assign(A.n_cols + 1, 0);
  for (std::size_t c : A.col_indices) ++T.row_offsets[c + 1];
  for (std::size_t i = 0; i < A.n_cols; ++i) T.row_offsets[i + 1] += T.row_offsets[i];
  T.col_indices.resize(A.nnz());
  T.values.resize(A.nnz());
  std::vector<std::size_t> next(T.row_offsets.begin(), T.row_offsets.end() - 1);
  for (std::size_t i = 0; i < A.n_rows; ++i) {
    for (std::size_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
      const std::size_t c = A.col_indices[k];
      T.col_indices[next[c]] = i;
      T.values[next[c]] = A.values[k];
      ++next[c];
    }
  }
  T.validate();
  return T;
}

inline SparseMatrix scaled(const SparseMatrix& A, double alpha) {
  SparseMatrix B = A;
  for (double& v : B.values) v *= alpha;
  return B;
}

// C = A B via row-wise accumulation (uncharged; setup-phase utility).
inline SparseMatrix matmul(const SparseMatrix& A, const SparseMatrix& B) {
  if (A.n_cols != B.n_rows) throw DimensionError("matmul: inner dimension");
  SparseMatrix C;
  C.n_rows = A.n_rows;
  C.n_cols = B.n_cols;
  C.row_offsets.assign(A.n_rows + 1, 0);
  std::vector<double> acc(B.n_cols, 0.0);
  std::vector<std::size_t> touched;
  for (std::size_t i = 0; i < A.n_rows; ++i) {
    touched.clear();
    for (std::size_t ka = A.row_offsets[i]; ka < A.row_offsets[i + 1]; ++ka) {
      const std::size_t j = A.col_indices[ka];
      const double av = A.values[ka];
      for (std::size_t kb = B.row_offsets[j]; kb < B.row_offsets[j + 1]; ++kb) {
        const std::size_t c = B.col_indices[kb];
        if (acc[c] == 0.0 &&
            std::find(touched.begin(), touched.end(), c) == touched.end())
          touched.push_back(c);
        acc[c] += av * B.values[kb];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::size_t c : touched) {
      C.col_indices.push_back(c);
      C.values.push_back(acc[c]);
      acc[c] = 0.0;
    }
    C.row_offsets[i + 1] = C.col_indices.size();
  }
  C.validate();
  return C;
}

// Kronecker product A (x) B (uncharged; used to build tensor-grid transfers).
inline SparseMatrix kron(const SparseMatrix& A, const SparseMatrix& B) {
  SparseMatrix K;
  K.n_rows = A.n_rows * B.n_rows;
  K.n_cols = A.n_cols * B.n_cols;
  K.row_offsets.assign(K.n_rows + 1, 0);
  K.col_indices.reserve(A.nnz() * B.nnz());
  K.values.reserve(A.nnz() * B.nnz());
  for (std::size_t ia = 0; ia < A.n_rows; ++ia) {
    for (std::size_t ib = 0; ib < B.n_rows; ++ib) {
      const std::size_t row = ia * B.n_rows + ib;
      for (std::size_t ka = A.row_offsets[ia]; ka < A.row_offsets[ia + 1]; ++ka) {
        for (std::size_t kb = B.row_offsets[ib]; kb < B.row_offsets[ib + 1]; ++kb) {
          K.col_indices.push_back(A.col_indices[ka] * B.n_cols + B.col_indices[kb]);
          K.values.push_back(A.values[ka] * B.values[kb]);
        }
      }
      K.row_offsets[row + 1] = K.col_indices.size();
    }
  }
  K.validate();
  return K;
}

}  // namespace metasolve
