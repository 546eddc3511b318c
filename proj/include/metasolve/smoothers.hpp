#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ledger.hpp"
#include "sparse.hpp"
#include "vector_ops.hpp"

namespace metasolve {

enum class SmootherKind { Jacobi, GaussSeidel, SOR, SSOR };

inline const char* to_string(SmootherKind k) {
  switch (k) {
    case SmootherKind::Jacobi: return "Jacobi";
    case SmootherKind::GaussSeidel: return "GS";
    case SmootherKind::SOR: return "SOR";
    case SmootherKind::SSOR: return "SSOR";
  }
  return "?";
}

inline SmootherKind smoother_from_string(const std::string& s) {
  if (s == "Jacobi") return SmootherKind::Jacobi;
  if (s == "GS") return SmootherKind::GaussSeidel;
  if (s == "SOR") return SmootherKind::SOR;
  if (s == "SSOR") return SmootherKind::SSOR;
  throw ConfigError("smoother: unknown kind '" + s + "'");
}

// Pointwise relaxation configuration. omega is the relaxation factor for
// SOR/SSOR (default 1.5) and the damping factor for Jacobi (default 1.0,
// i.e. undamped); Gauss-Seidel ignores it. Valid range is (0, 2).
struct SmootherConfig {
  SmootherKind kind = SmootherKind::Jacobi;
  double omega = 1.0;

  static SmootherConfig jacobi(double damping = 1.0) {
    return {SmootherKind::Jacobi, damping};
  }
  static SmootherConfig gauss_seidel() { return {SmootherKind::GaussSeidel, 1.0}; }
  static SmootherConfig sor(double omega = 1.5) { return {SmootherKind::SOR, omega}; }
  static SmootherConfig ssor(double omega = 1.5) { return {SmootherKind::SSOR, omega}; }
};

namespace detail {

inline void check_smoother(const SmootherConfig& cfg, const SparseMatrix& A,
                           std::span<const double> u, std::span<const double> f) {
  if (A.n_rows != A.n_cols) throw DimensionError("sweep: square matrix required");
  if (u.size() != A.n_rows || f.size() != A.n_rows) throw DimensionError("sweep: shape");
  if (!(cfg.omega > 0.0) || !(cfg.omega < 2.0))
    throw SmootherError("sweep: omega outside (0, 2)");
}

// One damped-Jacobi pass: u_i += omega * ((f_i - sum_{j != i} a_ij u_j) / a_ii - u_i).
// Reads the incoming iterate only, hence the separate output span.
inline void jacobi_pass(const SparseMatrix& A, std::span<const double> u,
                        std::span<const double> f, double omega, std::span<double> out) {
  for (std::size_t i = 0; i < A.n_rows; ++i) {
    double sigma = 0.0;
    double diag = 0.0;
    for (std::size_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
      if (A.col_indices[k] == i)
        diag = A.values[k];
      else
        sigma += A.values[k] * u[A.col_indices[k]];
    }
    if (diag == 0.0) throw SmootherError("sweep: zero diagonal at row " + std::to_string(i));
    const double cand = (f[i] - sigma) / diag;
    out[i] = u[i] + omega * (cand - u[i]);
  }
}

// One SOR pass over rows in the given direction, updating in place.
// omega = 1 reduces to Gauss-Seidel.
inline void sor_pass(const SparseMatrix& A, std::span<double> u, std::span<const double> f,
                     double omega, bool forward) {
  const std::size_t n = A.n_rows;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t i = forward ? step : n - 1 - step;
    double sigma = 0.0;
    double diag = 0.0;
    for (std::size_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
      if (A.col_indices[k] == i)
        diag = A.values[k];
      else
        sigma += A.values[k] * u[A.col_indices[k]];
    }
    if (diag == 0.0) throw SmootherError("sweep: zero diagonal at row " + std::to_string(i));
    const double cand = (f[i] - sigma) / diag;
    u[i] = (omega == 1.0) ? cand : u[i] + omega * (cand - u[i]);
  }
}

}  // namespace detail

// One full sweep, updating u in place. MAC charges (exact, per sweep):
//   Jacobi  nnz + n   (off-diagonal products + diagonal divisions + damping blend)
//   GS      nnz
//   SOR     nnz + n
//   SSOR    2 * (nnz + n)   (forward then backward SOR pass)
inline void sweep_inplace(const SmootherConfig& cfg, const SparseMatrix& A,
                          std::span<double> u, std::span<const double> f,
                          OpLedger& ledger) {
  detail::check_smoother(cfg, A, u, f);
  const std::uint64_t nnz = A.nnz();
  const std::uint64_t n = A.n_rows;
  switch (cfg.kind) {
    case SmootherKind::Jacobi: {
      TrackedVector next(A.n_rows, ledger);
      detail::jacobi_pass(A, u, f, cfg.omega, next.get());
      std::copy(next.get().begin(), next.get().end(), u.begin());
      ledger.charge_macs(nnz + n);
      break;
    }
    case SmootherKind::GaussSeidel:
      detail::sor_pass(A, u, f, 1.0, true);
      ledger.charge_macs(nnz);
      break;
    case SmootherKind::SOR:
      detail::sor_pass(A, u, f, cfg.omega, true);
      ledger.charge_macs(nnz + n);
      break;
    case SmootherKind::SSOR:
      detail::sor_pass(A, u, f, cfg.omega, true);
      detail::sor_pass(A, u, f, cfg.omega, false);
      ledger.charge_macs(2 * (nnz + n));
      break;
  }
}

// Functional form of one sweep.
inline std::vector<double> sweep(const SmootherConfig& cfg, const SparseMatrix& A,
                                 std::span<const double> u, std::span<const double> f,
                                 OpLedger& ledger) {
  std::vector<double> out(u.begin(), u.end());
  sweep_inplace(cfg, A, out, f, ledger);
  return out;
}

// Estimates the spectral radius of the sweep's error-propagation operator
// E = I - M^{-1} A by power iteration, using a two-step norm ratio so
// symmetric +/- eigenvalue pairs (plain Jacobi on symmetric problems) still
// settle. Deterministic seeded start; relative tolerance 1e-6; intended for
// small SPD matrices (n <= 512). Throws EstimateError if the estimate fails
// to settle within 1e4 applications.
inline double spectral_radius_estimate(const SmootherConfig& cfg, const SparseMatrix& A) {
  if (A.n_rows != A.n_cols) throw DimensionError("spectral_radius_estimate: square");
  if (A.n_rows > 512) throw EstimateError("spectral_radius_estimate: n > 512");
  const std::size_t n = A.n_rows;
  std::mt19937_64 gen(0x5EED5EEDULL);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> e(n);
  for (double& v : e) v = dist(gen);
  OpLedger scratch;
  double nrm = norm2(e, scratch);
  if (nrm == 0.0) return 0.0;
  for (double& v : e) v /= nrm;

  const std::vector<double> zero_f(n, 0.0);
  double ratio_prev = -1.0;
  double est_prev = -1.0;
  for (int it = 0; it < 10000; ++it) {
    std::vector<double> e2 = sweep(cfg, A, e, zero_f, scratch);
    const double r = norm2(e2, scratch);  // = ||E e|| with ||e|| = 1
    if (r < 1e-150) return 0.0;
    for (double& v : e2) v /= r;
    e.swap(e2);
    if (ratio_prev >= 0.0) {
      const double est = std::sqrt(ratio_prev * r);
      if (est_prev >= 0.0 && std::abs(est - est_prev) <= 1e-6 * std::max(est, 1e-30))
        return est;
      est_prev = est;
    }
    ratio_prev = r;
  }
  throw EstimateError("spectral_radius_estimate: no convergence in 1e4 iterations");
}

// MAC cost of one sweep; mirrors the charges in sweep_inplace so callers
// can budget composite kernels exactly.
inline std::uint64_t sweep_macs(const SmootherConfig& cfg, const SparseMatrix& A) {
  const std::uint64_t nnz = A.nnz();
  const std::uint64_t n = A.n_rows;
  switch (cfg.kind) {
    case SmootherKind::Jacobi: return nnz + n;
    case SmootherKind::GaussSeidel: return nnz;
    case SmootherKind::SOR: return nnz + n;
    case SmootherKind::SSOR: return 2 * (nnz + n);
  }
  return 0;
}

}  // namespace metasolve
