#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ledger.hpp"
#include "sparse.hpp"
#include "vector_ops.hpp"

namespace metasolve {

enum class KrylovKind { FGMRES, FCG, FBiCGStab };

inline const char* to_string(KrylovKind k) {
  switch (k) {
    case KrylovKind::FGMRES: return "FGMRES";
    case KrylovKind::FCG: return "FCG";
    case KrylovKind::FBiCGStab: return "FBiCGStab";
  }
  return "?";
}

inline KrylovKind krylov_from_string(const std::string& s) {
  if (s == "FGMRES") return KrylovKind::FGMRES;
  if (s == "FCG") return KrylovKind::FCG;
  if (s == "FBiCGStab") return KrylovKind::FBiCGStab;
  throw ConfigError("krylov: unknown kind '" + s + "'");
}

struct KrylovConfig {
  KrylovKind kind = KrylovKind::FGMRES;
  std::size_t restart = 50;    // FGMRES only
  double tol_rel = 1e-12;
  std::size_t max_iters = 500;
};

// Record of one solver run. residual_history holds relative residual
// 2-norms with residual_history[0] == 1 (zero initial guess); one entry is
// appended per iteration. converged == true guarantees the returned iterate
// satisfies ||f - A u|| / ||f|| <= tol_rel (verified against the true
// residual, not the recurrence).
struct SolveTrace {
  std::size_t iterations = 0;
  std::vector<double> residual_history;
  bool converged = false;
};

struct KrylovResult {
  std::vector<double> u;
  SolveTrace trace;
};

// Preconditioner application z = M(r). The operator may change between
// invocations (flexible methods store the preconditioned directions), and
// charges its own work to the ledger it is handed.
using Preconditioner =
    std::function<void(std::span<const double>, std::span<double>, OpLedger&)>;

inline Preconditioner identity_preconditioner() {
  return [](std::span<const double> r, std::span<double> z, OpLedger&) {
    std::copy(r.begin(), r.end(), z.begin());
  };
}

namespace detail {

inline double true_rel_residual(const SparseMatrix& A, std::span<const double> u,
                                std::span<const double> f, double f_norm,
                                OpLedger& ledger) {
  TrackedVector r(A.n_rows, ledger);
  residual(A, u, f, r.get(), ledger);
  return norm2(r.get(), ledger) / f_norm;
}

// Right-preconditioned flexible GMRES with modified Gram-Schmidt and Givens
// rotations. The per-iteration history entry is the rotation-recurrence
// residual estimate, which is nonincreasing within a restart cycle; the
// convergence flag itself is decided on the recomputed true residual at
// cycle boundaries. Scalar rotation work is charged at 4 MACs per rotation
// generated or applied.
inline KrylovResult fgmres(const KrylovConfig& cfg, const SparseMatrix& A,
                           std::span<const double> f, const Preconditioner& precond,
                           OpLedger& ledger) {
  const std::size_t n = A.n_rows;
  KrylovResult out;
  out.trace.residual_history.push_back(1.0);
  TrackedVector u(n, ledger);
  OpLedger probe;
  const double f_norm = norm2(f, probe);
  if (f_norm == 0.0) {
    out.trace.converged = true;
    out.u = u.take();
    return out;
  }
  const std::size_t restart = cfg.restart == 0 ? 1 : cfg.restart;

  while (out.trace.iterations < cfg.max_iters) {
    TrackedVector r(n, ledger);
    residual(A, u.get(), f, r.get(), ledger);
    const double beta = norm2(r.get(), ledger);
    if (beta / f_norm <= cfg.tol_rel) {
      out.trace.converged = true;
      break;
    }

    std::vector<TrackedVector> V;
    std::vector<TrackedVector> Z;
    V.reserve(restart + 1);
    Z.reserve(restart);
    {
      TrackedVector v0(n, ledger);
      for (std::size_t i = 0; i < n; ++i) v0[i] = r[i] / beta;
      V.push_back(std::move(v0));
    }
    // Column-compressed Hessenberg via Givens: H holds R, g the rotated rhs.
    std::vector<std::vector<double>> H;
    std::vector<double> gs_c, gs_s;
    std::vector<double> g(restart + 1, 0.0);
    g[0] = beta;

    std::size_t j = 0;
    bool cycle_done = false;
    while (j < restart && out.trace.iterations < cfg.max_iters && !cycle_done) {
      TrackedVector z(n, ledger);
      precond(V[j].get(), z.get(), ledger);
      TrackedVector w(n, ledger);
      spmv(A, z.get(), w.get(), ledger);
      Z.push_back(std::move(z));

      std::vector<double> h(j + 2, 0.0);
      for (std::size_t i = 0; i <= j; ++i) {
        h[i] = dot(w.get(), V[i].get(), ledger);
        axpy(-h[i], V[i].get(), w.get(), ledger);
      }
      const double h_next = norm2(w.get(), ledger);  // pre-rotation subdiagonal
      h[j + 1] = h_next;

      for (std::size_t i = 0; i < j; ++i) {
        const double t = gs_c[i] * h[i] + gs_s[i] * h[i + 1];
        h[i + 1] = -gs_s[i] * h[i] + gs_c[i] * h[i + 1];
        h[i] = t;
        ledger.charge_macs(4);
      }
      const double denom = std::hypot(h[j], h[j + 1]);
      double c = 1.0, s = 0.0;
      if (denom > 0.0) {
        c = h[j] / denom;
        s = h[j + 1] / denom;
      }
      gs_c.push_back(c);
      gs_s.push_back(s);
      h[j] = c * h[j] + s * h[j + 1];
      h[j + 1] = 0.0;
      g[j + 1] = -s * g[j];
      g[j] = c * g[j];
      ledger.charge_macs(4);
      H.push_back(std::move(h));

      const double est = std::abs(g[j + 1]) / f_norm;
      ++out.trace.iterations;
      out.trace.residual_history.push_back(est);
      ++j;

      if (est <= cfg.tol_rel || h_next == 0.0) {
        cycle_done = true;  // converged estimate or happy breakdown
      } else {
        TrackedVector vnext(n, ledger);
        for (std::size_t i = 0; i < n; ++i) vnext[i] = w[i] / h_next;
        V.push_back(std::move(vnext));
      }
    }

    // y solves the j x j triangular system R y = g; u += sum y_k Z_k.
    std::vector<double> y(j, 0.0);
    for (std::size_t i = j; i-- > 0;) {
      double s_acc = g[i];
      for (std::size_t k = i + 1; k < j; ++k) {
        s_acc -= H[k][i] * y[k];
        ledger.charge_macs(1);
      }
      y[i] = s_acc / H[i][i];
      ledger.charge_macs(1);
    }
    for (std::size_t k = 0; k < j; ++k) axpy(y[k], Z[k].get(), u.get(), ledger);
  }

  if (!out.trace.converged)
    out.trace.converged =
        detail::true_rel_residual(A, u.get(), f, f_norm, ledger) <= cfg.tol_rel;
  out.u = u.take();
  return out;
}

// Flexible conjugate gradients with single-direction orthogonalization:
// each preconditioned residual is A-orthogonalized against the previous
// search direction only. Reduces to preconditioned CG when the
// preconditioner is a fixed SPD operator.
inline KrylovResult fcg(const KrylovConfig& cfg, const SparseMatrix& A,
                        std::span<const double> f, const Preconditioner& precond,
                        OpLedger& ledger) {
  const std::size_t n = A.n_rows;
  KrylovResult out;
  out.trace.residual_history.push_back(1.0);
  TrackedVector u(n, ledger);
  OpLedger probe;
  const double f_norm = norm2(f, probe);
  if (f_norm == 0.0) {
    out.trace.converged = true;
    out.u = u.take();
    return out;
  }

  TrackedVector r(std::vector<double>(f.begin(), f.end()), ledger);
  TrackedVector z(n, ledger);
  TrackedVector d(n, ledger);
  TrackedVector q(n, ledger);
  double curv_prev = 0.0;
  bool have_prev = false;

  while (out.trace.iterations < cfg.max_iters) {
    precond(r.get(), z.get(), ledger);
    if (!have_prev) {
      std::copy(z.get().begin(), z.get().end(), d.get().begin());
    } else {
      const double beta = dot(z.get(), q.get(), ledger) / curv_prev;
      for (std::size_t i = 0; i < n; ++i) d[i] = z[i] - beta * d[i];
      ledger.charge_macs(n);
    }
    spmv(A, d.get(), q.get(), ledger);
    const double curv = dot(d.get(), q.get(), ledger);
    if (!(curv > 0.0) || std::abs(curv) < 1e-30)
      throw BreakdownError("fcg: nonpositive curvature (d, A d) = " + std::to_string(curv));
    const double alpha = dot(r.get(), d.get(), ledger) / curv;
    axpy(alpha, d.get(), u.get(), ledger);
    axpy(-alpha, q.get(), r.get(), ledger);
    curv_prev = curv;
    have_prev = true;

    ++out.trace.iterations;
    const double rel = norm2(r.get(), ledger) / f_norm;
    out.trace.residual_history.push_back(rel);
    if (rel <= cfg.tol_rel &&
        detail::true_rel_residual(A, u.get(), f, f_norm, ledger) <= cfg.tol_rel) {
      out.trace.converged = true;
      break;
    }
  }
  out.u = u.take();
  return out;
}

// Right-preconditioned BiCGStab; the preconditioner is applied inside both
// half-steps. Vanishing recurrence scalars raise BreakdownError naming the
// scalar.
inline KrylovResult fbicgstab(const KrylovConfig& cfg, const SparseMatrix& A,
                              std::span<const double> f, const Preconditioner& precond,
                              OpLedger& ledger) {
  const std::size_t n = A.n_rows;
  KrylovResult out;
  out.trace.residual_history.push_back(1.0);
  TrackedVector u(n, ledger);
  OpLedger probe;
  const double f_norm = norm2(f, probe);
  if (f_norm == 0.0) {
    out.trace.converged = true;
    out.u = u.take();
    return out;
  }

  TrackedVector r(std::vector<double>(f.begin(), f.end()), ledger);
  TrackedVector r_hat(std::vector<double>(f.begin(), f.end()), ledger);
  TrackedVector p(n, ledger), v(n, ledger), s(n, ledger), t(n, ledger);
  TrackedVector p_hat(n, ledger), s_hat(n, ledger);
  double rho_prev = 1.0, alpha = 1.0, omega = 1.0;
  bool first = true;

  while (out.trace.iterations < cfg.max_iters) {
    const double rho = dot(r_hat.get(), r.get(), ledger);
    if (std::abs(rho) < 1e-30) throw BreakdownError("fbicgstab: rho vanished");
    if (first) {
      std::copy(r.get().begin(), r.get().end(), p.get().begin());
      first = false;
    } else {
      const double beta = (rho / rho_prev) * (alpha / omega);
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      ledger.charge_macs(2 * static_cast<std::uint64_t>(n));
    }
    precond(p.get(), p_hat.get(), ledger);
    spmv(A, p_hat.get(), v.get(), ledger);
    const double rv = dot(r_hat.get(), v.get(), ledger);
    if (std::abs(rv) < 1e-30) throw BreakdownError("fbicgstab: (r_hat, v) vanished");
    alpha = rho / rv;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    ledger.charge_macs(n);

    const double s_rel = norm2(s.get(), ledger) / f_norm;
    if (s_rel <= cfg.tol_rel) {
      axpy(alpha, p_hat.get(), u.get(), ledger);
      ++out.trace.iterations;
      out.trace.residual_history.push_back(s_rel);
      if (detail::true_rel_residual(A, u.get(), f, f_norm, ledger) <= cfg.tol_rel) {
        out.trace.converged = true;
        break;
      }
      std::copy(s.get().begin(), s.get().end(), r.get().begin());
      rho_prev = rho;
      continue;
    }

    precond(s.get(), s_hat.get(), ledger);
    spmv(A, s_hat.get(), t.get(), ledger);
    const double tt = dot(t.get(), t.get(), ledger);
    if (std::abs(tt) < 1e-30) throw BreakdownError("fbicgstab: (t, t) vanished");
    omega = dot(t.get(), s.get(), ledger) / tt;
    if (std::abs(omega) < 1e-30) throw BreakdownError("fbicgstab: omega vanished");
    axpy(alpha, p_hat.get(), u.get(), ledger);
    axpy(omega, s_hat.get(), u.get(), ledger);
    for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
    ledger.charge_macs(n);

    ++out.trace.iterations;
    const double rel = norm2(r.get(), ledger) / f_norm;
    out.trace.residual_history.push_back(rel);
    if (rel <= cfg.tol_rel &&
        detail::true_rel_residual(A, u.get(), f, f_norm, ledger) <= cfg.tol_rel) {
      out.trace.converged = true;
      break;
    }
    rho_prev = rho;
  }
  out.u = u.take();
  return out;
}

}  // namespace detail

// Solves A u = f from a zero initial guess with the configured flexible
// Krylov method and right preconditioning.
inline KrylovResult krylov_solve(const KrylovConfig& cfg, const SparseMatrix& A,
                                 std::span<const double> f, const Preconditioner& precond,
                                 OpLedger& ledger) {
  if (A.n_rows != A.n_cols) throw DimensionError("krylov: square matrix required");
  if (f.size() != A.n_rows) throw DimensionError("krylov: rhs size");
  switch (cfg.kind) {
    case KrylovKind::FGMRES: return detail::fgmres(cfg, A, f, precond, ledger);
    case KrylovKind::FCG: return detail::fcg(cfg, A, f, precond, ledger);
    case KrylovKind::FBiCGStab: return detail::fbicgstab(cfg, A, f, precond, ledger);
  }
  throw ConfigError("krylov: bad kind");
}

}  // namespace metasolve
