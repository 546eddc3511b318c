#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "coarse_space.hpp"
#include "enumerate.hpp"
#include "errors.hpp"
#include "krylov.hpp"
#include "ledger.hpp"
#include "poisson.hpp"
#include "presets.hpp"
#include "smoothers.hpp"
#include "sparse.hpp"
#include "vector_ops.hpp"

namespace metasolve {

struct MetaRunResult {
  std::vector<double> u;
  SolveTrace trace;
  // True when the composed preconditioning kernel is a symmetric operator
  // (Jacobi/SSOR smoothing with the symmetric coarse correction); FCG's SPD
  // contract only holds then, so harnesses flag FCG runs where this is
  // false instead of trusting them silently.
  bool symmetric_kernel = true;
};

namespace detail {

// Smoother as composed into a meta-solver: Jacobi is damped with 2/3 inside
// any multigrid context (standard smoothing choice) and left plain in the
// standalone families; SOR/SSOR always use the configured relaxation factor.
inline SmootherConfig meta_smoother(SmootherKind kind, double omega, bool in_multigrid) {
  switch (kind) {
    case SmootherKind::Jacobi:
      return SmootherConfig::jacobi(in_multigrid ? 2.0 / 3.0 : 1.0);
    case SmootherKind::GaussSeidel: return SmootherConfig::gauss_seidel();
    case SmootherKind::SOR: return SmootherConfig::sor(omega);
    case SmootherKind::SSOR: return SmootherConfig::ssor(omega);
  }
  throw SmootherError("meta_smoother: bad kind");
}

inline bool kernel_is_symmetric(SmootherKind kind) {
  return kind == SmootherKind::Jacobi || kind == SmootherKind::SSOR;
}

using FineSmoother = std::function<void(std::span<double>, std::span<const double>)>;

// Symmetric V-cycle over hierarchy levels [level, depth]: the fine kernel
// smooths pre and post at level 0, the pointwise smoother does one pre and
// one post sweep at intermediate levels, and the coarsest in-use level is
// solved directly from its cached factorization. Transfers use the stored
// full-weighting/interpolation pair, so the cycle is a symmetric operator
// whenever the smoothers are.
inline void vcycle(const GridHierarchy& H, std::size_t depth, const FineSmoother& fine,
                   const SmootherConfig& mid_cfg, std::size_t level, std::span<double> u,
                   std::span<const double> f, OpLedger& ledger) {
  if (level == depth) {
    const std::vector<double> x = lu_solve(*H.levels[level].direct, f, ledger);
    std::copy(x.begin(), x.end(), u.begin());
    return;
  }
  const GridLevel& L = H.levels[level];
  if (level == 0)
    fine(u, f);
  else
    sweep_inplace(mid_cfg, L.A, u, f, ledger);

  {
    TrackedVector r(L.A.n_rows, ledger);
    residual(L.A, u, f, r.get(), ledger);
    const std::size_t nc = H.levels[level + 1].A.n_rows;
    TrackedVector fc(nc, ledger);
    spmv(L.R, r.get(), fc.get(), ledger);
    TrackedVector ec(nc, ledger);
    vcycle(H, depth, fine, mid_cfg, level + 1, ec.get(), fc.get(), ledger);
    TrackedVector corr(L.A.n_rows, ledger);
    spmv(L.P, ec.get(), corr.get(), ledger);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += corr[i];
  }

  if (level == 0)
    fine(u, f);
  else
    sweep_inplace(mid_cfg, L.A, u, f, ledger);
}

inline void require_hierarchy(const ProblemInstance& p, int mg_levels,
                              const std::string& id) {
  if (mg_levels < 0 || mg_levels > 2)
    throw GridSizeError("meta '" + id + "': mg level must be 0, 1, or 2");
  if (p.hierarchy.depth() <= static_cast<std::size_t>(mg_levels))
    throw GridSizeError("meta '" + id + "': hierarchy has " +
                        std::to_string(p.hierarchy.depth()) +
                        " level(s); coarsen the problem first");
}

}  // namespace detail

// Pure stationary iteration (sweep until converged); the baseline the
// hybrid schedules are compared against.
inline MetaRunResult run_stationary(const SmootherConfig& sm, const SparseMatrix& A,
                                    std::span<const double> f, double tol_rel,
                                    std::size_t max_iters, OpLedger& ledger) {
  MetaRunResult out;
  out.symmetric_kernel = detail::kernel_is_symmetric(sm.kind);
  out.trace.residual_history.push_back(1.0);
  OpLedger probe;
  const double fn = norm2(f, probe);
  TrackedVector u(A.n_rows, ledger);
  if (fn == 0.0) {
    out.trace.converged = true;
    out.u = u.take();
    return out;
  }
  TrackedVector r(A.n_rows, ledger);
  while (out.trace.iterations < max_iters) {
    sweep_inplace(sm, A, u.get(), f, ledger);
    ++out.trace.iterations;
    residual(A, u.get(), f, r.get(), ledger);
    const double rel = norm2(r.get(), ledger) / fn;
    out.trace.residual_history.push_back(rel);
    if (rel <= tol_rel) {
      out.trace.converged = true;
      break;
    }
    if (rel > 1e6)
      throw DivergenceError("stationary " + std::string(to_string(sm.kind)) +
                            ": residual exceeded 1e6 x initial");
  }
  out.u = u.take();
  return out;
}

// Relaxation-family meta-solver. Iterates cycles of length x3_denom: within
// each cycle, x3_denom - 1 smoother sweeps followed by exactly one coarse
// correction u += M2(f - A u). Convergence is monitored after every fine
// iteration (sweep or correction), and trace iterations count those fine
// iterations. With mg_levels > 0 one whole hybrid cycle serves as the
// fine-level smoother of a V-cycle over the geometric hierarchy; each outer
// V-cycle then counts as one trace iteration.
inline MetaRunResult run_relax_meta(const RelaxMetaConfig& cfg, const ProblemInstance& p,
                                    double tol_rel, std::size_t max_iters,
                                    OpLedger& ledger) {
  detail::require_hierarchy(p, cfg.mg_levels, cfg.id);
  if (cfg.x3_denom < 2) throw ConfigError("relax meta '" + cfg.id + "': x3 denom < 2");
  const SparseMatrix& A = p.A;
  const std::size_t n = p.n_unknowns();
  const std::size_t m = preset_m(cfg.provider, p);
  CoarseOperator op =
      build_coarse_operator(build_basis(cfg.provider.provider(), m, p), A, ledger);
  const bool in_mg = cfg.mg_levels > 0;
  const SmootherConfig sm = detail::meta_smoother(cfg.smoother, cfg.omega, in_mg);

  MetaRunResult out;
  out.symmetric_kernel = detail::kernel_is_symmetric(cfg.smoother);
  out.trace.residual_history.push_back(1.0);
  OpLedger probe;
  const double fn = norm2(p.f, probe);
  TrackedVector u(n, ledger);
  if (fn == 0.0) {
    out.trace.converged = true;
    out.u = u.take();
    return out;
  }
  TrackedVector r(n, ledger);
  TrackedVector z(n, ledger);
  const std::size_t cycle = cfg.x3_denom;

  const auto check_progress = [&](double rel) {
    out.trace.residual_history.push_back(rel);
    if (rel <= tol_rel) {
      out.trace.converged = true;
      return true;
    }
    if (rel > 1e6)
      throw DivergenceError("relax meta '" + cfg.id + "': residual exceeded 1e6 x initial");
    return false;
  };

  if (!in_mg) {
    std::size_t step = 0;
    while (out.trace.iterations < max_iters) {
      if (step % cycle < cycle - 1) {
        sweep_inplace(sm, A, u.get(), p.f, ledger);
      } else {
        residual(A, u.get(), p.f, r.get(), ledger);
        apply_M2(op, r.get(), z.get(), ledger);
        for (std::size_t i = 0; i < n; ++i) u[i] += z[i];
      }
      ++step;
      ++out.trace.iterations;
      residual(A, u.get(), p.f, r.get(), ledger);
      if (check_progress(norm2(r.get(), ledger) / fn)) break;
    }
  } else {
    const detail::FineSmoother hybrid_cycle = [&](std::span<double> uu,
                                                  std::span<const double> ff) {
      for (std::size_t s = 0; s + 1 < cycle; ++s) sweep_inplace(sm, A, uu, ff, ledger);
      residual(A, uu, ff, r.get(), ledger);
      apply_M2(op, r.get(), z.get(), ledger);
      for (std::size_t i = 0; i < n; ++i) uu[i] += z[i];
    };
    while (out.trace.iterations < max_iters) {
      detail::vcycle(p.hierarchy, static_cast<std::size_t>(cfg.mg_levels), hybrid_cycle,
                     sm, 0, u.get(), p.f, ledger);
      ++out.trace.iterations;
      residual(A, u.get(), p.f, r.get(), ledger);
      if (check_progress(norm2(r.get(), ledger) / fn)) break;
    }
  }
  out.u = u.take();
  return out;
}

// Krylov-family meta-solver. The preconditioner applies the N-1-N kernel
// (N smoother sweeps on the residual equation, one coarse correction, N
// more sweeps); with mg_levels > 0 that kernel becomes the fine-level
// smoother of a V-cycle and the V-cycle is the preconditioner. Trace
// iterations are the flexible Krylov method's own iterations.
inline MetaRunResult run_krylov_meta(const KrylovMetaConfig& cfg, const ProblemInstance& p,
                                     double tol_rel, std::size_t max_iters,
                                     OpLedger& ledger) {
  detail::require_hierarchy(p, cfg.mg_levels, cfg.id);
  if (cfg.schedule_n < 1) throw ConfigError("krylov meta '" + cfg.id + "': N < 1");
  const SparseMatrix& A = p.A;
  const std::size_t n = p.n_unknowns();
  const std::size_t m = preset_m(cfg.provider, p);
  CoarseOperator op =
      build_coarse_operator(build_basis(cfg.provider.provider(), m, p), A, ledger);
  const bool in_mg = cfg.mg_levels > 0;
  const SmootherConfig sm = detail::meta_smoother(cfg.smoother, cfg.omega, in_mg);
  const std::size_t N = cfg.schedule_n;

  // N-1-N update of an iterate of A uu = ff; the coarse correction in the
  // middle is applied to the then-current residual.
  const auto nin_kernel = [&](std::span<double> uu, std::span<const double> ff,
                              OpLedger& led) {
    for (std::size_t s = 0; s < N; ++s) sweep_inplace(sm, A, uu, ff, led);
    TrackedVector rm(n, led);
    residual(A, uu, ff, rm.get(), led);
    TrackedVector corr(n, led);
    apply_M2(op, rm.get(), corr.get(), led);
    for (std::size_t i = 0; i < n; ++i) uu[i] += corr[i];
    for (std::size_t s = 0; s < N; ++s) sweep_inplace(sm, A, uu, ff, led);
  };

  Preconditioner precond;
  if (!in_mg) {
    precond = [&, nin_kernel](std::span<const double> rr, std::span<double> zz,
                              OpLedger& led) {
      std::fill(zz.begin(), zz.end(), 0.0);
      nin_kernel(zz, rr, led);
    };
  } else {
    precond = [&, nin_kernel](std::span<const double> rr, std::span<double> zz,
                              OpLedger& led) {
      std::fill(zz.begin(), zz.end(), 0.0);
      const detail::FineSmoother fine = [&](std::span<double> uu,
                                            std::span<const double> ff) {
        nin_kernel(uu, ff, led);
      };
      detail::vcycle(p.hierarchy, static_cast<std::size_t>(cfg.mg_levels), fine, sm, 0,
                     zz, rr, led);
    };
  }

  KrylovConfig kc;
  kc.kind = cfg.krylov;
  kc.restart = cfg.restart;
  kc.tol_rel = tol_rel;
  kc.max_iters = max_iters;
  KrylovResult res = krylov_solve(kc, A, p.f, precond, ledger);

  MetaRunResult out;
  out.u = std::move(res.u);
  out.trace = std::move(res.trace);
  out.symmetric_kernel = detail::kernel_is_symmetric(cfg.smoother);
  return out;
}

}  // namespace metasolve
