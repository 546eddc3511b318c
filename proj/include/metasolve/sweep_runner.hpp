#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "enumerate.hpp"
#include "errors.hpp"
#include "meta_solver.hpp"
#include "metrics.hpp"
#include "poisson.hpp"
#include "presets.hpp"
#include "run_config.hpp"

namespace metasolve {

// Deepest multigrid coordinate the filters leave reachable; the hierarchy
// only needs that many coarse levels.
inline int max_mg_requested(const Filters& f, Family family) {
  const auto& allow = family == Family::Relax ? f.x4 : f.x5;
  if (allow.empty()) return 2;
  int mx = 0;
  for (int l = 0; l <= 2; ++l)
    for (const auto& s : allow)
      if (s == std::to_string(l)) mx = std::max(mx, l);
  return mx;
}

inline ProblemInstance prepare_problem(const RunConfig& cfg) {
  ProblemInstance p = assemble_poisson(cfg.dim, cfg.resolved_n(), cfg.kappa_id);
  const int levels = max_mg_requested(cfg.filters, cfg.family);
  if (levels > 0) coarsen(p, static_cast<std::size_t>(levels));
  return p;
}

namespace detail {

inline nlohmann::json relax_config_json(const RelaxMetaConfig& c, std::size_t m) {
  return {{"family", "relax"},
          {"x1_provider", c.provider.label},
          {"x2_smoother", std::string(to_string(c.smoother))},
          {"x3_proportion", "1/" + std::to_string(c.x3_denom)},
          {"x4_mg_levels", c.mg_levels},
          {"basis", std::string(to_string(c.provider.basis_kind))},
          {"m", m},
          {"omega", c.omega},
          {"symmetric_kernel", kernel_is_symmetric(c.smoother)}};
}

inline nlohmann::json krylov_config_json(const KrylovMetaConfig& c, std::size_t m) {
  return {{"family", "krylov"},
          {"x1_provider", c.provider.label},
          {"x2_krylov", std::string(to_string(c.krylov))},
          {"x3_smoother", std::string(to_string(c.smoother))},
          {"x4_schedule", std::to_string(c.schedule_n) + "-1-" + std::to_string(c.schedule_n)},
          {"x5_mg_levels", c.mg_levels},
          {"basis", std::string(to_string(c.provider.basis_kind))},
          {"m", m},
          {"omega", c.omega},
          {"restart", c.restart},
          {"symmetric_kernel", kernel_is_symmetric(c.smoother)},
          {"fcg_with_nonsymmetric_kernel",
           c.krylov == KrylovKind::FCG && !kernel_is_symmetric(c.smoother)}};
}

inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  for (std::size_t w = 0; w < nw; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

// A run that throws a solver-side error (breakdown, divergence, singular
// coarse operator) is recorded as nonconverged with the zero iterate rather
// than aborting a long sweep; the error text travels in the config blob.
template <typename RunFn>
PerformanceRecord guarded_run(const std::string& id, Family family, nlohmann::json cj,
                              double training_time_s, const ProblemInstance& p,
                              std::size_t max_iters, RunFn&& run) {
  OpLedger ledger;
  const auto t0 = std::chrono::steady_clock::now();
  bool failed = false;
  MetaRunResult res;
  try {
    res = run(ledger);
  } catch (const Error& e) {
    failed = true;
    cj["error"] = e.what();
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (failed) {
    res.u.assign(p.n_unknowns(), 0.0);
    res.trace = SolveTrace{};
    res.trace.iterations = max_iters;
    res.trace.residual_history = {1.0};
    res.trace.converged = false;
  }
  return measure(res.u, res.trace, ledger, training_time_s, p.u_ref, wall, id, family,
                 std::move(cj), /*allow_nonconverged=*/true);
}

}  // namespace detail

// Runs every enumerated configuration of the requested family against the
// problem, one record per configuration in enumeration order. jobs > 1
// distributes configurations over a worker pool; each worker owns its ledger,
// so f2-f7 are identical to the sequential run and only f1 varies.
inline std::vector<PerformanceRecord> run_sweep(const RunConfig& cfg,
                                                const ProblemInstance& p) {
  std::vector<PerformanceRecord> records;

  if (cfg.family == Family::Relax) {
    const auto providers =
        cfg.providers.empty() ? default_relax_presets() : cfg.providers;
    const auto configs = enumerate_relax(providers, cfg.filters, cfg.omega);
    records.resize(configs.size());
    const auto work = [&](std::size_t i) {
      const RelaxMetaConfig& c = configs[i];
      const std::size_t m = preset_m(c.provider, p);
      records[i] = detail::guarded_run(
          c.id, Family::Relax, detail::relax_config_json(c, m),
          c.provider.training_time_s, p, cfg.max_iters_relax, [&](OpLedger& led) {
            return run_relax_meta(c, p, cfg.tol_rel, cfg.max_iters_relax, led);
          });
    };
    detail::parallel_for(configs.size(), cfg.jobs, work);
  } else {
    const auto providers =
        cfg.providers.empty() ? default_krylov_presets() : cfg.providers;
    const auto configs = enumerate_krylov(providers, cfg.filters, cfg.omega, cfg.restart);
    records.resize(configs.size());
    const auto work = [&](std::size_t i) {
      const KrylovMetaConfig& c = configs[i];
      const std::size_t m = preset_m(c.provider, p);
      records[i] = detail::guarded_run(
          c.id, Family::Krylov, detail::krylov_config_json(c, m),
          c.provider.training_time_s, p, cfg.max_iters_krylov, [&](OpLedger& led) {
            return run_krylov_meta(c, p, cfg.tol_rel, cfg.max_iters_krylov, led);
          });
    };
    detail::parallel_for(configs.size(), cfg.jobs, work);
  }
  return records;
}

}  // namespace metasolve
