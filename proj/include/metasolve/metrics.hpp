#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "enumerate.hpp"
#include "errors.hpp"
#include "krylov.hpp"
#include "ledger.hpp"
#include "vector_ops.hpp"

namespace metasolve {

// Canonical criterion order; every table, weight vector, and report keeps it.
inline constexpr std::array<const char*, 7> kCriterionNames = {
    "time_s",       "rel_error", "iterations",      "conv_rate",
    "memory_bytes", "macs",      "training_time_s",
};
inline constexpr std::size_t kNumCriteria = 7;

// One solver run reduced to the seven criteria. conv_rate is stored as
// measured (positive for converged runs, larger = faster); objective_vector
// negates it so optimization tables minimize every coordinate uniformly.
struct PerformanceRecord {
  std::string solver_id;
  Family family = Family::Relax;
  bool converged = false;
  double time_s = 0.0;
  double rel_error = 0.0;
  std::uint64_t iterations = 0;
  double conv_rate = 0.0;
  double memory_bytes = 0.0;
  std::uint64_t macs = 0;
  double training_time_s = 0.0;
  nlohmann::json config = nlohmann::json::object();

  std::vector<double> criteria() const {
    return {time_s,
            rel_error,
            static_cast<double>(iterations),
            conv_rate,
            memory_bytes,
            static_cast<double>(macs),
            training_time_s};
  }
};

// Criterion vector in minimization convention: identical to criteria()
// except conv_rate enters negated, so smaller is better in every slot.
inline std::vector<double> objective_vector(const PerformanceRecord& rec) {
  std::vector<double> v = rec.criteria();
  v[3] = -v[3];
  return v;
}

// Mean per-iteration residual reduction exponent: ln(rh[0]/rh[last]) / iters.
// Larger is better, so callers negate it when building minimization tables.
inline double convergence_rate(const SolveTrace& trace) {
  if (trace.residual_history.size() < 2 || trace.iterations == 0) return 0.0;
  const double first = trace.residual_history.front();
  const double last = trace.residual_history.back();
  if (first <= 0.0 || last <= 0.0) return 0.0;
  return std::log(first / last) / static_cast<double>(trace.iterations);
}

// Folds a finished run into a record. Iterations are clamped to >= 1 so the
// rate is always well defined; a zero reference norm has no relative error
// and is rejected. Non-converged runs are only admitted explicitly.
inline PerformanceRecord measure(std::span<const double> u, const SolveTrace& trace,
                                 const OpLedger& ledger, double basis_training_time_s,
                                 std::span<const double> u_ref, double wall_time_s,
                                 std::string solver_id, Family family,
                                 nlohmann::json config = nlohmann::json::object(),
                                 bool allow_nonconverged = false) {
  if (!trace.converged && !allow_nonconverged)
    throw MeasurementError("measure: run '" + solver_id +
                           "' did not converge; pass allow_nonconverged to record it");
  if (u.size() != u_ref.size())
    throw DimensionError("measure: solution/reference size mismatch");

  OpLedger probe;
  const double ref_norm = norm2(u_ref, probe);
  if (ref_norm == 0.0)
    throw MeasurementError("measure: reference solution has zero norm");
  std::vector<double> diff(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) diff[i] = u[i] - u_ref[i];
  const double err = norm2(diff, probe) / ref_norm;

  PerformanceRecord rec;
  rec.solver_id = std::move(solver_id);
  rec.family = family;
  rec.converged = trace.converged;
  rec.time_s = wall_time_s;
  rec.rel_error = err;
  rec.iterations = trace.iterations == 0 ? 1 : trace.iterations;
  rec.conv_rate = convergence_rate(trace);
  rec.memory_bytes = static_cast<double>(ledger.peak_reals()) * 8.0;
  rec.macs = ledger.macs();
  rec.training_time_s = basis_training_time_s;
  rec.config = std::move(config);

  for (double v : rec.criteria())
    if (!std::isfinite(v))
      throw MeasurementError("measure: non-finite criterion for '" + rec.solver_id + "'");
  if (rec.time_s < 0.0)
    throw MeasurementError("measure: negative wall time for '" + rec.solver_id + "'");
  return rec;
}

}  // namespace metasolve
