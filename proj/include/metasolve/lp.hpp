#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"

namespace metasolve {

enum class LPRelation { LessEq, Eq };

struct LPConstraint {
  std::vector<double> coeffs;
  LPRelation rel = LPRelation::LessEq;
  double rhs = 0.0;
};

struct LPBounds {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

// Minimize objective . x subject to the constraint rows and per-variable
// bounds. Missing bounds default to x >= 0.
struct LPProblem {
  std::vector<double> objective;
  std::vector<LPConstraint> constraints;
  std::vector<LPBounds> bounds;

  void validate() const {
    const std::size_t n = objective.size();
    if (n == 0) throw Error("lp: no variables");
    for (const auto& c : constraints)
      if (c.coeffs.size() != n) throw DimensionError("lp: constraint width mismatch");
    if (!bounds.empty() && bounds.size() != n)
      throw DimensionError("lp: bounds length mismatch");
    for (const auto& b : bounds)
      if (!(b.lo <= b.hi)) throw Error("lp: empty variable bound interval");
  }
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPSolution {
  LPStatus status = LPStatus::Infeasible;
  std::vector<double> x;
  double value = 0.0;
};

namespace detail {

// Dense simplex tableau over nonnegative variables. Rows keep rhs in the
// last column; basis[i] is the variable owning row i.
struct Tableau {
  std::size_t n_cols = 0;  // structural + slack + artificial columns
  std::vector<std::vector<double>> rows;
  std::vector<double> cost;  // reduced-cost row, last entry = -objective value
  std::vector<std::size_t> basis;

  static constexpr double kPivotTol = 1e-11;
  static constexpr double kOptTol = 1e-9;

  void pivot(std::size_t r, std::size_t c) {
    std::vector<double>& pr = rows[r];
    const double inv = 1.0 / pr[c];
    for (double& v : pr) v *= inv;
    pr[c] = 1.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r) continue;
      const double factor = rows[i][c];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j <= n_cols; ++j) rows[i][j] -= factor * pr[j];
      rows[i][c] = 0.0;
    }
    const double cf = cost[c];
    if (cf != 0.0) {
      for (std::size_t j = 0; j <= n_cols; ++j) cost[j] -= cf * pr[j];
      cost[c] = 0.0;
    }
    basis[r] = c;
  }

  // Bland's rule: entering = lowest-index improving column; leaving = row of
  // the minimum ratio, ties resolved toward the lowest basic variable index.
  // Returns Optimal or Unbounded.
  LPStatus iterate(const std::vector<char>& usable) {
    for (;;) {
      std::size_t enter = n_cols;
      for (std::size_t j = 0; j < n_cols; ++j)
        if (usable[j] && cost[j] < -kOptTol) {
          enter = j;
          break;
        }
      if (enter == n_cols) return LPStatus::Optimal;

      std::size_t leave = rows.size();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const double a = rows[i][enter];
        if (a <= kPivotTol) continue;
        const double ratio = rows[i][n_cols] / a;
        if (ratio < best - 1e-12 ||
            (ratio < best + 1e-12 && (leave == rows.size() || basis[i] < basis[leave]))) {
          best = ratio;
          leave = i;
        }
      }
      if (leave == rows.size()) return LPStatus::Unbounded;
      pivot(leave, enter);
    }
  }
};

}  // namespace detail

// Two-phase primal simplex. General bounds are reduced to the nonnegative
// standard form first: finite lower bounds shift the variable, free variables
// split into a difference of two nonnegative parts, and finite upper bounds
// become extra rows. Determinism comes from Bland's rule throughout.
inline LPSolution solve_lp(const LPProblem& lp) {
  lp.validate();
  const std::size_t n_orig = lp.objective.size();
  std::vector<LPBounds> bounds = lp.bounds;
  if (bounds.empty()) bounds.assign(n_orig, LPBounds{});

  // Map each original variable to nonnegative columns: x = lo + x' when lo is
  // finite, x = x+ - x- when free below.
  struct VarMap {
    std::size_t col_pos;
    std::size_t col_neg = SIZE_MAX;  // only for split variables
    double shift = 0.0;
  };
  std::vector<VarMap> vmap(n_orig);
  std::size_t n_struct = 0;
  for (std::size_t j = 0; j < n_orig; ++j) {
    if (std::isfinite(bounds[j].lo)) {
      vmap[j] = {n_struct++, SIZE_MAX, bounds[j].lo};
    } else {
      vmap[j].col_pos = n_struct++;
      vmap[j].col_neg = n_struct++;
    }
  }

  // Assemble rows over the structural columns; upper bounds become rows.
  struct Row {
    std::vector<double> a;
    LPRelation rel;
    double rhs;
  };
  std::vector<Row> rows;
  const auto expand = [&](const std::vector<double>& coeffs, LPRelation rel, double rhs) {
    Row r;
    r.a.assign(n_struct, 0.0);
    r.rel = rel;
    r.rhs = rhs;
    for (std::size_t j = 0; j < n_orig; ++j) {
      const double c = coeffs[j];
      if (c == 0.0) continue;
      r.a[vmap[j].col_pos] += c;
      if (vmap[j].col_neg != SIZE_MAX) r.a[vmap[j].col_neg] -= c;
      r.rhs -= c * vmap[j].shift;
    }
    rows.push_back(std::move(r));
  };
  for (const auto& c : lp.constraints) expand(c.coeffs, c.rel, c.rhs);
  for (std::size_t j = 0; j < n_orig; ++j) {
    if (!std::isfinite(bounds[j].hi)) continue;
    std::vector<double> unit(n_orig, 0.0);
    unit[j] = 1.0;
    expand(unit, LPRelation::LessEq, bounds[j].hi);
  }

  // Canonical tableau: nonnegative rhs, one slack per inequality, artificials
  // where no natural basic column exists.
  const std::size_t m = rows.size();
  std::size_t n_slack = 0;
  for (const auto& r : rows)
    if (r.rel == LPRelation::LessEq) ++n_slack;

  detail::Tableau T;
  std::vector<std::size_t> artificial_cols;
  T.n_cols = n_struct + n_slack;  // artificials appended below
  T.rows.assign(m, {});
  T.basis.assign(m, 0);

  std::size_t slack_at = n_struct;
  std::vector<double> slack_sign(m, 0.0);
  std::vector<std::size_t> slack_col(m, SIZE_MAX);
  for (std::size_t i = 0; i < m; ++i)
    if (rows[i].rel == LPRelation::LessEq) {
      slack_col[i] = slack_at++;
      slack_sign[i] = 1.0;
    }

  std::size_t n_art = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = rows[i].rhs < 0.0;
    const bool needs_art = rows[i].rel == LPRelation::Eq || flip;
    if (needs_art) ++n_art;
  }
  const std::size_t total_cols = n_struct + n_slack + n_art;
  T.n_cols = total_cols;

  std::size_t art_at = n_struct + n_slack;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> row(total_cols + 1, 0.0);
    const bool flip = rows[i].rhs < 0.0;
    const double s = flip ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n_struct; ++j) row[j] = s * rows[i].a[j];
    row[total_cols] = s * rows[i].rhs;
    if (slack_col[i] != SIZE_MAX) row[slack_col[i]] = s * slack_sign[i];

    const bool slack_is_basic = slack_col[i] != SIZE_MAX && !flip;
    if (slack_is_basic) {
      T.basis[i] = slack_col[i];
    } else {
      const std::size_t ac = art_at++;
      row[ac] = 1.0;
      artificial_cols.push_back(ac);
      T.basis[i] = ac;
    }
    T.rows[i] = std::move(row);
  }

  std::vector<char> is_artificial(total_cols, 0);
  for (std::size_t c : artificial_cols) is_artificial[c] = 1;

  // Phase 1: minimize the artificial sum. Raw cost is 1 on every artificial
  // column; canonicalizing against the artificial-basic rows zeroes those
  // columns and leaves the negated row sum elsewhere.
  LPSolution sol;
  if (!artificial_cols.empty()) {
    T.cost.assign(total_cols + 1, 0.0);
    for (std::size_t c : artificial_cols) T.cost[c] = 1.0;
    for (std::size_t i = 0; i < m; ++i)
      if (is_artificial[T.basis[i]])
        for (std::size_t j = 0; j <= total_cols; ++j) T.cost[j] -= T.rows[i][j];
    std::vector<char> usable(total_cols, 1);
    T.iterate(usable);  // bounded below by 0, cannot report Unbounded
    const double art_value = -T.cost[total_cols];
    if (art_value > detail::Tableau::kOptTol) {
      sol.status = LPStatus::Infeasible;
      return sol;
    }
    // Drive surviving artificials out of the basis; an all-zero row is a
    // redundant constraint and can keep its artificial at value zero.
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_artificial[T.basis[i]]) continue;
      std::size_t c = total_cols;
      for (std::size_t j = 0; j < total_cols; ++j)
        if (!is_artificial[j] && std::abs(T.rows[i][j]) > detail::Tableau::kPivotTol) {
          c = j;
          break;
        }
      if (c != total_cols) T.pivot(i, c);
    }
  }

  // Phase 2 over the original objective (expanded to structural columns).
  std::vector<double> c2(total_cols + 1, 0.0);
  for (std::size_t j = 0; j < n_orig; ++j) {
    const double c = lp.objective[j];
    c2[vmap[j].col_pos] += c;
    if (vmap[j].col_neg != SIZE_MAX) c2[vmap[j].col_neg] -= c;
  }
  T.cost = c2;
  for (std::size_t i = 0; i < m; ++i) {
    const double cb = c2[T.basis[i]];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= total_cols; ++j) T.cost[j] -= cb * T.rows[i][j];
  }
  std::vector<char> usable(total_cols, 1);
  for (std::size_t c : artificial_cols) usable[c] = 0;
  const LPStatus st2 = T.iterate(usable);
  if (st2 == LPStatus::Unbounded) {
    sol.status = LPStatus::Unbounded;
    return sol;
  }

  std::vector<double> xs(total_cols, 0.0);
  for (std::size_t i = 0; i < m; ++i) xs[T.basis[i]] = T.rows[i][total_cols];
  sol.status = LPStatus::Optimal;
  sol.x.assign(n_orig, 0.0);
  for (std::size_t j = 0; j < n_orig; ++j) {
    double v = xs[vmap[j].col_pos] + vmap[j].shift;
    if (vmap[j].col_neg != SIZE_MAX) v -= xs[vmap[j].col_neg];
    sol.x[j] = v;
  }
  sol.value = 0.0;
  for (std::size_t j = 0; j < n_orig; ++j) sol.value += lp.objective[j] * sol.x[j];
  return sol;
}

}  // namespace metasolve
