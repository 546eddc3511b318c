#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace metasolve {

struct ObjectivePoint {
  std::string id;
  std::vector<double> f;
};

struct ObjectiveTable {
  std::size_t n_criteria = 0;
  std::vector<ObjectivePoint> points;

  void validate() const {
    for (const auto& pt : points) {
      if (pt.f.size() != n_criteria)
        throw DimensionError("objective table: point '" + pt.id + "' has " +
                             std::to_string(pt.f.size()) + " criteria, expected " +
                             std::to_string(n_criteria));
      for (double v : pt.f)
        if (!std::isfinite(v))
          throw Error("objective table: non-finite entry in point '" + pt.id + "'");
    }
  }
};

enum class Dominance { None, Dominates, StrictlyDominates };

// Minimization order: a dominates b when a <= b everywhere with at least one
// strict inequality; strictly when all are strict. Equal vectors tie.
inline Dominance dominates(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dominates: length mismatch");
  bool any_strict = false;
  bool all_strict = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return Dominance::None;
    if (a[i] < b[i])
      any_strict = true;
    else
      all_strict = false;
  }
  if (!any_strict) return Dominance::None;
  return all_strict ? Dominance::StrictlyDominates : Dominance::Dominates;
}

struct ParetoResult {
  std::vector<std::string> strong_ids;
  std::vector<std::vector<double>> front;  // vectors of strong_ids, same order
  std::vector<std::string> weak_ids;
  std::vector<std::vector<double>> weak_front;
  std::vector<std::string> warnings;
};

// Strong set: points no table point dominates. Weak set: points no table
// point strictly dominates (hence strong is a subset of weak). A dominator
// of x is componentwise <= x and distinct, so it precedes x in lexicographic
// order; sorting once and scanning predecessors finds every dominator.
inline ParetoResult pareto_set(const ObjectiveTable& table) {
  if (table.points.empty()) throw Error("pareto_set: empty table");
  table.validate();
  const std::size_t n = table.points.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(table.points[a].f.begin(), table.points[a].f.end(),
                                        table.points[b].f.begin(), table.points[b].f.end());
  });

  std::vector<char> in_strong(n, 1), in_weak(n, 1);
  for (std::size_t pi = 0; pi < n; ++pi) {
    const std::size_t i = order[pi];
    for (std::size_t pj = 0; pj < pi; ++pj) {
      const std::size_t j = order[pj];
      const Dominance d = dominates(table.points[j].f, table.points[i].f);
      if (d == Dominance::None) continue;
      in_strong[i] = 0;
      if (d == Dominance::StrictlyDominates) {
        in_weak[i] = 0;
        break;
      }
    }
  }

  ParetoResult out;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_strong[i]) {
      out.strong_ids.push_back(table.points[i].id);
      out.front.push_back(table.points[i].f);
    }
    if (in_weak[i]) {
      out.weak_ids.push_back(table.points[i].id);
      out.weak_front.push_back(table.points[i].f);
    }
  }
  return out;
}

struct RescaleResult {
  ObjectiveTable table;
  std::vector<bool> degenerate;  // criteria where max == min, mapped to 0
};

// Affine per-criterion map onto [0,1] (min to 0, max to 1). A criterion that
// is constant over the table carries no ranking information; it is set to 0
// and flagged instead of raising, so tables with constant columns stay usable.
inline RescaleResult rescale(const ObjectiveTable& table) {
  if (table.points.empty()) throw Error("rescale: empty table");
  table.validate();
  const std::size_t N = table.n_criteria;
  std::vector<double> lo(N, std::numeric_limits<double>::infinity());
  std::vector<double> hi(N, -std::numeric_limits<double>::infinity());
  for (const auto& pt : table.points)
    for (std::size_t k = 0; k < N; ++k) {
      lo[k] = std::min(lo[k], pt.f[k]);
      hi[k] = std::max(hi[k], pt.f[k]);
    }

  RescaleResult out;
  out.table.n_criteria = N;
  out.degenerate.assign(N, false);
  for (std::size_t k = 0; k < N; ++k)
    if (hi[k] == lo[k]) out.degenerate[k] = true;

  out.table.points.reserve(table.points.size());
  for (const auto& pt : table.points) {
    ObjectivePoint q;
    q.id = pt.id;
    q.f.resize(N);
    for (std::size_t k = 0; k < N; ++k)
      q.f[k] = out.degenerate[k] ? 0.0 : (pt.f[k] - lo[k]) / (hi[k] - lo[k]);
    out.table.points.push_back(std::move(q));
  }
  return out;
}

struct PreferenceWeights {
  std::vector<double> lambda;

  void validate() const {
    double sum = 0.0;
    for (double w : lambda) {
      if (!(w >= 0.0 && w <= 1.0))
        throw InvalidWeightsError("weights: entry " + std::to_string(w) +
                                  " outside [0, 1]");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw InvalidWeightsError("weights: sum " + std::to_string(sum) + " != 1");
  }

  static PreferenceWeights uniform(std::size_t n) {
    PreferenceWeights w;
    w.lambda.assign(n, 1.0 / static_cast<double>(n));
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) sum += w.lambda[i];
    if (n > 0) w.lambda.back() = 1.0 - sum;
    return w;
  }

  // 0.4 on the first two criteria (time and error in the canonical order),
  // the rest shared equally; for seven criteria that is 0.04 each.
  static PreferenceWeights emphasize_time_error(std::size_t n) {
    if (n < 3) throw InvalidWeightsError("emphasize_time_error: needs >= 3 criteria");
    PreferenceWeights w;
    const double rest = 0.2 / static_cast<double>(n - 2);
    w.lambda.assign(n, rest);
    w.lambda[0] = 0.4;
    w.lambda[1] = 0.4;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) sum += w.lambda[i];
    w.lambda.back() = 1.0 - sum;
    return w;
  }
};

using PreferenceFn = std::function<double(std::span<const double>)>;

inline PreferenceFn weighted_sum(PreferenceWeights w) {
  w.validate();
  return [w = std::move(w)](std::span<const double> f) {
    if (f.size() != w.lambda.size())
      throw DimensionError("weighted_sum: vector/weights length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += w.lambda[i] * f[i];
    return s;
  };
}

// Ranks ids ascending by p(f). Score ties break lexicographically on the
// vectors, then on id, so rankings are deterministic even under weights with
// zero entries (where the preference is not strictly increasing).
inline std::vector<std::string> discover(const ObjectiveTable& table,
                                         const PreferenceFn& p) {
  table.validate();
  struct Row {
    double score;
    const ObjectivePoint* pt;
  };
  std::vector<Row> rows;
  rows.reserve(table.points.size());
  for (const auto& pt : table.points) rows.push_back({p(pt.f), &pt});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.pt->f != b.pt->f)
      return std::lexicographical_compare(a.pt->f.begin(), a.pt->f.end(),
                                          b.pt->f.begin(), b.pt->f.end());
    return a.pt->id < b.pt->id;
  });
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (const auto& r : rows) ids.push_back(r.pt->id);
  return ids;
}

// Incremental Pareto update: the strong/weak sets of the union equal those of
// (existing weak set) union (new points), because any dominator outside the
// weak set is itself strictly dominated by a weak-set member whose dominance
// then transfers. Duplicate performance vectors in the union break the
// distinctness assumption the monotonicity results rely on; they are
// reported as warnings, not errors.
inline ParetoResult merge_monotone(const ParetoResult& existing,
                                   const std::vector<ObjectivePoint>& new_points,
                                   std::size_t n_criteria) {
  ObjectiveTable u;
  u.n_criteria = n_criteria;
  for (std::size_t i = 0; i < existing.weak_ids.size(); ++i)
    u.points.push_back({existing.weak_ids[i], existing.weak_front[i]});
  for (const auto& pt : new_points) u.points.push_back(pt);

  ParetoResult out = pareto_set(u);

  std::vector<std::size_t> order(u.points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return u.points[a].f < u.points[b].f;
  });
  for (std::size_t k = 0; k + 1 < order.size(); ++k)
    if (u.points[order[k]].f == u.points[order[k + 1]].f)
      out.warnings.push_back("duplicate performance vectors: '" +
                             u.points[order[k]].id + "' and '" +
                             u.points[order[k + 1]].id + "'");
  return out;
}

}  // namespace metasolve
