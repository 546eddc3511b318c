#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "lp.hpp"
#include "pareto.hpp"

namespace metasolve {

struct RediscoveryResult {
  bool found = false;
  PreferenceWeights lambda;
  // max over other front points of lambda . (f'(target) - f'(x));
  // found implies certificate <= 1e-9.
  double certificate = 0.0;
  std::string explanation;
};

namespace detail {

inline std::size_t find_point(const ObjectiveTable& table, const std::string& id) {
  for (std::size_t i = 0; i < table.points.size(); ++i)
    if (table.points[i].id == id) return i;
  throw NotOnFrontError("rediscover: '" + id + "' is not in the supplied Pareto table");
}

}  // namespace detail

// LP whose feasible set is the simplex weights making target the weighted-sum
// minimum over the (rescaled) front: minimize lambda . f'(target) subject to
// lambda . (f'(target) - f'(x)) <= 0 for every other point, sum lambda = 1,
// 0 <= lambda <= 1.
inline LPProblem build_rediscovery_lp(const ObjectiveTable& rescaled_front,
                                      const std::string& target_id) {
  rescaled_front.validate();
  const std::size_t t = detail::find_point(rescaled_front, target_id);
  const std::size_t N = rescaled_front.n_criteria;
  const std::vector<double>& ft = rescaled_front.points[t].f;

  LPProblem lp;
  lp.objective = ft;
  lp.bounds.assign(N, LPBounds{0.0, 1.0});
  for (std::size_t i = 0; i < rescaled_front.points.size(); ++i) {
    if (i == t) continue;
    LPConstraint c;
    c.coeffs.resize(N);
    for (std::size_t k = 0; k < N; ++k)
      c.coeffs[k] = ft[k] - rescaled_front.points[i].f[k];
    c.rel = LPRelation::LessEq;
    c.rhs = 0.0;
    lp.constraints.push_back(std::move(c));
  }
  LPConstraint sum;
  sum.coeffs.assign(N, 1.0);
  sum.rel = LPRelation::Eq;
  sum.rhs = 1.0;
  lp.constraints.push_back(std::move(sum));
  return lp;
}

namespace detail {

// Best-compromise weights when no supporting hyperplane exists: minimize the
// worst constraint violation t over the simplex (always feasible, always
// bounded). Used only to phrase the infeasibility diagnosis.
inline std::vector<double> chebyshev_weights(const ObjectiveTable& front, std::size_t t) {
  const std::size_t N = front.n_criteria;
  LPProblem lp;
  lp.objective.assign(N + 1, 0.0);
  lp.objective[N] = 1.0;  // minimize t
  lp.bounds.assign(N + 1, LPBounds{0.0, 1.0});
  lp.bounds[N] = {-std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < front.points.size(); ++i) {
    if (i == t) continue;
    LPConstraint c;
    c.coeffs.assign(N + 1, 0.0);
    for (std::size_t k = 0; k < N; ++k)
      c.coeffs[k] = front.points[t].f[k] - front.points[i].f[k];
    c.coeffs[N] = -1.0;  // lambda . (ft - fx) - t <= 0
    c.rhs = 0.0;
    lp.constraints.push_back(std::move(c));
  }
  LPConstraint sum;
  sum.coeffs.assign(N + 1, 0.0);
  for (std::size_t k = 0; k < N; ++k) sum.coeffs[k] = 1.0;
  sum.rel = LPRelation::Eq;
  sum.rhs = 1.0;
  lp.constraints.push_back(std::move(sum));
  const LPSolution sol = solve_lp(lp);
  std::vector<double> w(sol.x.begin(), sol.x.begin() + static_cast<long>(N));
  return w;
}

}  // namespace detail

// Finds simplex weights that make target_id the weighted-sum optimum over the
// rescaled front, re-verifying the LP's answer independently. Non-convex
// front regions admit no such weights; the result then names the point whose
// constraint resists the best compromise weights.
inline RediscoveryResult rediscover(const ObjectiveTable& rescaled_front,
                                    const std::string& target_id) {
  const std::size_t t = detail::find_point(rescaled_front, target_id);
  const std::size_t N = rescaled_front.n_criteria;
  const LPProblem lp = build_rediscovery_lp(rescaled_front, target_id);
  const LPSolution sol = solve_lp(lp);

  RediscoveryResult out;
  const auto certificate_for = [&](const std::vector<double>& lam) {
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t worst_i = t;
    for (std::size_t i = 0; i < rescaled_front.points.size(); ++i) {
      if (i == t) continue;
      double gap = 0.0;
      for (std::size_t k = 0; k < N; ++k)
        gap += lam[k] * (rescaled_front.points[t].f[k] - rescaled_front.points[i].f[k]);
      if (gap > worst) {
        worst = gap;
        worst_i = i;
      }
    }
    return std::pair<double, std::size_t>(worst, worst_i);
  };

  if (sol.status == LPStatus::Optimal) {
    // Clean simplex round-off before re-verification: clamp into [0,1] and
    // renormalize so the invariants hold to 1e-12.
    std::vector<double> lam = sol.x;
    double sum = 0.0;
    for (double& v : lam) {
      v = std::clamp(v, 0.0, 1.0);
      sum += v;
    }
    if (sum > 0.0)
      for (double& v : lam) v /= sum;
    out.lambda.lambda = lam;
    out.lambda.validate();

    if (rescaled_front.points.size() == 1) {
      out.found = true;
      out.certificate = 0.0;
      return out;
    }
    const auto [cert, worst_i] = certificate_for(lam);
    out.certificate = cert;
    out.found = cert <= 1e-9;
    if (!out.found)
      out.explanation = "solver weights fail independent re-verification against '" +
                        rescaled_front.points[worst_i].id + "'";
    return out;
  }

  const std::vector<double> w = detail::chebyshev_weights(rescaled_front, t);
  const auto [viol, worst_i] = certificate_for(w);
  out.found = false;
  out.certificate = viol;
  std::ostringstream os;
  os << "no supporting hyperplane: best compromise weights still score '"
     << rescaled_front.points[worst_i].id << "' lower by " << viol
     << " (target lies in a non-convex region of the front)";
  out.explanation = os.str();
  return out;
}

}  // namespace metasolve
