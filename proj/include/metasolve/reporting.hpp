#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "metrics.hpp"
#include "pareto.hpp"
#include "rediscovery.hpp"

namespace metasolve {

// Records to minimization table (conv_rate negated). Nonconverged runs are
// excluded by default: their criteria describe a failed run, not a solver.
inline ObjectiveTable build_objective_table(const std::vector<PerformanceRecord>& records,
                                            bool include_nonconverged = false) {
  ObjectiveTable t;
  t.n_criteria = kNumCriteria;
  for (const auto& r : records) {
    if (!r.converged && !include_nonconverged) continue;
    t.points.push_back({r.solver_id, objective_vector(r)});
  }
  if (t.points.empty())
    throw Error("objective table: no converged records (pass include_nonconverged?)");
  return t;
}

struct FrontReport {
  ParetoResult pareto;
  // coordinate key (e.g. "x2_smoother") -> value -> count over the strong set
  std::map<std::string, std::map<std::string, int>> composition;
  std::size_t n_records = 0;
  std::size_t n_converged = 0;
};

namespace detail {

inline std::string config_value_string(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace detail

// Strong/weak sets of the file's records plus, for every enumeration
// coordinate present in the configs (keys beginning with "x"), the count of
// strong-front members per coordinate value.
inline FrontReport front_report(const std::vector<PerformanceRecord>& records,
                                bool include_nonconverged = false) {
  FrontReport rep;
  rep.n_records = records.size();
  for (const auto& r : records)
    if (r.converged) ++rep.n_converged;

  const ObjectiveTable table = build_objective_table(records, include_nonconverged);
  rep.pareto = pareto_set(table);

  std::map<std::string, const PerformanceRecord*> by_id;
  for (const auto& r : records) by_id[r.solver_id] = &r;
  for (const auto& id : rep.pareto.strong_ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) continue;
    for (const auto& [key, val] : it->second->config.items())
      if (!key.empty() && key.front() == 'x')
        ++rep.composition[key][detail::config_value_string(val)];
  }
  return rep;
}

inline void write_front_csv(const std::string& path,
                            const std::vector<PerformanceRecord>& records,
                            const std::vector<std::string>& front_ids,
                            const std::vector<std::size_t>& criteria_subset = {}) {
  std::map<std::string, const PerformanceRecord*> by_id;
  for (const auto& r : records) by_id[r.solver_id] = &r;

  std::vector<std::size_t> cols = criteria_subset;
  if (cols.empty()) {
    cols.resize(kNumCriteria);
    for (std::size_t k = 0; k < kNumCriteria; ++k) cols[k] = k;
  }

  std::ofstream out(path);
  if (!out) throw ConfigError("csv: cannot open '" + path + "' for writing");
  out << "solver_id";
  for (std::size_t k : cols) out << ',' << kCriterionNames[k];
  out << '\n';
  out << std::setprecision(17);
  for (const auto& id : front_ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw Error("csv: front id '" + id + "' missing from records");
    const std::vector<double> f = it->second->criteria();
    out << id;
    for (std::size_t k : cols) out << ',' << f[k];
    out << '\n';
  }
}

struct RankedRecord {
  std::string solver_id;
  double score = 0.0;
  std::vector<double> criteria;  // raw record values, canonical order
};

// Rescales the strong front and ranks it by the weighted sum; returns the
// top k with their raw criterion values for printing.
inline std::vector<RankedRecord> discover_top_k(const std::vector<PerformanceRecord>& records,
                                                const PreferenceWeights& weights,
                                                std::size_t k,
                                                bool include_nonconverged = false) {
  const ObjectiveTable table = build_objective_table(records, include_nonconverged);
  const ParetoResult front = pareto_set(table);

  ObjectiveTable front_table;
  front_table.n_criteria = table.n_criteria;
  for (std::size_t i = 0; i < front.strong_ids.size(); ++i)
    front_table.points.push_back({front.strong_ids[i], front.front[i]});
  const RescaleResult rs = rescale(front_table);

  const PreferenceFn p = weighted_sum(weights);
  const std::vector<std::string> ranked = discover(rs.table, p);

  std::map<std::string, const PerformanceRecord*> by_id;
  for (const auto& r : records) by_id[r.solver_id] = &r;
  std::map<std::string, const ObjectivePoint*> rescaled_by_id;
  for (const auto& pt : rs.table.points) rescaled_by_id[pt.id] = &pt;

  std::vector<RankedRecord> out;
  for (const auto& id : ranked) {
    if (out.size() >= k) break;
    RankedRecord rr;
    rr.solver_id = id;
    rr.score = p(rescaled_by_id.at(id)->f);
    rr.criteria = by_id.at(id)->criteria();
    out.push_back(std::move(rr));
  }
  return out;
}

// Display permutation for weights reports: error, time, iterations, rate,
// memory, MACs, training time.
inline constexpr std::array<std::size_t, 7> kWeightsDisplayOrder = {1, 0, 2, 3, 4, 5, 6};

struct RediscoverReport {
  RediscoveryResult result;
  std::vector<std::pair<std::string, double>> labeled;  // display order
};

// Rediscovers a strong-front member from raw records: builds the table,
// verifies front membership, rescales the front, and solves the weights LP.
inline RediscoverReport rediscover_solver(const std::vector<PerformanceRecord>& records,
                                          const std::string& solver_id,
                                          bool include_nonconverged = false) {
  const ObjectiveTable table = build_objective_table(records, include_nonconverged);
  bool known = false;
  for (const auto& pt : table.points)
    if (pt.id == solver_id) known = true;
  if (!known) throw NotOnFrontError("rediscover: unknown solver id '" + solver_id + "'");

  const ParetoResult front = pareto_set(table);
  if (std::find(front.strong_ids.begin(), front.strong_ids.end(), solver_id) ==
      front.strong_ids.end())
    throw NotOnFrontError("rediscover: '" + solver_id + "' is dominated (not on the front)");

  ObjectiveTable front_table;
  front_table.n_criteria = table.n_criteria;
  for (std::size_t i = 0; i < front.strong_ids.size(); ++i)
    front_table.points.push_back({front.strong_ids[i], front.front[i]});
  const RescaleResult rs = rescale(front_table);

  RediscoverReport rep;
  rep.result = rediscover(rs.table, solver_id);
  if (rep.result.found)
    for (std::size_t k : kWeightsDisplayOrder)
      rep.labeled.emplace_back(kCriterionNames[k], rep.result.lambda.lambda[k]);
  return rep;
}

}  // namespace metasolve
