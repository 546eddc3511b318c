// Command-line workflow around the meta-solver library: generate problems,
// sweep solver spaces, persist records, compute Pareto fronts, and run
// preference discovery / weight rediscovery.

#include <chrono>
#include <ctime>
#include <exception>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <metasolve/metasolve.hpp>

namespace {

using namespace metasolve;

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

PreferenceWeights parse_weights(const std::string& csv) {
  PreferenceWeights w;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      w.lambda.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw InvalidWeightsError("weights: cannot parse '" + tok + "'");
    }
  }
  if (w.lambda.size() != kNumCriteria)
    throw InvalidWeightsError("weights: expected " + std::to_string(kNumCriteria) +
                              " comma-separated values, got " +
                              std::to_string(w.lambda.size()));
  w.validate();
  return w;
}

void print_record_line(const PerformanceRecord& r) {
  std::cout << "  " << r.solver_id << (r.converged ? "" : "  [nonconverged]") << "\n"
            << "    time_s=" << r.time_s << " rel_error=" << r.rel_error
            << " iterations=" << r.iterations << " conv_rate=" << r.conv_rate
            << " memory_bytes=" << r.memory_bytes << " macs=" << r.macs
            << " training_time_s=" << r.training_time_s << "\n";
}

int cmd_problem(int dim, std::size_t n, const std::string& kappa_id) {
  RunConfig cfg;
  cfg.dim = dim;
  cfg.n_per_axis = n;
  cfg.kappa_id = kappa_id;
  const ProblemInstance p = prepare_problem(cfg);
  OpLedger probe;
  std::cout << "problem: " << p.dim << "-d diffusion, n=" << p.n_per_axis
            << " per axis, " << p.n_unknowns() << " unknowns\n"
            << "  h=" << p.h << " kappa=" << p.kappa_id << " nnz=" << p.A.values.size()
            << "\n"
            << "  hierarchy levels: " << p.hierarchy.depth() << "\n"
            << "  |f|_2=" << norm2(p.f, probe) << " |u_ref|_2=" << norm2(p.u_ref, probe)
            << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path,
              const std::string& family_override, int jobs_override) {
  RunConfig cfg = RunConfig::load(config_path);
  if (!family_override.empty()) cfg.family = family_from_string(family_override);
  if (jobs_override > 0) cfg.jobs = jobs_override;

  const ProblemInstance p = prepare_problem(cfg);
  std::cerr << "sweep: " << to_string(cfg.family) << " family on " << cfg.dim
            << "-d n=" << cfg.resolved_n() << " (" << p.n_unknowns()
            << " unknowns), jobs=" << cfg.jobs << "\n";

  const auto records = run_sweep(cfg, p);

  ResultsHeader header;
  header.config_hash = config_hash64(cfg.to_json());
  header.timestamp = utc_timestamp();
  header.family = to_string(cfg.family);
  write_results(out_path, header, records);

  std::size_t converged = 0;
  for (const auto& r : records)
    if (r.converged) ++converged;
  std::cout << "sweep: wrote " << records.size() << " records (" << converged
            << " converged) to " << out_path << "\n";
  return 0;
}

int cmd_pareto(const std::string& results_path, const std::string& out_prefix,
               bool include_nonconverged, const std::string& config_path) {
  const ResultsFile rf = read_results(results_path);
  if (!config_path.empty()) {
    const RunConfig cfg = RunConfig::load(config_path);
    if (config_hash64(cfg.to_json()) != rf.header.config_hash)
      throw ConfigError("pareto: results file was generated by a different config "
                        "(hash mismatch)");
  }
  const FrontReport rep = front_report(rf.records, include_nonconverged);

  std::cout << "records: " << rep.n_records << " (" << rep.n_converged
            << " converged)\n"
            << "strong Pareto set: " << rep.pareto.strong_ids.size() << "\n"
            << "weak Pareto set:   " << rep.pareto.weak_ids.size() << "\n";
  for (const auto& [key, counts] : rep.composition) {
    std::cout << "composition by " << key << ":\n";
    for (const auto& [value, count] : counts)
      std::cout << "  " << std::left << std::setw(16) << value << " " << count << "\n";
  }
  for (const auto& w : rep.pareto.warnings) std::cout << "warning: " << w << "\n";

  if (!out_prefix.empty()) {
    write_front_csv(out_prefix + "_front.csv", rf.records, rep.pareto.strong_ids);
    write_front_csv(out_prefix + "_proj2d.csv", rf.records, rep.pareto.strong_ids,
                    {0, 1});
    write_front_csv(out_prefix + "_proj3d.csv", rf.records, rep.pareto.strong_ids,
                    {0, 1, 5});
    std::cout << "wrote " << out_prefix << "_front.csv, _proj2d.csv, _proj3d.csv\n";
  }
  return 0;
}

int cmd_discover(const std::string& results_path, const std::string& weights_csv,
                 const std::string& preset, std::size_t top, bool include_nonconverged) {
  const ResultsFile rf = read_results(results_path);
  PreferenceWeights w;
  if (!weights_csv.empty()) {
    w = parse_weights(weights_csv);
  } else if (preset == "p1" || preset.empty()) {
    w = PreferenceWeights::uniform(kNumCriteria);
  } else if (preset == "p2") {
    w = PreferenceWeights::emphasize_time_error(kNumCriteria);
  } else {
    throw InvalidWeightsError("discover: unknown preset '" + preset + "'");
  }

  std::cout << "weights:";
  for (std::size_t k = 0; k < kNumCriteria; ++k)
    std::cout << " " << kCriterionNames[k] << "=" << w.lambda[k];
  std::cout << "\ntop " << top << " of the strong front:\n";
  const auto ranked = discover_top_k(rf.records, w, top, include_nonconverged);
  std::map<std::string, const PerformanceRecord*> by_id;
  for (const auto& r : rf.records) by_id[r.solver_id] = &r;
  for (const auto& rr : ranked) {
    std::cout << std::setprecision(6) << "score " << rr.score << ":\n";
    print_record_line(*by_id.at(rr.solver_id));
  }
  return 0;
}

int cmd_rediscover(const std::string& results_path, const std::string& solver_id,
                   bool include_nonconverged) {
  const ResultsFile rf = read_results(results_path);
  const RediscoverReport rep = rediscover_solver(rf.records, solver_id,
                                                 include_nonconverged);
  if (!rep.result.found) {
    std::cout << "not rediscoverable: " << rep.result.explanation << "\n";
    return 0;
  }
  std::cout << "weights making '" << solver_id << "' the weighted-sum optimum:\n";
  std::cout << std::setprecision(6);
  for (const auto& [name, value] : rep.labeled)
    std::cout << "  " << std::left << std::setw(16) << name << " " << value << "\n";
  std::cout << "certificate (max violation): " << rep.result.certificate
            << " (tolerance 1e-9)\n";
  return 0;
}

int cmd_solve(const std::string& solver_id, int dim, std::size_t n,
              const std::string& kappa_id, double tol, std::size_t max_iters) {
  RunConfig cfg;
  cfg.dim = dim;
  cfg.n_per_axis = n;
  cfg.kappa_id = kappa_id;
  cfg.family = solver_id.rfind("krylov.", 0) == 0 ? Family::Krylov : Family::Relax;
  const ProblemInstance p = prepare_problem(cfg);

  OpLedger ledger;
  const auto t0 = std::chrono::steady_clock::now();
  MetaRunResult res;
  nlohmann::json cj;
  double training = 0.0;
  bool matched = false;
  if (cfg.family == Family::Relax) {
    for (const auto& c : enumerate_relax(default_relax_presets(), Filters{}, cfg.omega))
      if (c.id == solver_id) {
        res = run_relax_meta(c, p, tol, max_iters ? max_iters : 200000, ledger);
        cj = metasolve::detail::relax_config_json(c, preset_m(c.provider, p));
        training = c.provider.training_time_s;
        matched = true;
        break;
      }
  } else {
    for (const auto& c :
         enumerate_krylov(default_krylov_presets(), Filters{}, cfg.omega, cfg.restart))
      if (c.id == solver_id) {
        res = run_krylov_meta(c, p, tol, max_iters ? max_iters : 500, ledger);
        cj = metasolve::detail::krylov_config_json(c, preset_m(c.provider, p));
        training = c.provider.training_time_s;
        matched = true;
        break;
      }
  }
  if (!matched) throw ConfigError("solve: unknown solver id '" + solver_id + "'");
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const PerformanceRecord rec = measure(res.u, res.trace, ledger, training, p.u_ref,
                                        wall, solver_id, cfg.family, cj,
                                        /*allow_nonconverged=*/true);
  std::cout << record_to_json(rec).dump(2) << "\n";
  return rec.converged ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid meta-solver sweeps, Pareto fronts, and preference discovery"};
  app.require_subcommand(1);

  int dim = 1;
  std::size_t n = 0;
  std::string kappa_id = "const";
  std::string config_path, out_path, results_path, family, weights_csv, preset,
      solver_id;
  std::size_t top = 3;
  bool include_nonconverged = false;
  double tol = 1e-12;
  std::size_t max_iters = 0;
  int jobs = 0;

  auto* problem = app.add_subcommand("problem", "assemble a problem and print facts");
  problem->add_option("--dim", dim, "spatial dimension (1-3)");
  problem->add_option("--n", n, "interior points per axis (0 = default for dim)");
  problem->add_option("--kappa", kappa_id, "coefficient preset: const|ramp|bump");

  auto* sweep = app.add_subcommand("sweep", "run every enumerated solver config");
  sweep->add_option("--config", config_path, "RunConfig JSON path")->required();
  sweep->add_option("--out", out_path, "results output path")->required();
  sweep->add_option("--family", family, "override family: relax|krylov");
  sweep->add_option("--jobs", jobs, "override worker count");

  auto* pareto = app.add_subcommand("pareto", "compute the Pareto front of a results file");
  pareto->add_option("--results", results_path, "results file path")->required();
  pareto->add_option("--out", out_path, "CSV output prefix");
  pareto->add_option("--config", config_path, "verify results against this config");
  pareto->add_flag("--include-nonconverged", include_nonconverged,
                   "admit nonconverged records");

  auto* discover = app.add_subcommand("discover", "rank the front by a preference");
  discover->add_option("--results", results_path, "results file path")->required();
  discover->add_option("--weights", weights_csv, "comma-separated weights (7 values)");
  discover->add_option("--preset", preset, "weight preset: p1|p2");
  discover->add_option("--top", top, "how many ranked solvers to print");
  discover->add_flag("--include-nonconverged", include_nonconverged,
                     "admit nonconverged records");

  auto* rediscover = app.add_subcommand("rediscover",
                                        "find weights that select a front member");
  rediscover->add_option("--results", results_path, "results file path")->required();
  rediscover->add_option("--solver-id", solver_id, "target solver id")->required();
  rediscover->add_flag("--include-nonconverged", include_nonconverged,
                       "admit nonconverged records");

  auto* solve = app.add_subcommand("solve", "run one solver id and print its record");
  solve->add_option("--solver-id", solver_id, "solver id to run")->required();
  solve->add_option("--dim", dim, "spatial dimension (1-3)");
  solve->add_option("--n", n, "interior points per axis (0 = default)");
  solve->add_option("--kappa", kappa_id, "coefficient preset");
  solve->add_option("--tol", tol, "relative residual tolerance");
  solve->add_option("--max-iters", max_iters, "iteration cap (0 = family default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (problem->parsed()) return cmd_problem(dim, n, kappa_id);
    if (sweep->parsed()) return cmd_sweep(config_path, out_path, family, jobs);
    if (pareto->parsed())
      return cmd_pareto(results_path, out_path, include_nonconverged, config_path);
    if (discover->parsed())
      return cmd_discover(results_path, weights_csv, preset, top, include_nonconverged);
    if (rediscover->parsed())
      return cmd_rediscover(results_path, solver_id, include_nonconverged);
    if (solve->parsed())
      return cmd_solve(solver_id, dim, n, kappa_id, tol, max_iters);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
