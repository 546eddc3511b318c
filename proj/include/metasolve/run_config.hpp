#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "enumerate.hpp"
#include "errors.hpp"
#include "presets.hpp"

namespace metasolve {

// Everything a sweep needs: the problem, the family, optional coordinate
// filters, solver tolerances, and the provider table (empty = built-ins).
struct RunConfig {
  int dim = 1;
  std::size_t n_per_axis = 0;  // 0 = default for dim (127 / 63 / 31)
  std::string kappa_id = "const";
  Family family = Family::Relax;
  Filters filters;
  double tol_rel = 1e-12;
  std::size_t max_iters_relax = 200000;
  std::size_t max_iters_krylov = 500;
  double omega = 1.5;
  std::size_t restart = 50;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::vector<ProviderPreset> providers;

  std::size_t resolved_n() const {
    if (n_per_axis != 0) return n_per_axis;
    switch (dim) {
      case 1: return 127;
      case 2: return 63;
      default: return 31;
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["dim"] = dim;
    j["n_per_axis"] = resolved_n();
    j["kappa_id"] = kappa_id;
    j["family"] = std::string(to_string(family));
    auto filt = nlohmann::json::object();
    if (!filters.x1.empty()) filt["x1"] = filters.x1;
    if (!filters.x2.empty()) filt["x2"] = filters.x2;
    if (!filters.x3.empty()) filt["x3"] = filters.x3;
    if (!filters.x4.empty()) filt["x4"] = filters.x4;
    if (!filters.x5.empty()) filt["x5"] = filters.x5;
    j["filters"] = filt;
    j["tol_rel"] = tol_rel;
    j["max_iters_relax"] = max_iters_relax;
    j["max_iters_krylov"] = max_iters_krylov;
    j["omega"] = omega;
    j["restart"] = restart;
    j["seed"] = seed;
    auto provs = nlohmann::json::array();
    for (const auto& p : providers) {
      nlohmann::json pj;
      pj["label"] = p.label;
      pj["basis"] = std::string(to_string(p.basis_kind));
      pj["m_scale"] = p.m_scale;
      pj["training_time_s"] = p.training_time_s;
      pj["inference_mac_surcharge"] = p.inference_mac_surcharge;
      if (p.basis_kind == BasisKind::File) pj["file_path"] = p.file_path;
      if (p.m_override) pj["m"] = *p.m_override;
      provs.push_back(std::move(pj));
    }
    j["providers"] = provs;
    return j;
  }

  static RunConfig from_json(const nlohmann::json& j) {
    RunConfig c;
    c.dim = j.value("dim", 1);
    if (c.dim < 1 || c.dim > 3) throw ConfigError("config: dim must be 1, 2, or 3");
    c.n_per_axis = j.value("n_per_axis", std::size_t{0});
    c.kappa_id = j.value("kappa_id", std::string("const"));
    if (j.contains("family")) c.family = family_from_string(j.at("family").get<std::string>());
    if (j.contains("filters")) {
      const auto& f = j.at("filters");
      const auto get = [&](const char* key) {
        std::vector<std::string> v;
        if (f.contains(key)) {
          if (f.at(key).is_string())
            v.push_back(f.at(key).get<std::string>());
          else
            v = f.at(key).get<std::vector<std::string>>();
        }
        return v;
      };
      c.filters.x1 = get("x1");
      c.filters.x2 = get("x2");
      c.filters.x3 = get("x3");
      c.filters.x4 = get("x4");
      c.filters.x5 = get("x5");
    }
    c.tol_rel = j.value("tol_rel", 1e-12);
    if (!(c.tol_rel > 0.0 && c.tol_rel < 1.0))
      throw ConfigError("config: tol_rel must lie in (0, 1)");
    c.max_iters_relax = j.value("max_iters_relax", std::size_t{200000});
    c.max_iters_krylov = j.value("max_iters_krylov", std::size_t{500});
    c.omega = j.value("omega", 1.5);
    c.restart = j.value("restart", std::size_t{50});
    c.seed = j.value("seed", std::uint64_t{0});
    c.jobs = j.value("jobs", 1);
    if (c.jobs < 1) throw ConfigError("config: jobs must be >= 1");
    if (j.contains("providers")) {
      for (const auto& pj : j.at("providers")) {
        ProviderPreset p;
        p.label = pj.at("label").get<std::string>();
        p.basis_kind = basis_from_string(pj.value("basis", std::string("spectral")));
        p.m_scale = pj.value("m_scale", 1.0);
        p.training_time_s = pj.value("training_time_s", 0.0);
        p.inference_mac_surcharge = pj.value("inference_mac_surcharge", std::uint64_t{0});
        if (p.basis_kind == BasisKind::File) {
          if (!pj.contains("file_path"))
            throw ConfigError("config: file provider '" + p.label + "' needs file_path");
          p.file_path = pj.at("file_path").get<std::string>();
        }
        if (pj.contains("m")) p.m_override = pj.at("m").get<std::size_t>();
        c.providers.push_back(std::move(p));
      }
    }
    return c;
  }

  static RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config: '" + path + "': " + e.what());
    }
    try {
      return from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config: '" + path + "': " + e.what());
    }
  }
};

}  // namespace metasolve
