#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "krylov.hpp"
#include "presets.hpp"
#include "smoothers.hpp"

namespace metasolve {

enum class Family { Relax, Krylov };

inline const char* to_string(Family f) {
  return f == Family::Relax ? "relax" : "krylov";
}

inline Family family_from_string(const std::string& s) {
  if (s == "relax") return Family::Relax;
  if (s == "krylov") return Family::Krylov;
  throw ConfigError("family must be 'relax' or 'krylov', got '" + s + "'");
}

// One point of the relaxation-family space:
//   x1 provider label, x2 smoother, x3 coarse-correction proportion
//   (one correction per x3_denom fine iterations), x4 multigrid depth
//   (0 = none, 1 = two-level, 2 = three-level).
struct RelaxMetaConfig {
  ProviderPreset provider;
  SmootherKind smoother = SmootherKind::Jacobi;
  std::size_t x3_denom = 2;  // cycle length; proportion = 1 / x3_denom
  int mg_levels = 0;
  double omega = 1.5;  // SOR/SSOR relaxation factor
  std::string id;
};

// One point of the Krylov-family space:
//   x1 provider label, x2 Krylov method, x3 smoother, x4 the N of the
//   N-1-N preconditioner schedule, x5 multigrid depth.
struct KrylovMetaConfig {
  ProviderPreset provider;
  KrylovKind krylov = KrylovKind::FGMRES;
  SmootherKind smoother = SmootherKind::Jacobi;
  std::size_t schedule_n = 1;
  int mg_levels = 0;
  double omega = 1.5;
  std::size_t restart = 50;
  std::string id;
};

// Optional per-coordinate allow-lists (empty = keep all). Values are the
// serialized coordinate strings: x1 label, x2/x3 method names, relax x3
// "1/8", krylov x4 "5-1-5", mg depths "0"/"1"/"2".
struct Filters {
  std::vector<std::string> x1, x2, x3, x4, x5;
};

namespace detail {
inline bool keep(const std::vector<std::string>& allowed, const std::string& v) {
  return allowed.empty() || std::find(allowed.begin(), allowed.end(), v) != allowed.end();
}
}  // namespace detail

inline constexpr std::size_t kRelaxDenoms[] = {2, 4, 8, 16, 32, 64, 128};
inline constexpr std::size_t kScheduleNs[] = {1, 3, 5, 7, 9};
inline constexpr SmootherKind kSmootherOrder[] = {SmootherKind::Jacobi,
                                                  SmootherKind::GaussSeidel,
                                                  SmootherKind::SOR, SmootherKind::SSOR};
inline constexpr KrylovKind kKrylovOrder[] = {KrylovKind::FGMRES, KrylovKind::FCG,
                                              KrylovKind::FBiCGStab};

inline std::string relax_id(const std::string& label, SmootherKind sm, std::size_t denom,
                            int mg) {
  return "relax." + label + "." + to_string(sm) + ".p" + std::to_string(denom) + ".mg" +
         std::to_string(mg);
}

inline std::string krylov_id(const std::string& label, KrylovKind kk, SmootherKind sm,
                             std::size_t n, int mg) {
  return "krylov." + label + "." + to_string(kk) + "." + to_string(sm) + ".s" +
         std::to_string(n) + ".mg" + std::to_string(mg);
}

// Full 7 x 4 x 7 x 3 = 588 space (before filtering), nested with x1
// outermost and x4 innermost, each coordinate in its canonical order.
inline std::vector<RelaxMetaConfig> enumerate_relax(
    const std::vector<ProviderPreset>& providers, const Filters& filters = {},
    double omega = 1.5) {
  std::vector<RelaxMetaConfig> out;
  for (const ProviderPreset& prov : providers) {
    if (!detail::keep(filters.x1, prov.label)) continue;
    for (SmootherKind sm : kSmootherOrder) {
      if (!detail::keep(filters.x2, to_string(sm))) continue;
      for (std::size_t denom : kRelaxDenoms) {
        if (!detail::keep(filters.x3, "1/" + std::to_string(denom))) continue;
        for (int mg = 0; mg <= 2; ++mg) {
          if (!detail::keep(filters.x4, std::to_string(mg))) continue;
          RelaxMetaConfig cfg;
          cfg.provider = prov;
          cfg.smoother = sm;
          cfg.x3_denom = denom;
          cfg.mg_levels = mg;
          cfg.omega = omega;
          cfg.id = relax_id(prov.label, sm, denom, mg);
          out.push_back(std::move(cfg));
        }
      }
    }
  }
  return out;
}

// Full 5 x 3 x 4 x 5 x 3 = 900 space (before filtering), x1 outermost and
// x5 innermost.
inline std::vector<KrylovMetaConfig> enumerate_krylov(
    const std::vector<ProviderPreset>& providers, const Filters& filters = {},
    double omega = 1.5, std::size_t restart = 50) {
  std::vector<KrylovMetaConfig> out;
  for (const ProviderPreset& prov : providers) {
    if (!detail::keep(filters.x1, prov.label)) continue;
    for (KrylovKind kk : kKrylovOrder) {
      if (!detail::keep(filters.x2, to_string(kk))) continue;
      for (SmootherKind sm : kSmootherOrder) {
        if (!detail::keep(filters.x3, to_string(sm))) continue;
        for (std::size_t n : kScheduleNs) {
          const std::string sched =
              std::to_string(n) + "-1-" + std::to_string(n);
          if (!detail::keep(filters.x4, sched)) continue;
          for (int mg = 0; mg <= 2; ++mg) {
            if (!detail::keep(filters.x5, std::to_string(mg))) continue;
            KrylovMetaConfig cfg;
            cfg.provider = prov;
            cfg.krylov = kk;
            cfg.smoother = sm;
            cfg.schedule_n = n;
            cfg.mg_levels = mg;
            cfg.omega = omega;
            cfg.restart = restart;
            cfg.id = krylov_id(prov.label, kk, sm, n, mg);
            out.push_back(std::move(cfg));
          }
        }
      }
    }
  }
  return out;
}

}  // namespace metasolve
