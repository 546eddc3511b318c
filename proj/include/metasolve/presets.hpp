#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coarse_space.hpp"
#include "errors.hpp"
#include "poisson.hpp"

namespace metasolve {

// Attribute preset for a basis-provider label. The label names the operator
// family the basis stands in for; the attributes (coarse dimension scale,
// training cost, per-application inference surcharge) are what make the
// trade-off structure between providers nondegenerate. Presets are plain
// data: they ship with defaults below but are meant to be declared or
// overridden in run configuration files, never treated as ground truth.
struct ProviderPreset {
  std::string label;
  BasisKind basis_kind = BasisKind::Spectral;
  double m_scale = 1.0;  // multiplies the dimension-default coarse size
  double training_time_s = 0.0;
  std::uint64_t inference_mac_surcharge = 0;
  std::string file_path;                  // basis_kind == File only
  std::optional<std::size_t> m_override;  // fixed m, e.g. for file bases

  BasisProvider provider() const {
    return BasisProvider{basis_kind, label, training_time_s, inference_mac_surcharge,
                         file_path};
  }
};

// Default coarse-space dimension per problem dimensionality.
inline std::size_t default_coarse_m(int dim) {
  switch (dim) {
    case 1: return 16;
    case 2: return 64;
    case 3: return 125;
  }
  throw GridSizeError("default_coarse_m: dim must be 1, 2, or 3");
}

// Coarse dimension a preset resolves to on a given problem, clamped to the
// valid range [1, n_unknowns].
inline std::size_t preset_m(const ProviderPreset& preset, const ProblemInstance& p) {
  std::size_t m;
  if (preset.m_override) {
    m = *preset.m_override;
  } else {
    const double base = static_cast<double>(default_coarse_m(p.dim));
    m = static_cast<std::size_t>(std::llround(preset.m_scale * base));
  }
  if (m < 1) m = 1;
  if (m > p.n_unknowns()) m = p.n_unknowns();
  return m;
}

// Built-in presets for the relaxation family's seven operator labels.
// Values are synthetic but deliberately diverse: spectral-backed providers
// trade training time against coarse-space size, polynomial-backed ones are
// cheaper to train with lighter inference surcharges.
inline std::vector<ProviderPreset> default_relax_presets() {
  return {
      {"DeepONet", BasisKind::Spectral, 1.0, 8600.0, 520000, "", {}},
      {"U-Net", BasisKind::Spectral, 0.75, 2300.0, 1350000, "", {}},
      {"FNO", BasisKind::Spectral, 1.25, 46000.0, 2400000, "", {}},
      {"Transformer", BasisKind::Spectral, 1.5, 52000.0, 3900000, "", {}},
      {"KAN", BasisKind::Polynomial, 1.0, 14800.0, 880000, "", {}},
      {"JacobiKAN", BasisKind::Polynomial, 0.625, 3100.0, 640000, "", {}},
      {"ChebyKAN", BasisKind::Polynomial, 1.125, 17500.0, 760000, "", {}},
  };
}

// Built-in presets for the Krylov family's five operator labels.
inline std::vector<ProviderPreset> default_krylov_presets() {
  return {
      {"DeepONet", BasisKind::Spectral, 1.0, 8600.0, 520000, "", {}},
      {"U-Net", BasisKind::Spectral, 0.75, 2300.0, 1350000, "", {}},
      {"KAN", BasisKind::Polynomial, 1.0, 14800.0, 880000, "", {}},
      {"JacobiKAN", BasisKind::Polynomial, 0.625, 3100.0, 640000, "", {}},
      {"ChebyKAN", BasisKind::Polynomial, 1.125, 17500.0, 760000, "", {}},
  };
}

inline const ProviderPreset& find_preset(const std::vector<ProviderPreset>& presets,
                                         const std::string& label) {
  for (const ProviderPreset& p : presets)
    if (p.label == label) return p;
  throw ConfigError("preset: unknown provider label '" + label + "'");
}

}  // namespace metasolve
