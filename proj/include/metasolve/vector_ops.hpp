#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "ledger.hpp"

namespace metasolve {

namespace detail {
inline void require_same_size(std::size_t a, std::size_t b, const char* op) {
  if (a != b) throw DimensionError(std::string(op) + ": size mismatch");
}
}  // namespace detail

// <x, y>. Charges n MACs.
inline double dot(std::span<const double> x, std::span<const double> y, OpLedger& ledger) {
  detail::require_same_size(x.size(), y.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  ledger.charge_macs(x.size());
  return s;
}

// y += alpha * x. Charges n MACs.
inline void axpy(double alpha, std::span<const double> x, std::span<double> y,
                 OpLedger& ledger) {
  detail::require_same_size(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
  ledger.charge_macs(x.size());
}

// Euclidean norm. Charges n MACs.
inline double norm2(std::span<const double> x, OpLedger& ledger) {
  double s = 0.0;
  for (double v : x) s += v * v;
  ledger.charge_macs(x.size());
  return std::sqrt(s);
}

// x *= alpha. Charges n MACs.
inline void scal(double alpha, std::span<double> x, OpLedger& ledger) {
  for (double& v : x) v *= alpha;
  ledger.charge_macs(x.size());
}

}  // namespace metasolve
