#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dense.hpp"
#include "errors.hpp"
#include "ledger.hpp"
#include "poisson.hpp"
#include "sparse.hpp"
#include "vector_ops.hpp"

namespace metasolve {

enum class BasisKind { Spectral, Polynomial, File };

inline const char* to_string(BasisKind k) {
  switch (k) {
    case BasisKind::Spectral: return "spectral";
    case BasisKind::Polynomial: return "polynomial";
    case BasisKind::File: return "file";
  }
  return "?";
}

inline BasisKind basis_from_string(const std::string& s) {
  if (s == "spectral") return BasisKind::Spectral;
  if (s == "polynomial") return BasisKind::Polynomial;
  if (s == "file") return BasisKind::File;
  throw ConfigError("unknown basis kind '" + s + "'");
}

// Where a coarse basis comes from. `label` names the preset the basis
// stands in for; file-backed bases carry their path and read training cost
// and per-application MAC surcharge from the sidecar instead.
struct BasisProvider {
  BasisKind kind = BasisKind::Spectral;
  std::string label = "spectral";
  double training_time_s = 0.0;
  std::uint64_t inference_mac_surcharge = 0;
  std::string file_path;
};

// Column basis of the coarse space. Columns are orthonormal to machine
// precision (every provider is finished with a QR pass).
struct CoarseBasis {
  DenseMatrix P;  // n x m
  BasisKind kind = BasisKind::Spectral;
  std::string label;
  double training_time_s = 0.0;
  std::uint64_t inference_mac_surcharge = 0;

  std::size_t n() const { return P.n_rows; }
  std::size_t m() const { return P.n_cols; }
};

namespace detail {

// Tensor sine modes ordered by the discrete operator eigenvalue
// sum_a (2 - 2 cos(k_a pi h)) / h^2, ties broken lexicographically on the
// wavenumber tuple. These are the exact eigenvectors of the constant-
// coefficient problem, so low modes mean low frequencies.
inline DenseMatrix spectral_columns(const ProblemInstance& p, std::size_t m) {
  const std::size_t n = p.n_per_axis;
  const int dim = p.dim;
  const std::size_t cap = std::min(n, m);
  std::vector<std::pair<double, std::array<std::size_t, 3>>> modes;
  std::array<std::size_t, 3> k{1, 1, 1};
  const auto lambda_1d = [&](std::size_t kk) {
    return (2.0 - 2.0 * std::cos(static_cast<double>(kk) * std::numbers::pi * p.h)) /
           (p.h * p.h);
  };
  std::size_t count = 1;
  for (int a = 0; a < dim; ++a) count *= cap;
  for (std::size_t t = 0; t < count; ++t) {
    double eig = 0.0;
    for (int a = 0; a < dim; ++a) eig += lambda_1d(k[a]);
    modes.emplace_back(eig, k);
    for (int a = 0; a < dim; ++a) {
      if (++k[a] <= cap) break;
      k[a] = 1;
    }
  }
  std::sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });

  const std::size_t total = p.n_unknowns();
  DenseMatrix M(total, m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const std::array<std::size_t, 3>& kj = modes[j].second;
    std::array<std::size_t, 3> idx{0, 0, 0};
    for (std::size_t lin = 0; lin < total; ++lin) {
      double v = 1.0;
      for (int a = 0; a < dim; ++a) {
        const double xa = (static_cast<double>(idx[a]) + 1.0) * p.h;
        v *= std::sin(static_cast<double>(kj[a]) * std::numbers::pi * xa);
      }
      M(lin, j) = v;
      for (int a = 0; a < dim; ++a) {
        if (++idx[a] < n) break;
        idx[a] = 0;
      }
    }
  }
  return M;
}

// Products of shifted Legendre polynomials (mapped to [0,1]) ordered by
// total degree, ties broken lexicographically on the degree tuple.
inline DenseMatrix polynomial_columns(const ProblemInstance& p, std::size_t m) {
  const std::size_t n = p.n_per_axis;
  const int dim = p.dim;

  std::vector<std::array<std::size_t, 3>> degs;
  for (std::size_t total_deg = 0; degs.size() < m; ++total_deg) {
    std::vector<std::array<std::size_t, 3>> batch;
    std::array<std::size_t, 3> d{0, 0, 0};
    const std::size_t cells = [&] {
      std::size_t c = 1;
      for (int a = 0; a < dim; ++a) c *= (total_deg + 1);
      return c;
    }();
    for (std::size_t t = 0; t < cells; ++t) {
      std::size_t s = 0;
      for (int a = 0; a < dim; ++a) s += d[a];
      if (s == total_deg) batch.push_back(d);
      for (int a = 0; a < dim; ++a) {
        if (++d[a] <= total_deg) break;
        d[a] = 0;
      }
    }
    std::sort(batch.begin(), batch.end());
    for (const auto& b : batch) {
      degs.push_back(b);
      if (degs.size() == m) break;
    }
  }
  std::size_t max_deg = 0;
  for (const auto& d : degs)
    for (int a = 0; a < dim; ++a) max_deg = std::max(max_deg, d[a]);

  // leg[k][i] = Legendre_k(2 x_i - 1) on the interior axis points.
  std::vector<std::vector<double>> leg(max_deg + 1, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * (static_cast<double>(i) + 1.0) * p.h - 1.0;
    leg[0][i] = 1.0;
    if (max_deg >= 1) leg[1][i] = t;
    for (std::size_t k = 1; k < max_deg; ++k)
      leg[k + 1][i] = ((2.0 * k + 1.0) * t * leg[k][i] - k * leg[k - 1][i]) / (k + 1.0);
  }

  const std::size_t total = p.n_unknowns();
  DenseMatrix M(total, m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    std::array<std::size_t, 3> idx{0, 0, 0};
    for (std::size_t lin = 0; lin < total; ++lin) {
      double v = 1.0;
      for (int a = 0; a < dim; ++a) v *= leg[degs[j][a]][idx[a]];
      M(lin, j) = v;
      for (int a = 0; a < dim; ++a) {
        if (++idx[a] < n) break;
        idx[a] = 0;
      }
    }
  }
  return M;
}

}  // namespace detail

// Basis file layout: a header line "n m" followed by n rows of m reals in
// grid order (axis 0 fastest). The sidecar at <path>.meta is JSON holding
// training_time_s and inference_mac_surcharge.
inline DenseMatrix read_basis_file(const std::string& path, double& training_time_s,
                                   std::uint64_t& surcharge) {
  std::ifstream in(path);
  if (!in) throw BasisLoadError("basis: cannot open '" + path + "'");
  std::size_t n = 0, m = 0;
  if (!(in >> n >> m) || n == 0 || m == 0)
    throw BasisLoadError("basis: malformed header in '" + path + "'");
  DenseMatrix M(n, m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (!(in >> M(i, j)))
        throw BasisLoadError("basis: truncated data in '" + path + "'");

  std::ifstream meta(path + ".meta");
  if (!meta) throw BasisLoadError("basis: missing sidecar '" + path + ".meta'");
  nlohmann::json j;
  try {
    meta >> j;
    training_time_s = j.at("training_time_s").get<double>();
    surcharge = j.at("inference_mac_surcharge").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw BasisLoadError(std::string("basis: bad sidecar: ") + e.what());
  }
  return M;
}

inline void write_basis_file(const std::string& path, const DenseMatrix& M,
                             double training_time_s, std::uint64_t surcharge) {
  std::ofstream out(path);
  if (!out) throw BasisLoadError("basis: cannot write '" + path + "'");
  out.precision(17);
  out << M.n_rows << " " << M.n_cols << "\n";
  for (std::size_t i = 0; i < M.n_rows; ++i) {
    for (std::size_t j = 0; j < M.n_cols; ++j)
      out << M(i, j) << (j + 1 == M.n_cols ? "" : " ");
    out << "\n";
  }
  nlohmann::json j;
  j["training_time_s"] = training_time_s;
  j["inference_mac_surcharge"] = surcharge;
  std::ofstream meta(path + ".meta");
  meta << j.dump(2) << "\n";
}

// Samples/loads the provider's columns on the problem grid and
// orthonormalizes them. Requires 1 <= m <= n_unknowns (m = n gives a
// full-rank space whose correction is an exact solve); a file-backed basis
// must match the problem size exactly.
inline CoarseBasis build_basis(const BasisProvider& provider, std::size_t m,
                               const ProblemInstance& p) {
  if (m < 1 || m > p.n_unknowns())
    throw DimensionError("build_basis: need 1 <= m <= n_unknowns");
  CoarseBasis basis;
  basis.kind = provider.kind;
  basis.label = provider.label;
  basis.training_time_s = provider.training_time_s;
  basis.inference_mac_surcharge = provider.inference_mac_surcharge;

  DenseMatrix raw;
  switch (provider.kind) {
    case BasisKind::Spectral:
      raw = detail::spectral_columns(p, m);
      break;
    case BasisKind::Polynomial:
      raw = detail::polynomial_columns(p, m);
      break;
    case BasisKind::File: {
      double tt = 0.0;
      std::uint64_t sur = 0;
      raw = read_basis_file(provider.file_path, tt, sur);
      basis.training_time_s = tt;
      basis.inference_mac_surcharge = sur;
      if (raw.n_rows != p.n_unknowns())
        throw BasisLoadError("basis: file is for n = " + std::to_string(raw.n_rows) +
                             ", problem has n = " + std::to_string(p.n_unknowns()));
      if (raw.n_cols != m)
        throw BasisLoadError("basis: file has m = " + std::to_string(raw.n_cols) +
                             ", requested m = " + std::to_string(m));
      break;
    }
  }
  basis.P = dense_qr(raw).Q;
  return basis;
}

// Projected coarse operator A_c = P^T A P with a cached dense factorization.
// Construction charges the triple product and the factorization to the
// ledger; the basis and factor storage count as live reals for the lifetime
// of the object. Move-only.
class CoarseOperator {
 public:
  CoarseOperator(CoarseBasis basis, const SparseMatrix& A, OpLedger& ledger)
      : basis_(std::move(basis)), ledger_(&ledger) {
    const std::size_t n = basis_.n();
    const std::size_t m = basis_.m();
    if (A.n_rows != n || A.n_cols != n)
      throw DimensionError("coarse_operator: basis/matrix size mismatch");

    charged_reals_ = static_cast<std::uint64_t>(n) * m  // P
                     + 2ull * m * m;                    // A_c + LU factor
    ledger_->on_alloc(charged_reals_);

    A_c_ = DenseMatrix(m, m, 0.0);
    std::vector<double> col(n), acol(n);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) col[i] = basis_.P(i, j);
      spmv(A, col, acol, *ledger_);
      for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += basis_.P(r, i) * acol[r];
        A_c_(i, j) = s;
      }
      ledger_->charge_macs(static_cast<std::uint64_t>(m) * n);
    }
    try {
      factor_ = lu_factor(A_c_, ledger_);
    } catch (const SingularMatrixError& e) {
      ledger_->on_free(charged_reals_);
      ledger_ = nullptr;
      throw CoarseSingularError(std::string("coarse_operator: ") + e.what());
    }
  }

  CoarseOperator(const CoarseOperator&) = delete;
  CoarseOperator& operator=(const CoarseOperator&) = delete;

  CoarseOperator(CoarseOperator&& other) noexcept
      : basis_(std::move(other.basis_)),
        A_c_(std::move(other.A_c_)),
        factor_(std::move(other.factor_)),
        ledger_(other.ledger_),
        charged_reals_(other.charged_reals_) {
    other.ledger_ = nullptr;
  }

  ~CoarseOperator() {
    if (ledger_) ledger_->on_free(charged_reals_);
  }

  const CoarseBasis& basis() const { return basis_; }
  const DenseMatrix& coarse_matrix() const { return A_c_; }
  std::size_t n() const { return basis_.n(); }
  std::size_t m() const { return basis_.m(); }

  // MACs charged by one apply_M2 call, available for exact budgeting.
  std::uint64_t apply_macs() const {
    const std::uint64_t n = basis_.n();
    const std::uint64_t m = basis_.m();
    return 2 * n * m + m * m + basis_.inference_mac_surcharge;
  }

 private:
  friend void apply_M2(const CoarseOperator&, std::span<const double>, std::span<double>,
                       OpLedger&);

  CoarseBasis basis_;
  DenseMatrix A_c_;
  LUFactor factor_;
  OpLedger* ledger_;
  std::uint64_t charged_reals_ = 0;
};

inline CoarseOperator build_coarse_operator(CoarseBasis basis, const SparseMatrix& A,
                                            OpLedger& ledger) {
  return CoarseOperator(std::move(basis), A, ledger);
}

// Coarse correction z = P A_c^{-1} P^T r. Charges 2nm + m^2 linear-algebra
// MACs plus the basis' inference surcharge.
inline void apply_M2(const CoarseOperator& op, std::span<const double> r,
                     std::span<double> z, OpLedger& ledger) {
  const std::size_t n = op.n();
  const std::size_t m = op.m();
  if (r.size() != n || z.size() != n) throw DimensionError("apply_M2: shape");
  TrackedVector s(m, ledger);
  gemv(op.basis_.P, r, s.get(), ledger, /*transpose=*/true);
  std::vector<double> y = lu_solve(op.factor_, s.get(), ledger);
  ledger.on_alloc(m);  // y
  gemv(op.basis_.P, y, z, ledger, /*transpose=*/false);
  ledger.on_free(m);
  ledger.charge_macs(op.basis_.inference_mac_surcharge);
}

inline std::vector<double> apply_M2(const CoarseOperator& op, std::span<const double> r,
                                    OpLedger& ledger) {
  std::vector<double> z(op.n());
  apply_M2(op, r, z, ledger);
  return z;
}

}  // namespace metasolve
