#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dense.hpp"
#include "errors.hpp"
#include "sparse.hpp"

namespace metasolve {

// Scalar diffusion coefficient sampled at face midpoints. Coordinates are
// padded with zeros beyond the problem dimension.
using KappaFn = std::function<double(const std::array<double, 3>&)>;

// Named coefficient presets. "const" is homogeneous, the other two vary
// along the first axis only.
inline KappaFn kappa_preset(const std::string& id) {
  if (id == "const") return [](const std::array<double, 3>&) { return 1.0; };
  if (id == "ramp") return [](const std::array<double, 3>& x) { return 1.0 + x[0]; };
  if (id == "bump")
    return [](const std::array<double, 3>& x) {
      return 1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * x[0]);
    };
  throw InvalidCoefficientError("kappa: unknown preset '" + id + "'");
}

// One level of the geometric hierarchy. Level 0 is the assembled fine
// problem; level l+1 is the Galerkin coarsening of level l. P maps level
// l+1 vectors up to level l, R maps level l down to level l+1; both are
// tensor products of the 1-d linear-interpolation / full-weighting pair, so
// R = (1/2)^dim * P^T and every coarse operator stays symmetric.
struct GridLevel {
  SparseMatrix A;
  std::size_t n_per_axis = 0;
  SparseMatrix P;  // present on every level except the last
  SparseMatrix R;
  std::optional<LUFactor> direct;  // dense factor, levels >= 1 only
};

struct GridHierarchy {
  std::vector<GridLevel> levels;
  std::size_t depth() const { return levels.size(); }
};

// A discretized diffusion problem -div(kappa grad u) = f on the unit cube
// with homogeneous Dirichlet boundary, plus its manufactured reference
// solution. Immutable after assembly + coarsening; safe to share across
// concurrent solver runs.
struct ProblemInstance {
  int dim = 1;
  std::size_t n_per_axis = 0;  // interior points per axis
  double h = 0.0;              // 1 / (n_per_axis + 1)
  std::string kappa_id;
  SparseMatrix A;
  std::vector<double> f;
  std::vector<double> u_ref;
  GridHierarchy hierarchy;  // level 0 always present after assembly

  std::size_t n_unknowns() const { return f.size(); }
};

namespace detail {

// Grid indexing: axis 0 varies fastest. Interior point i along an axis sits
// at (i + 1) * h; the face between interior points i and i+1 sits at
// (i + 1.5) * h, computed from the smaller index on both sides so the two
// incident rows sample kappa at bit-identical coordinates.
inline std::size_t linear_index(const std::array<std::size_t, 3>& idx, std::size_t n,
                                int dim) {
  std::size_t lin = 0;
  for (int a = dim; a-- > 0;) lin = lin * n + idx[a];
  return lin;
}

inline std::array<double, 3> point_coords(const std::array<std::size_t, 3>& idx, double h,
                                          int dim) {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) x[a] = (static_cast<double>(idx[a]) + 1.0) * h;
  return x;
}

}  // namespace detail

// Assembles the finite-difference operator with kappa evaluated at face
// midpoints: along each axis the row picks up
//   (kappa_west + kappa_east) / h^2 on the diagonal and
//   -kappa_face / h^2 for each interior neighbor.
// Shared faces are evaluated once per coordinate formula, so the matrix is
// exactly symmetric. The manufactured solution u_ref = prod_a sin(pi x_a)
// defines f = A u_ref at the discrete level, making u_ref the exact
// solution of the linear system.
inline ProblemInstance assemble_poisson(int dim, std::size_t n_per_axis,
                                        const std::string& kappa_id,
                                        const KappaFn* kappa_override = nullptr) {
  if (dim < 1 || dim > 3) throw GridSizeError("assemble: dim must be 1, 2, or 3");
  if (n_per_axis < 3) throw GridSizeError("assemble: need at least 3 points per axis");
  KappaFn kappa = kappa_override ? *kappa_override : kappa_preset(kappa_id);

  ProblemInstance p;
  p.dim = dim;
  p.n_per_axis = n_per_axis;
  p.h = 1.0 / (static_cast<double>(n_per_axis) + 1.0);
  p.kappa_id = kappa_id;

  const std::size_t n = n_per_axis;
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= n;
  const double inv_h2 = 1.0 / (p.h * p.h);

  std::vector<std::tuple<std::size_t, std::size_t, double>> trip;
  trip.reserve(total * (2 * dim + 1));

  std::array<std::size_t, 3> idx{0, 0, 0};
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::array<double, 3> x = detail::point_coords(idx, p.h, dim);
    double diag = 0.0;
    for (int a = 0; a < dim; ++a) {
      // West face between idx[a]-1 and idx[a]; east face between idx[a] and
      // idx[a]+1. Both positions derive from the lower interior index.
      std::array<double, 3> xf = x;
      xf[a] = (static_cast<double>(idx[a]) + 0.5) * p.h;
      const double k_west = kappa(xf);
      xf[a] = (static_cast<double>(idx[a]) + 1.5) * p.h;
      const double k_east = kappa(xf);
      if (!(k_west > 0.0) || !(k_east > 0.0))
        throw InvalidCoefficientError("assemble: kappa not positive at a face");
      diag += (k_west + k_east) * inv_h2;
      if (idx[a] > 0) {
        std::array<std::size_t, 3> nb = idx;
        nb[a] -= 1;
        trip.emplace_back(lin, detail::linear_index(nb, n, dim), -k_west * inv_h2);
      }
      if (idx[a] + 1 < n) {
        std::array<std::size_t, 3> nb = idx;
        nb[a] += 1;
        trip.emplace_back(lin, detail::linear_index(nb, n, dim), -k_east * inv_h2);
      }
    }
    trip.emplace_back(lin, lin, diag);

    for (int a = 0; a < dim; ++a) {
      if (++idx[a] < n) break;
      idx[a] = 0;
    }
  }

  p.A = SparseMatrix::from_triplets(total, total, std::move(trip));

  p.u_ref.resize(total);
  std::array<std::size_t, 3> id2{0, 0, 0};
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::array<double, 3> x = detail::point_coords(id2, p.h, dim);
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= std::sin(std::numbers::pi * x[a]);
    p.u_ref[lin] = v;
    for (int a = 0; a < dim; ++a) {
      if (++id2[a] < n) break;
      id2[a] = 0;
    }
  }

  OpLedger scratch;
  p.f = spmv(p.A, p.u_ref, scratch);

  p.hierarchy.levels.push_back(GridLevel{p.A, n, {}, {}, std::nullopt});
  return p;
}

// 1-d linear interpolation from a coarse axis (n_c interior points) to the
// fine axis n_f = 2 n_c + 1: coarse point j lands on fine point 2j+1 with
// weight 1 and spreads 1/2 to its fine neighbors.
inline SparseMatrix interpolation_1d(std::size_t n_coarse) {
  const std::size_t n_fine = 2 * n_coarse + 1;
  std::vector<std::tuple<std::size_t, std::size_t, double>> trip;
  trip.reserve(3 * n_coarse);
  for (std::size_t j = 0; j < n_coarse; ++j) {
    trip.emplace_back(2 * j, j, 0.5);
    trip.emplace_back(2 * j + 1, j, 1.0);
    trip.emplace_back(2 * j + 2, j, 0.5);
  }
  return SparseMatrix::from_triplets(n_fine, n_coarse, std::move(trip));
}

// Builds `levels` successive Galerkin coarsenings (full weighting paired
// with linear interpolation, A_coarse = R A P) and attaches the result to
// the instance. Requires (n+1) divisible by 2^levels with at least one
// interior point at the coarsest level. Every level below the finest gets
// an eager dense factorization so V-cycles can stop at any depth with a
// direct solve; this is setup work and is not charged to solver ledgers.
inline const GridHierarchy& coarsen(ProblemInstance& p, std::size_t levels) {
  const std::size_t mask = (std::size_t{1} << levels) - 1;
  if (((p.n_per_axis + 1) & mask) != 0)
    throw GridSizeError("coarsen: n+1 must be divisible by 2^levels");
  if (((p.n_per_axis + 1) >> levels) < 2)
    throw GridSizeError("coarsen: coarsest grid would be empty");

  p.hierarchy.levels.clear();
  p.hierarchy.levels.push_back(GridLevel{p.A, p.n_per_axis, {}, {}, std::nullopt});
  for (std::size_t l = 0; l < levels; ++l) {
    GridLevel& fine = p.hierarchy.levels.back();
    const std::size_t n_c = (fine.n_per_axis + 1) / 2 - 1;
    SparseMatrix P = interpolation_1d(n_c);
    for (int a = 1; a < p.dim; ++a) P = kron(interpolation_1d(n_c), P);
    SparseMatrix R = scaled(transpose(P), std::pow(0.5, p.dim));
    SparseMatrix A_c = matmul(R, matmul(fine.A, P));
    fine.P = std::move(P);
    fine.R = std::move(R);
    GridLevel next;
    next.A = std::move(A_c);
    next.n_per_axis = n_c;
    next.direct = lu_factor(DenseMatrix::from_sparse(next.A));
    p.hierarchy.levels.push_back(std::move(next));
  }
  return p.hierarchy;
}

}  // namespace metasolve
