#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "eigenbox/box_spectrum.hpp"
#include "eigenbox/geometry.hpp"

namespace eigenbox {

/// 5-point finite-difference Dirichlet Laplacian on the interior nodes of
/// a rasterized polygon. Neighbors outside the mask are dropped (their
/// value is the Dirichlet zero), so the matrix is symmetric positive
/// definite with diagonal 4/h^2 and off-diagonals in {0, -1/h^2}.
struct DiscreteLaplacian {
  Eigen::SparseMatrix<double> matrix;
  double h = 0.0;
  std::vector<std::pair<std::int64_t, std::int64_t>> nodes;  // row -> (i, j)
  std::string domain_id;

  int size() const { return static_cast<int>(matrix.rows()); }
};

inline constexpr int kNodeBudget = 200000;

DiscreteLaplacian assemble(const GridMask& mask, std::string domain_id = {});
DiscreteLaplacian assemble(const ConvexPolygon& poly, double h);

/// k smallest eigenvalues by shift-invert Lanczos at shift 0 (inner solves
/// by unpreconditioned CG to relative residual 1e-12, fully
/// reorthogonalized basis). Deterministic: the first pass starts from the
/// normalized all-ones vector; degenerate clusters are completed by
/// deflation passes with fixed seeded start vectors, so runs are
/// bit-stable per platform. Problems with <= 400 nodes are solved densely.
/// Requires k <= min(50, node count) and rel_tol >= 1e-10.
Spectrum smallest_eigenvalues(const DiscreteLaplacian& laplacian, int k,
                              double rel_tol);

/// Solve at each mesh width, extrapolate the leading c*h^p error per
/// eigenvalue (p fitted from the finest mesh triple, p = 1 assumed when
/// only two meshes are given), and report error bars
/// |extrapolated - finest|. Spectrum values are the extrapolated ones.
Spectrum richardson_estimate(const ConvexPolygon& poly, int k,
                             const std::vector<double>& mesh_widths,
                             double rel_tol = 1e-9);

/// Same pipeline for a pre-rasterized family of masks (nonconvex sweep).
Spectrum richardson_estimate_masks(const std::vector<GridMask>& masks,
                                   const std::string& domain_id, int k,
                                   double rel_tol = 1e-9);

}  // namespace eigenbox
