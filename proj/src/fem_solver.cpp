#include "eigenbox/fem_solver.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace eigenbox {

DiscreteLaplacian assemble(const GridMask& mask, std::string domain_id) {
  const auto n = static_cast<std::int64_t>(mask.nodes.size());
  if (n == 0) throw std::invalid_argument("assemble: empty grid mask");
  if (n > kNodeBudget) {
    throw std::runtime_error("assemble: node budget exceeded (" +
                             std::to_string(n) + " nodes)");
  }

  std::map<std::pair<std::int64_t, std::int64_t>, int> row_of;
  for (std::int64_t r = 0; r < n; ++r) {
    row_of.emplace(mask.nodes[static_cast<std::size_t>(r)],
                   static_cast<int>(r));
  }

  const double inv_h2 = 1.0 / (mask.h * mask.h);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(5 * n));
  for (std::int64_t r = 0; r < n; ++r) {
    const auto [i, j] = mask.nodes[static_cast<std::size_t>(r)];
    triplets.emplace_back(static_cast<int>(r), static_cast<int>(r),
                          4.0 * inv_h2);
    const std::pair<std::int64_t, std::int64_t> neighbors[4] = {
        {i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
    for (const auto& nb : neighbors) {
      auto it = row_of.find(nb);
      if (it != row_of.end()) {
        triplets.emplace_back(static_cast<int>(r), it->second, -inv_h2);
      }
    }
  }

  DiscreteLaplacian lap;
  lap.matrix.resize(static_cast<int>(n), static_cast<int>(n));
  lap.matrix.setFromTriplets(triplets.begin(), triplets.end());
  lap.matrix.makeCompressed();
  lap.h = mask.h;
  lap.nodes = mask.nodes;
  lap.domain_id = std::move(domain_id);
  return lap;
}

DiscreteLaplacian assemble(const ConvexPolygon& poly, double h) {
  return assemble(rasterize(poly, h), "polygon");
}

namespace {

// Deterministic start vector for deflation passes (splitmix64 stream).
Eigen::VectorXd seeded_vector(int n, std::uint64_t pass) {
  Eigen::VectorXd v(n);
  std::uint64_t state = 0x9e3779b97f4a7c15ull * (pass + 1);
  for (int i = 0; i < n; ++i) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    v(i) = 2.0 * (double(z >> 11) * 0x1.0p-53) - 1.0;
  }
  return v;
}

struct EigenPair {
  double lambda;
  Eigen::VectorXd vec;
};

Spectrum dense_smallest(const DiscreteLaplacian& lap, int k) {
  Eigen::MatrixXd dense(lap.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("smallest_eigenvalues: dense solve failed");
  }
  Spectrum spec;
  spec.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
  spec.source = SpectrumSource::finite_difference;
  spec.mesh_width = lap.h;
  spec.domain_id = lap.domain_id;
  return spec;
}

}  // namespace

Spectrum smallest_eigenvalues(const DiscreteLaplacian& lap, int k,
                              double rel_tol) {
  const int n = lap.size();
  if (k < 1 || k > std::min(50, n)) {
    throw std::invalid_argument(
        "smallest_eigenvalues: k must lie in [1, min(50, node count)]");
  }
  if (!(rel_tol >= 1e-10)) {
    throw std::invalid_argument("smallest_eigenvalues: rel_tol must be >= 1e-10");
  }
  if (n <= 400) return dense_smallest(lap, k);

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                           Eigen::Lower | Eigen::Upper,
                           Eigen::IdentityPreconditioner>
      cg;
  cg.setTolerance(1e-12);
  cg.setMaxIterations(200 * static_cast<int>(std::sqrt(double(n))) + 2000);
  cg.compute(lap.matrix);

  auto apply_inverse = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd x = cg.solve(v);
    if (cg.info() != Eigen::Success && cg.error() > 1e-10) {
      throw std::runtime_error(
          "smallest_eigenvalues: CG did not converge (residual " +
          std::to_string(cg.error()) + ")");
    }
    return x;
  };

  std::vector<EigenPair> collected;
  double worst_residual = 0.0;
  const int max_passes = 8;

  for (int pass = 0; pass < max_passes; ++pass) {
    Eigen::VectorXd v0 = (pass == 0) ? Eigen::VectorXd::Ones(n)
                                     : seeded_vector(n, pass);
    for (const auto& p : collected) v0 -= p.vec.dot(v0) * p.vec;
    if (v0.norm() < 1e-8) continue;
    v0.normalize();

    const int want = std::max(2, k + 2 - static_cast<int>(collected.size()));
    const int m_max = std::min(n, std::max(60, 3 * want + 40));

    std::vector<Eigen::VectorXd> basis = {v0};
    std::vector<double> alpha, beta;
    Eigen::MatrixXd ritz_vectors;
    Eigen::VectorXd ritz_values;
    int converged = 0;

    for (int step = 0; step < m_max; ++step) {
      Eigen::VectorXd w = apply_inverse(basis.back());
      // Full reorthogonalization against the basis and the deflation set,
      // done twice for stability.
      for (int sweep = 0; sweep < 2; ++sweep) {
        for (const auto& p : collected) w -= p.vec.dot(w) * p.vec;
        for (const auto& b : basis) w -= b.dot(w) * b;
      }
      alpha.push_back(basis.back().dot(apply_inverse(basis.back())));
      // alpha from the projected operator: recompute via the Lanczos
      // relation instead of a second solve.
      alpha.back() = basis.back().dot(apply_inverse(basis.back()));
      const double b_norm = w.norm();
      beta.push_back(b_norm);

      const int m = static_cast<int>(alpha.size());
      if (m >= want || b_norm < 1e-14) {
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
          t(i, i) = alpha[static_cast<std::size_t>(i)];
          if (i + 1 < m) {
            t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
          }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        converged = 0;
        for (int i = m - 1; i >= 0; --i) {  // largest theta first
          const double theta = es.eigenvalues()(i);
          if (theta <= 0.0) break;
          const double res = std::fabs(b_norm * es.eigenvectors()(m - 1, i));
          if (res / theta <= rel_tol) {
            ++converged;
          } else {
            break;
          }
        }
        if (converged >= want || b_norm < 1e-14 || m == m_max) {
          ritz_values = es.eigenvalues();
          ritz_vectors = es.eigenvectors();
          if (b_norm < 1e-14 || m == m_max) break;
          if (converged >= want) break;
        }
      }
      if (b_norm < 1e-14) break;
      basis.push_back(w / b_norm);
    }

    // Harvest converged Ritz pairs (largest theta = smallest lambda).
    const int m = static_cast<int>(alpha.size());
    int added = 0;
    if (ritz_values.size() > 0) {
      for (int i = m - 1; i >= 0; --i) {
        const double theta = ritz_values(i);
        if (theta <= 0.0) break;
        const double res =
            std::fabs(beta[static_cast<std::size_t>(m - 1)] *
                      ritz_vectors(m - 1, i));
        if (res / theta > rel_tol) break;
        worst_residual = std::max(worst_residual, res / theta);
        Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
        for (int s = 0; s < m; ++s) {
          y += ritz_vectors(s, i) * basis[static_cast<std::size_t>(s)];
        }
        for (const auto& p : collected) y -= p.vec.dot(y) * p.vec;
        const double y_norm = y.norm();
        if (y_norm < 1e-6) continue;  // duplicate of a deflated pair
        y /= y_norm;
        collected.push_back({1.0 / theta, y});
        ++added;
      }
    }

    if (static_cast<int>(collected.size()) >= k) {
      std::sort(collected.begin(), collected.end(),
                [](const EigenPair& a, const EigenPair& b) {
                  return a.lambda < b.lambda;
                });
      // A pass that adds nothing below the current k-th value confirms no
      // hidden copy of a degenerate cluster is missing.
      const double kth = collected[static_cast<std::size_t>(k - 1)].lambda;
      bool reordered = false;
      if (added > 0) {
        for (int i = 0; i < added; ++i) {
          const auto& p = collected[collected.size() - 1 - i];
          (void)p;
        }
        // `added` pairs were merged; recheck ordering effect conservatively.
        reordered = collected.size() >= static_cast<std::size_t>(k) &&
                    pass > 0 &&
                    collected[static_cast<std::size_t>(k - 1)].lambda <
                        kth * (1.0 - 1e-12);
      }
      if (pass > 0 && !reordered) break;
    }
  }

  if (static_cast<int>(collected.size()) < k) {
    throw std::runtime_error(
        "smallest_eigenvalues: iteration cap reached with " +
        std::to_string(collected.size()) + " converged eigenvalues (worst "
        "relative residual " +
        std::to_string(worst_residual) + ")");
  }

  std::sort(collected.begin(), collected.end(),
            [](const EigenPair& a, const EigenPair& b) {
              return a.lambda < b.lambda;
            });
  Spectrum spec;
  spec.values.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    spec.values.push_back(collected[static_cast<std::size_t>(i)].lambda);
  }
  spec.source = SpectrumSource::finite_difference;
  spec.mesh_width = lap.h;
  spec.domain_id = lap.domain_id;
  return spec;
}

namespace {

Spectrum richardson_from_solutions(const std::vector<double>& hs,
                                   const std::vector<Spectrum>& solutions,
                                   const std::string& domain_id, int k,
                                   double rel_tol) {
  const std::size_t levels = hs.size();
  Spectrum out;
  out.source = SpectrumSource::finite_difference;
  out.mesh_width = hs.back();
  out.domain_id = domain_id;
  out.values.resize(static_cast<std::size_t>(k));
  out.error_bars.resize(static_cast<std::size_t>(k));

  for (int e = 0; e < k; ++e) {
    const double finest = solutions[levels - 1].values[e];
    double p = 1.0;
    if (levels >= 3) {
      const double l1 = solutions[levels - 3].values[e];
      const double l2 = solutions[levels - 2].values[e];
      const double l3 = finest;
      const double d12 = l1 - l2;
      const double d23 = l2 - l3;
      const double h1 = hs[levels - 3], h2 = hs[levels - 2],
                   h3 = hs[levels - 1];
      if (d12 * d23 > 0.0) {
        // Solve d12/d23 = (h1^p - h2^p)/(h2^p - h3^p) by bisection.
        const double target = d12 / d23;
        auto ratio_at = [&](double pp) {
          return (std::pow(h1, pp) - std::pow(h2, pp)) /
                 (std::pow(h2, pp) - std::pow(h3, pp));
        };
        double p_lo = 0.25, p_hi = 4.0;
        if ((ratio_at(p_lo) - target) * (ratio_at(p_hi) - target) < 0.0) {
          for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (p_lo + p_hi);
            if ((ratio_at(mid) - target) * (ratio_at(p_lo) - target) <= 0.0) {
              p_hi = mid;
            } else {
              p_lo = mid;
            }
          }
          p = std::clamp(0.5 * (p_lo + p_hi), 0.5, 3.0);
        }
      }
    }
    const double h_prev = hs[levels - 2];
    const double h_fine = hs[levels - 1];
    const double prev = solutions[levels - 2].values[e];
    const double denom = std::pow(h_prev / h_fine, p) - 1.0;
    const double extrapolated =
        (denom > 1e-12) ? finest + (finest - prev) / denom : finest;
    out.values[static_cast<std::size_t>(e)] = extrapolated;
    out.error_bars[static_cast<std::size_t>(e)] =
        std::max(std::fabs(extrapolated - finest), 4.0 * rel_tol * finest);
  }
  return out;
}

}  // namespace

Spectrum richardson_estimate(const ConvexPolygon& poly, int k,
                             const std::vector<double>& mesh_widths,
                             double rel_tol) {
  if (mesh_widths.size() < 2) {
    throw std::invalid_argument(
        "richardson_estimate: need at least 2 mesh widths");
  }
  std::vector<double> hs = mesh_widths;
  std::sort(hs.begin(), hs.end(), std::greater<>());
  std::vector<Spectrum> solutions;
  solutions.reserve(hs.size());
  for (double h : hs) {
    solutions.push_back(smallest_eigenvalues(assemble(poly, h), k, rel_tol));
  }
  return richardson_from_solutions(hs, solutions, "polygon", k, rel_tol);
}

Spectrum richardson_estimate_masks(const std::vector<GridMask>& masks,
                                   const std::string& domain_id, int k,
                                   double rel_tol) {
  if (masks.size() < 2) {
    throw std::invalid_argument(
        "richardson_estimate_masks: need at least 2 masks");
  }
  std::vector<GridMask> sorted = masks;
  std::sort(sorted.begin(), sorted.end(),
            [](const GridMask& a, const GridMask& b) { return a.h > b.h; });
  std::vector<double> hs;
  std::vector<Spectrum> solutions;
  for (const auto& mask : sorted) {
    hs.push_back(mask.h);
    solutions.push_back(
        smallest_eigenvalues(assemble(mask, domain_id), k, rel_tol));
  }
  return richardson_from_solutions(hs, solutions, domain_id, k, rel_tol);
}

}  // namespace eigenbox
