#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eigenbox {

/// Axis-aligned box prod_i [-a_i, a_i], stored as half-widths sorted
/// ascending (so half_widths().front() is the inradius).
class Orthotope {
 public:
  static Orthotope from_half_widths(std::vector<double> half_widths);
  /// Side lengths s_i give half-widths s_i / 2.
  static Orthotope from_sides(const std::vector<double>& sides);

  int dim() const { return static_cast<int>(half_widths_.size()); }
  const std::vector<double>& half_widths() const { return half_widths_; }
  double inradius() const { return half_widths_.front(); }
  double volume() const;
  double diameter() const;
  Orthotope scaled(double t) const;
  std::string id() const;

 private:
  explicit Orthotope(std::vector<double> half_widths);
  std::vector<double> half_widths_;
};

enum class SpectrumSource { exact, finite_difference };

/// Ascending Dirichlet eigenvalue list with provenance. For exact spectra
/// mesh_width is absent and error_bars is empty; finite-difference spectra
/// carry the finest mesh width and (after Richardson extrapolation) one
/// error bar per eigenvalue.
struct Spectrum {
  std::vector<double> values;
  SpectrumSource source = SpectrumSource::exact;
  std::optional<double> mesh_width;
  std::string domain_id;
  std::vector<double> error_bars;

  std::size_t size() const { return values.size(); }
  /// 1-based accessor: lambda(k) is the k-th smallest eigenvalue.
  double lambda(std::size_t k) const { return values.at(k - 1); }
  /// Error bar for the k-th eigenvalue, 0 when none are recorded.
  double bar(std::size_t k) const {
    return error_bars.empty() ? 0.0 : error_bars.at(k - 1);
  }
};

/// Relative tolerance under which coincident lattice sums are grouped as
/// one eigenvalue (multiplicity counting on rational boxes).
inline constexpr double kEigenvalueTieTol = 1e-12;

/// k-th smallest value (with multiplicity) of (pi^2/4) sum_i m_i^2/a_i^2
/// over multi-indices m in Z_{>=1}^n, by a best-first heap walk.
/// k is capped at 10^7 (enumeration budget); beyond that throws
/// std::runtime_error.
double kth_eigenvalue(const Orthotope& box, std::int64_t k);

/// First `count` eigenvalues, ascending, source = exact.
Spectrum spectrum_prefix(const Orthotope& box, std::int64_t count);

/// #{m : eigenvalue(m) <= lambda (+ tiny relative slack)} by recursive
/// per-axis range slicing; no heap, no memory growth.
std::int64_t count_below(const Orthotope& box, double lambda);

/// Number of eigenvalues equal to kth_eigenvalue(box, k) under
/// kEigenvalueTieTol relative tolerance.
std::int64_t multiplicity_of_kth(const Orthotope& box, std::int64_t k);

}  // namespace eigenbox
