#include "eigenbox/box_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace eigenbox {

namespace {

constexpr std::int64_t kEnumerationBudget = 10'000'000;

double quarter_pi_sq() {
  return 0.25 * std::numbers::pi * std::numbers::pi;
}

}  // namespace

Orthotope::Orthotope(std::vector<double> half_widths)
    : half_widths_(std::move(half_widths)) {
  if (half_widths_.empty()) {
    throw std::invalid_argument("Orthotope: dimension must be >= 1");
  }
  for (double a : half_widths_) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("Orthotope: half-widths must be positive");
    }
  }
  std::sort(half_widths_.begin(), half_widths_.end());
}

Orthotope Orthotope::from_half_widths(std::vector<double> half_widths) {
  return Orthotope(std::move(half_widths));
}

Orthotope Orthotope::from_sides(const std::vector<double>& sides) {
  std::vector<double> a(sides.size());
  for (std::size_t i = 0; i < sides.size(); ++i) a[i] = 0.5 * sides[i];
  return Orthotope(std::move(a));
}

double Orthotope::volume() const {
  double v = 1.0;
  for (double a : half_widths_) v *= 2.0 * a;
  return v;
}

double Orthotope::diameter() const {
  double s = 0.0;
  for (double a : half_widths_) s += 4.0 * a * a;
  return std::sqrt(s);
}

Orthotope Orthotope::scaled(double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("Orthotope::scaled: t <= 0");
  std::vector<double> a = half_widths_;
  for (double& x : a) x *= t;
  return Orthotope(std::move(a));
}

std::string Orthotope::id() const {
  std::string s = "box[";
  char buf[32];
  for (std::size_t i = 0; i < half_widths_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", half_widths_[i]);
    if (i) s += ",";
    s += buf;
  }
  s += "]";
  return s;
}

namespace {

struct MultiIndexHash {
  std::size_t operator()(const std::vector<std::int32_t>& m) const {
    std::size_t h = 1469598103934665603ull;
    for (std::int32_t v : m) {
      h ^= static_cast<std::size_t>(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};

struct HeapEntry {
  double value;
  std::vector<std::int32_t> index;
  bool operator>(const HeapEntry& other) const { return value > other.value; }
};

// Best-first walk over the lattice Z_{>=1}^n ordered by the separable
// eigenvalue sum. Neighbors increment one coordinate; a visited set keeps
// each multi-index unique. `emit` receives eigenvalues in ascending order
// and returns false to stop.
void lattice_walk(const Orthotope& box,
                  const std::function<bool(double)>& emit) {
  const int n = box.dim();
  std::vector<double> coeff(n);
  for (int i = 0; i < n; ++i) {
    const double a = box.half_widths()[i];
    coeff[i] = quarter_pi_sq() / (a * a);
  }

  auto value_of = [&](const std::vector<std::int32_t>& m) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += coeff[i] * double(m[i]) * double(m[i]);
    return v;
  };

  std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> heap;
  std::unordered_set<std::vector<std::int32_t>, MultiIndexHash> visited;

  std::vector<std::int32_t> ones(n, 1);
  heap.push({value_of(ones), ones});
  visited.insert(std::move(ones));

  std::int64_t pushed = 1;
  while (!heap.empty()) {
    HeapEntry top = heap.top();
    heap.pop();
    if (!emit(top.value)) return;
    for (int i = 0; i < n; ++i) {
      std::vector<std::int32_t> next = top.index;
      if (next[i] == std::numeric_limits<std::int32_t>::max()) {
        throw std::runtime_error("lattice_walk: multi-index overflow");
      }
      ++next[i];
      if (visited.insert(next).second) {
        heap.push({value_of(next), std::move(next)});
        if (++pushed > 4 * kEnumerationBudget) {
          throw std::runtime_error("lattice_walk: enumeration budget exceeded");
        }
      }
    }
  }
}

void check_k(std::int64_t k) {
  if (k < 1) throw std::invalid_argument("eigenvalue index must be >= 1");
  if (k > kEnumerationBudget) {
    throw std::runtime_error("eigenvalue index exceeds enumeration budget");
  }
}

}  // namespace

double kth_eigenvalue(const Orthotope& box, std::int64_t k) {
  check_k(k);
  double result = 0.0;
  std::int64_t seen = 0;
  lattice_walk(box, [&](double v) {
    ++seen;
    result = v;
    return seen < k;
  });
  return result;
}

Spectrum spectrum_prefix(const Orthotope& box, std::int64_t count) {
  check_k(count);
  Spectrum spec;
  spec.values.reserve(static_cast<std::size_t>(count));
  lattice_walk(box, [&](double v) {
    spec.values.push_back(v);
    return static_cast<std::int64_t>(spec.values.size()) < count;
  });
  spec.source = SpectrumSource::exact;
  spec.domain_id = box.id();
  return spec;
}

std::int64_t count_below(const Orthotope& box, double lambda) {
  if (!std::isfinite(lambda)) {
    throw std::invalid_argument("count_below: lambda must be finite");
  }
  const int n = box.dim();
  std::vector<double> inv_a_sq(n);
  for (int i = 0; i < n; ++i) {
    const double a = box.half_widths()[i];
    inv_a_sq[i] = 1.0 / (a * a);
  }
  // Inclusive boundary with a relative slack well below the 1e-12 grouping
  // tolerance, so that count_below(kth_eigenvalue(k)) >= k is stable under
  // rounding while count_below(lambda * (1 - 1e-12)) stays < k.
  const double budget = lambda * (1.0 + 1e-13) / quarter_pi_sq();

  std::function<std::int64_t(int, double)> slice = [&](int axis,
                                                       double remaining) {
    if (remaining < inv_a_sq[axis]) return std::int64_t{0};
    const std::int64_t m_max = static_cast<std::int64_t>(
        std::floor(std::sqrt(remaining / inv_a_sq[axis])));
    if (axis == n - 1) return m_max;
    std::int64_t total = 0;
    for (std::int64_t m = 1; m <= m_max; ++m) {
      total += slice(axis + 1, remaining - inv_a_sq[axis] * double(m * m));
    }
    return total;
  };
  return slice(0, budget);
}

std::int64_t multiplicity_of_kth(const Orthotope& box, std::int64_t k) {
  check_k(k);
  const double lambda_k = kth_eigenvalue(box, k);
  const double cutoff = lambda_k * (1.0 + kEigenvalueTieTol);
  std::int64_t mult = 0;
  lattice_walk(box, [&](double v) {
    if (v > cutoff) return false;
    if (std::fabs(v - lambda_k) <= kEigenvalueTieTol * lambda_k) ++mult;
    return true;
  });
  return mult;
}

}  // namespace eigenbox
