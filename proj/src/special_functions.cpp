#include "eigenbox/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace eigenbox {

namespace {

// Double-double arithmetic (Dekker/Knuth error-free transforms). The
// Bessel series below alternates with terms up to ~1e17 larger than the
// result near high-order zeros; a plain double accumulator would lose all
// significant digits there, while two doubles keep ~31 digits.
struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DD quick_two_sum(double a, double b) {
  // requires |a| >= |b|
  double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DD dd_add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  return quick_two_sum(s.hi, s.lo + a.lo + b.lo);
}

inline DD dd_sub(DD a, DD b) { return dd_add(a, DD{-b.hi, -b.lo}); }

inline DD dd_mul(DD a, DD b) {
  DD p = two_prod(a.hi, b.hi);
  return quick_two_sum(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi);
}

inline DD dd_div(DD a, DD b) {
  double q1 = a.hi / b.hi;
  DD r = dd_sub(a, dd_mul(b, DD{q1, 0.0}));
  double q2 = r.hi / b.hi;
  r = dd_sub(r, dd_mul(b, DD{q2, 0.0}));
  double q3 = r.hi / b.hi;
  DD q = quick_two_sum(q1, q2);
  return dd_add(q, DD{q3, 0.0});
}

constexpr double kNuMin = -0.5;
constexpr double kNuMaxEval = 61.0;  // one order above the zero-finder range
constexpr double kNuMaxZero = 60.0;
constexpr double kXMax = 100.0;

// J_nu(x) = (x/2)^nu / Gamma(nu+1) * sum_{m>=0} s_m,
// s_0 = 1, s_{m+1} = -s_m * (x/2)^2 / ((m+1)(nu+m+1)).
// The sum carries all the cancellation, the prefactor only scales it.
double bessel_series(double nu, double x) {
  const double half = 0.5 * x;
  const DD q = two_prod(half, half);

  DD term{1.0, 0.0};
  DD sum{1.0, 0.0};
  double max_term = 1.0;
  for (int m = 1; m <= 2000; ++m) {
    DD denom = dd_mul(DD{double(m), 0.0}, two_sum(nu, double(m)));
    term = dd_div(dd_mul(term, q), denom);
    if (m & 1) {
      sum = dd_sub(sum, term);
    } else {
      sum = dd_add(sum, term);
    }
    const double at = std::fabs(term.hi);
    max_term = std::max(max_term, at);
    const bool past_peak = q.hi < double(m) * (nu + double(m));
    if (past_peak && at <= 1e-18 * std::fabs(sum.hi) + 1e-30 * max_term) {
      break;
    }
  }

  const double log_prefactor = nu * std::log(half) - std::lgamma(nu + 1.0);
  const double prefactor = std::exp(log_prefactor);
  return prefactor * sum.hi + prefactor * sum.lo;
}

}  // namespace

double bessel_j(double nu, double x) {
  if (!(x >= 0.0) || x > kXMax) {
    throw std::domain_error("bessel_j: x must lie in [0, 100], got " +
                            std::to_string(x));
  }
  if (!(nu >= kNuMin) || nu > kNuMaxEval) {
    throw std::domain_error("bessel_j: order must lie in [-1/2, 61], got " +
                            std::to_string(nu));
  }
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    if (nu > 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  return bessel_series(nu, x);
}

double bessel_zero_bracket_low(double nu) {
  return std::sqrt((nu + 1.0) * (nu + 5.0));
}

double bessel_zero_bracket_high(double nu) {
  return std::sqrt(2.0 * (nu + 1.0) * (nu + 3.0));
}

namespace {

// d/dx J_nu, chosen so the shifted order stays within the supported range.
double bessel_j_prime(double nu, double x) {
  if (nu >= 0.5) {
    return bessel_j(nu - 1.0, x) - (nu / x) * bessel_j(nu, x);
  }
  return (nu / x) * bessel_j(nu, x) - bessel_j(nu + 1.0, x);
}

}  // namespace

double first_bessel_zero(double nu) {
  if (!(nu >= kNuMin) || nu > kNuMaxZero) {
    throw std::domain_error(
        "first_bessel_zero: order must lie in [-1/2, 60], got " +
        std::to_string(nu));
  }

  const double lo = bessel_zero_bracket_low(nu);
  const double hi = bessel_zero_bracket_high(nu);

  // The bracket may contain higher zeros for large orders; scanning with a
  // step below the minimal zero spacing (> pi) pins the first sign change.
  const double step = std::min(1.0, (hi - lo) / 8.0);
  double a = lo;
  double fa = bessel_j(nu, a);
  double b = a;
  bool bracketed = false;
  while (b < hi) {
    b = std::min(b + step, hi);
    const double fb = bessel_j(nu, b);
    if ((fa > 0.0) != (fb > 0.0)) {
      bracketed = true;
      break;
    }
    a = b;
    fa = fb;
  }
  if (!bracketed) {
    throw std::runtime_error(
        "first_bessel_zero: no sign change inside the bracket (evaluation "
        "bug) for order " +
        std::to_string(nu));
  }

  double fa_sign = fa;
  while (b - a > 1e-13) {
    const double mid = 0.5 * (a + b);
    const double fm = bessel_j(nu, mid);
    if ((fm > 0.0) == (fa_sign > 0.0)) {
      a = mid;
      fa_sign = fm;
    } else {
      b = mid;
    }
  }
  double root = 0.5 * (a + b);

  const double f = bessel_j(nu, root);
  const double fp = bessel_j_prime(nu, root);
  if (fp != 0.0 && std::isfinite(fp)) {
    const double polished = root - f / fp;
    if (polished > lo && polished < hi &&
        std::fabs(polished - root) < 8.0 * (b - a + 1e-13)) {
      root = polished;
    }
  }

  const double left = bessel_j(nu, root - 1e-9);
  const double right = bessel_j(nu, root + 1e-9);
  if (!(left > 0.0 && right < 0.0)) {
    throw std::runtime_error(
        "first_bessel_zero: sign-change certificate failed for order " +
        std::to_string(nu));
  }
  return root;
}

double unit_ball_volume(int n) {
  if (n < 1 || n > 60) {
    throw std::domain_error("unit_ball_volume: n must lie in [1, 60], got " +
                            std::to_string(n));
  }
  const double half_n = 0.5 * double(n);
  return std::exp(half_n * std::log(std::numbers::pi) -
                  std::lgamma(half_n + 1.0));
}

}  // namespace eigenbox
