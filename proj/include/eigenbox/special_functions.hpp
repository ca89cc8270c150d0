#pragma once

namespace eigenbox {

/// Bessel function of the first kind J_nu(x), evaluated by the ascending
/// power series with compensated (double-double) accumulation so that the
/// alternating-term cancellation stays below 1e-12 absolute on the whole
/// range this toolkit touches (orders in [-1/2, 61], arguments up to ~70;
/// the series noise floor is ~1.2e-32 times the largest term).
///
/// Throws std::domain_error for x < 0, x > 100, or nu outside [-1/2, 61].
double bessel_j(double nu, double x);

/// Lower/upper endpoints of the classical first-zero bracket
/// sqrt((nu+1)(nu+5)) < j_{nu,1} < sqrt(2(nu+1)(nu+3)).
double bessel_zero_bracket_low(double nu);
double bessel_zero_bracket_high(double nu);

/// First positive zero j_{nu,1} of J_nu for nu in [-1/2, 60].
///
/// The search is seeded by the bracket above: scan for the first sign
/// change, bisect that cell to 1e-13 width, then one guarded Newton
/// polish. The returned point is certified by a sign change of bessel_j
/// across +-1e-9; failure to certify throws std::runtime_error.
double first_bessel_zero(double nu);

/// Volume of the unit ball in R^n: pi^(n/2) / Gamma(n/2 + 1), for
/// 1 <= n <= 60. Evaluated through std::lgamma.
double unit_ball_volume(int n);

}  // namespace eigenbox
