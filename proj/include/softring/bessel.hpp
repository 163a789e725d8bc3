#pragma once

/// Modified Bessel functions of order 0 and 1 for real positive arguments.
///
/// Small arguments use the ascending series. Large arguments use the Hankel
/// asymptotic expansion for I and the trapezoidal rule on the integral
/// representation K_n(x) = ∫_0^∞ exp(-x cosh u) cosh(nu) du for K, which
/// converges geometrically for analytic integrands. Exponentially scaled
/// variants avoid overflow and underflow for large x.
namespace softring::bessel {

double i0(double x);
double i1(double x);
double k0(double x);
double k1(double x);

/// exp(-x) I_n(x)
double i0e(double x);
double i1e(double x);
/// exp(x) K_n(x)
double k0e(double x);
double k1e(double x);

inline double i0_prime(double x) { return i1(x); }
inline double k0_prime(double x) { return -k1(x); }

/// I0(z) K0(z) evaluated from log z, valid also where z underflows.
double i0k0_from_log(double log_z);

}  // namespace softring::bessel
