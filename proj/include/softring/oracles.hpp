#pragma once

namespace softring {

/// Root of the delta-ring secular equation  alpha * rho * I0(k rho) K0(k rho) = 1.
///
/// The left side is strictly decreasing in k, diverges logarithmically at 0
/// and decays like alpha / (2k), so the root exists and is unique. The search
/// runs in z = k rho on a log scale; `log_k` stays finite even when k, and
/// hence lambda = -k^2, underflows (alpha * rho below roughly 1.5e-3).
struct SecularRoot {
    double k = 0.0;
    double log_k = 0.0;
    double lambda = 0.0;        // -k^2
    double bracket_lo = 0.0;    // bracket on z = k rho
    double bracket_hi = 0.0;
    double residual = 0.0;      // |alpha rho I0 K0 - 1|
    int iterations = 0;
};

/// Ground-state eigenvalue of -Delta - alpha delta_C for a circle C of radius rho.
SecularRoot delta_ring_eigenvalue(double alpha, double rho);

/// Radius minimizing rho -> lambda_1(alpha delta_C), computed from the secular oracle.
double optimal_ring_radius(double alpha);

/// Optimal atom position for a circle of radius R with transversal interval
/// [-d_minus, d_plus]: clamp of R_star - R to the interval.
double optimal_atom_shift(double radius, double d_minus, double d_plus, double r_star);

/// Form value h_mu[phi_n] = ||grad phi_n||^2 - mu(R^2) for the logarithmic cutoff
///   phi_n = 1 on |x| < n,  (log n^2 - log|x|) / log n on n <= |x| < n^2,  0 beyond.
/// The gradient energy is computed by composite Gauss–Legendre quadrature of
/// 2 pi ∫ |phi_n'(r)|^2 r dr over a geometric partition of [n, n^2].
/// Throws std::domain_error when n does not exceed `support_radius` (phi_n is
/// then not identically 1 on the measure support) or when n < 2.
double log_cutoff_quotient(double n, double total_mass, double support_radius = 0.0);

/// Smallest integer n with 2 pi / log n < total_mass, i.e. the first cutoff
/// making the form value negative (support coverage is not included).
double smallest_negative_cutoff(double total_mass);

}  // namespace softring
