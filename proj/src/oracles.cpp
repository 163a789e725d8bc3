#include "softring/oracles.hpp"

#include "softring/bessel.hpp"
#include "softring/quadrature.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace softring {

SecularRoot delta_ring_eigenvalue(double alpha, double rho) {
    if (!(alpha > 0.0) || !(rho > 0.0))
        throw std::invalid_argument("delta_ring_eigenvalue: alpha and rho must be positive");
    const double log_coupling = std::log(alpha) + std::log(rho);
    const double target = std::exp(-log_coupling);  // required value of I0 K0
    auto excess = [&](double log_z) { return bessel::i0k0_from_log(log_z) - target; };

    // Bracket in y = log z; excess is strictly decreasing in y.
    double lo = 0.0, hi = 0.0;
    while (excess(lo) <= 0.0) lo -= 1.0;
    while (excess(hi) >= 0.0) hi += 1.0;

    SecularRoot root;
    int it = 0;
    while (it < 200) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (excess(mid) > 0.0) lo = mid;
        else hi = mid;
        ++it;
    }
    const double log_z = 0.5 * (lo + hi);
    root.iterations = it;
    root.bracket_lo = std::exp(lo);
    root.bracket_hi = std::exp(hi);
    root.log_k = log_z - std::log(rho);
    root.k = std::exp(root.log_k);
    root.lambda = -std::exp(2.0 * root.log_k);
    root.residual = std::abs(std::exp(log_coupling) * bessel::i0k0_from_log(log_z) - 1.0);
    return root;
}

double optimal_ring_radius(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("optimal_ring_radius: alpha must be positive");
    // lambda(alpha, R) = alpha^2 lambda(1, alpha R); minimize over log R.
    auto f = [alpha](double log_r) { return delta_ring_eigenvalue(alpha, std::exp(log_r)).lambda; };
    const double centre = -std::log(alpha);
    auto [x, fx] = boost::math::tools::brent_find_minima(f, centre - 6.0, centre + 8.0, 52);
    (void)fx;
    return std::exp(x);
}

double optimal_atom_shift(double radius, double d_minus, double d_plus, double r_star) {
    if (r_star < radius - d_minus) return -d_minus;
    if (r_star > radius + d_plus) return d_plus;
    return r_star - radius;
}

double log_cutoff_quotient(double n, double total_mass, double support_radius) {
    if (!(n >= 2.0)) throw std::domain_error("log_cutoff_quotient: n must be >= 2");
    if (!(n > support_radius))
        throw std::domain_error("log_cutoff_quotient: cutoff plateau does not cover the support");
    if (n > 1e150) throw std::domain_error("log_cutoff_quotient: n too large");
    const double log_n = std::log(n);
    const int panels = std::max(1, static_cast<int>(std::ceil(log_n / 0.25)));
    const double ratio = std::exp(log_n / panels);
    const QuadratureRule ref = gauss_legendre(8, 0.0, 1.0);
    double energy = 0.0;
    double a = n;
    for (int p = 0; p < panels; ++p) {
        const double b = p + 1 == panels ? n * n : a * ratio;
        double panel = 0.0;
        for (std::size_t q = 0; q < ref.size(); ++q) {
            const double r = a + (b - a) * ref.nodes[q];
            const double slope = 1.0 / (r * log_n);  // |phi_n'(r)|
            panel += ref.weights[q] * slope * slope * r;
        }
        energy += panel * (b - a);
        a = b;
    }
    return 2.0 * std::numbers::pi * energy - total_mass;
}

double smallest_negative_cutoff(double total_mass) {
    if (!(total_mass > 0.0)) throw std::invalid_argument("smallest_negative_cutoff: mass must be positive");
    return std::floor(std::exp(2.0 * std::numbers::pi / total_mass)) + 1.0;
}

}  // namespace softring
