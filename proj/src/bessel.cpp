#include "softring/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace softring::bessel {
namespace {

constexpr double kEuler = 0.57721566490153286061;
constexpr double kSeriesMax = 20.0;  // I series / asymptotic crossover
constexpr double kKSeriesMax = 2.0;  // K series / integral crossover

void require_nonnegative(double x, const char* who) {
    if (!(x >= 0.0)) throw std::domain_error(std::string(who) + ": argument must be >= 0");
}
void require_positive(double x, const char* who) {
    if (!(x > 0.0)) throw std::domain_error(std::string(who) + ": argument must be > 0");
}

// sum_k (x/2)^(2k+n) / (k! (k+n)!)
double i_series(int n, double x) {
    const double q = 0.25 * x * x;
    double term = n == 0 ? 1.0 : 0.5 * x;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * (k + n));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

// exp(-x) I_n(x) ~ (2 pi x)^(-1/2) sum_k (-1)^k a_k(n) / x^k
double i_asymptotic_scaled(int n, double x) {
    const double mu = 4.0 * n * n;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * (mu - odd * odd) / (8.0 * k * x);
        if (std::abs(next) > std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

// exp(x) K_n(x) = ∫_0^∞ exp(-x (cosh u - 1)) cosh(n u) du, trapezoidal rule.
// cosh u - 1 is evaluated as 2 sinh^2(u / 2) to avoid cancellation at small u.
double k_integral_scaled(int n, double x) {
    const double h = std::min(0.125, 0.5 / std::sqrt(x));
    double sum = 0.5;  // u = 0 term, half weight
    for (int j = 1; j < 100000; ++j) {
        const double u = j * h;
        const double half = std::sinh(0.5 * u);
        const double term = std::exp(-2.0 * x * half * half) * (n == 0 ? 1.0 : std::cosh(u));
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return h * sum;
}

double k0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double harmonic = 0.0;
    double sum = 0.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * k);
        harmonic += 1.0 / k;
        const double add = term * harmonic;
        sum += add;
        if (add < 1e-17 * std::abs(sum)) break;
    }
    return -(std::log(0.5 * x) + kEuler) * i_series(0, x) + sum;
}

double k1_series(double x) {
    // K1 = 1/x + ln(x/2) I1 - (x/4) sum_k [psi(k+1) + psi(k+2)] q^k / (k! (k+1)!)
    const double q = 0.25 * x * x;
    double term = 1.0;
    double psi1 = -kEuler;        // psi(k+1)
    double psi2 = 1.0 - kEuler;   // psi(k+2)
    double sum = term * (psi1 + psi2);
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1));
        psi1 += 1.0 / k;
        psi2 += 1.0 / (k + 1);
        const double add = term * (psi1 + psi2);
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return 1.0 / x + std::log(0.5 * x) * i_series(1, x) - 0.25 * x * sum;
}

}  // namespace

double i0e(double x) {
    require_nonnegative(x, "bessel::i0e");
    return x <= kSeriesMax ? std::exp(-x) * i_series(0, x) : i_asymptotic_scaled(0, x);
}

double i1e(double x) {
    require_nonnegative(x, "bessel::i1e");
    return x <= kSeriesMax ? std::exp(-x) * i_series(1, x) : i_asymptotic_scaled(1, x);
}

double k0e(double x) {
    require_positive(x, "bessel::k0e");
    return x <= kKSeriesMax ? std::exp(x) * k0_series(x) : k_integral_scaled(0, x);
}

double k1e(double x) {
    require_positive(x, "bessel::k1e");
    return x <= kKSeriesMax ? std::exp(x) * k1_series(x) : k_integral_scaled(1, x);
}

double i0(double x) {
    require_nonnegative(x, "bessel::i0");
    return x <= kSeriesMax ? i_series(0, x) : std::exp(x) * i_asymptotic_scaled(0, x);
}

double i1(double x) {
    require_nonnegative(x, "bessel::i1");
    return x <= kSeriesMax ? i_series(1, x) : std::exp(x) * i_asymptotic_scaled(1, x);
}

double k0(double x) {
    require_positive(x, "bessel::k0");
    return x <= kKSeriesMax ? k0_series(x) : std::exp(-x) * k_integral_scaled(0, x);
}

double k1(double x) {
    require_positive(x, "bessel::k1");
    return x <= kKSeriesMax ? k1_series(x) : std::exp(-x) * k_integral_scaled(1, x);
}

double i0k0_from_log(double log_z) {
    if (log_z < -20.0) {
        // I0 = 1 + O(z^2), K0 = -(ln(z/2) + gamma) + O(z^2 ln z); corrections below 1e-17.
        return -(log_z - std::numbers::ln2 + kEuler);
    }
    const double z = std::exp(log_z);
    return i0e(z) * k0e(z);
}

}  // namespace softring::bessel
