#include "softring/bessel.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <doctest.h>

#include <array>
#include <cmath>

using namespace softring;

namespace {

struct Reference {
    double x, i0, i1, k0, k1;
};

// 40-digit values from an independent arbitrary-precision evaluation.
constexpr std::array<Reference, 5> kReference{{
    {0.1, 1.002501562934095601400211, 0.05006252604709269211380906, 2.427069024702016612518506,
     9.853844780870606134848547},
    {1.0, 1.266065877752008335598245, 0.565159103992485027207696, 0.4210244382407083333356274,
     0.60190723019723457473754},
    {2.5, 3.289839144050123035705908, 2.516716245288698441528192, 0.06234755320036618602916953,
     0.07389081634774706364899354},
    {10.0, 2815.716628466254471469811, 2670.988303701254654341032, 1.778006231616765181130119e-05,
     1.864877345382558459681686e-05},
    {50.0, 2.932553783849336326654675e20, 2.903078590103556796751433e20, 3.410167749789495513920676e-23,
     3.444102226717555612591853e-23},
}};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("bessel: frozen high-precision values") {
    for (const auto& r : kReference) {
        CAPTURE(r.x);
        CHECK(rel(bessel::i0(r.x), r.i0) < 1e-14);
        CHECK(rel(bessel::i1(r.x), r.i1) < 1e-14);
        CHECK(rel(bessel::k0(r.x), r.k0) < 1e-14);
        CHECK(rel(bessel::k1(r.x), r.k1) < 1e-14);
    }
    CHECK(bessel::k0(1.0) == doctest::Approx(0.42102443824070833333562737921260903613621974822666).epsilon(1e-15));
}

TEST_CASE("bessel: agreement with boost on [1e-8, 700]") {
    for (double lx = -8.0; lx <= std::log10(700.0); lx += 0.05) {
        const double x = std::pow(10.0, lx);
        CAPTURE(x);
        CHECK(rel(bessel::i0(x), boost::math::cyl_bessel_i(0, x)) < 1e-13);
        CHECK(rel(bessel::i1(x), boost::math::cyl_bessel_i(1, x)) < 1e-13);
        CHECK(rel(bessel::k0(x), boost::math::cyl_bessel_k(0, x)) < 1e-13);
        CHECK(rel(bessel::k1(x), boost::math::cyl_bessel_k(1, x)) < 1e-13);
    }
}

TEST_CASE("bessel: Wronskian I0 K1 + I1 K0 = 1 / x") {
    for (double lx = -4.0; lx <= 4.0; lx += 0.1) {
        const double x = std::pow(10.0, lx);
        CAPTURE(x);
        const double w = bessel::i0e(x) * bessel::k1e(x) + bessel::i1e(x) * bessel::k0e(x);
        CHECK(w * x == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("bessel: scaled variants and the log-argument product") {
    // exp(-x) I_n(x) and exp(x) K_n(x) at large x, frozen high-precision values.
    CHECK(rel(bessel::i0e(5000.0), 0.005642036898744588657) < 1e-14);
    CHECK(rel(bessel::i1e(5000.0), 0.0056414726668388859036) < 1e-14);
    CHECK(rel(bessel::k0e(5000.0), 0.017724095445432316158) < 1e-14);
    CHECK(rel(bessel::k1e(5000.0), 0.017725867766374100722) < 1e-14);
    CHECK(rel(bessel::k0e(1000.0), 0.039628321600754217115) < 1e-14);
    CHECK(rel(bessel::i0e(700.0), boost::math::cyl_bessel_i(0, 700.0) * std::exp(-700.0)) < 1e-13);
    CHECK(rel(bessel::k0e(700.0), boost::math::cyl_bessel_k(0, 700.0) * std::exp(700.0)) < 1e-13);
    CHECK(rel(bessel::i0k0_from_log(0.0), bessel::i0(1.0) * bessel::k0(1.0)) < 1e-14);
    // Below underflow the product behaves like -log(z / 2) - gamma.
    const double log_z = -800.0;
    CHECK(rel(bessel::i0k0_from_log(log_z), -(log_z - std::log(2.0)) - 0.57721566490153286061) < 1e-14);
    CHECK(bessel::i0_prime(2.0) == bessel::i1(2.0));
    CHECK(bessel::k0_prime(2.0) == -bessel::k1(2.0));
}
