#include "softring/oracles.hpp"

#include "softring/bessel.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace softring;

TEST_CASE("secular root: frozen values from an independent root finder") {
    struct Case {
        double alpha, rho, lambda, log_k;
    };
    const Case cases[] = {
        {1.0, 1.0, -0.23919257607074807153, -0.71524314694041522048},
        {0.5, 2.0, -0.059798144017687017882, -1.4083903275003605299},
        {2.0, 0.5, -0.95677030428299228612, -0.022095966380469911061},
        {1.0, 2.0, -0.28447190655486931608, -0.62856038851154873522},
        {1.0, 200.0, -0.25000625093798881956, -0.69313467884026196797},
    };
    for (const auto& c : cases) {
        CAPTURE(c.alpha);
        CAPTURE(c.rho);
        const SecularRoot r = delta_ring_eigenvalue(c.alpha, c.rho);
        CHECK(r.lambda == doctest::Approx(c.lambda).epsilon(1e-12));
        CHECK(r.log_k == doctest::Approx(c.log_k).epsilon(1e-12));
        CHECK(r.residual < 1e-13);
        const double z = r.k * c.rho;
        CHECK(c.alpha * c.rho * bessel::i0(z) * bessel::k0(z) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("secular root: weak coupling keeps log k finite") {
    const SecularRoot r = delta_ring_eigenvalue(0.01, 1.0);
    CHECK(r.log_k == doctest::Approx(-99.88406848434158547).epsilon(1e-12));
    CHECK(r.lambda <= 0.0);
    CHECK(r.lambda > -1e-80);
}

TEST_CASE("secular root: annulus limit -alpha^2 / 4") {
    CHECK(delta_ring_eigenvalue(1.0, 200.0).lambda == doctest::Approx(-0.25).epsilon(1e-4));
    CHECK(delta_ring_eigenvalue(2.0, 100.0).lambda == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("secular root: scaling lambda(c alpha, rho / c) = c^2 lambda(alpha, rho)") {
    const double base = delta_ring_eigenvalue(1.0, 1.3).lambda;
    CHECK(delta_ring_eigenvalue(3.0, 1.3 / 3.0).lambda == doctest::Approx(9.0 * base).epsilon(1e-12));
}

TEST_CASE("optimal ring radius") {
    const double r1 = optimal_ring_radius(1.0);
    CHECK(r1 == doctest::Approx(2.0155645093760285596).epsilon(1e-8));
    CHECK(optimal_ring_radius(2.0) == doctest::Approx(r1 / 2.0).epsilon(1e-8));
    CHECK(delta_ring_eigenvalue(1.0, r1).lambda == doctest::Approx(-0.28447568709650107908).epsilon(1e-12));
}

TEST_CASE("optimal atom shift: three cases") {
    CHECK(optimal_atom_shift(1.0, 0.3, 0.3, 2.0) == doctest::Approx(0.3));    // R* beyond the outer edge
    CHECK(optimal_atom_shift(3.0, 0.3, 0.3, 2.0) == doctest::Approx(-0.3));   // R* inside the inner edge
    CHECK(optimal_atom_shift(1.9, 0.3, 0.3, 2.0) == doctest::Approx(0.1));    // interior
}

TEST_CASE("log cutoff quotient: 2 pi / log n - mass") {
    for (double n : {536.0, 1000.0, 1e5, 1e12}) {
        CAPTURE(n);
        CHECK(std::abs(log_cutoff_quotient(n, 1.0) - (2.0 * std::numbers::pi / std::log(n) - 1.0)) < 1e-12);
    }
    CHECK(smallest_negative_cutoff(1.0) == 536.0);
    CHECK(log_cutoff_quotient(536.0, 1.0) < 0.0);
    CHECK(log_cutoff_quotient(535.0, 1.0) > 0.0);
    CHECK_THROWS_AS(log_cutoff_quotient(1.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(log_cutoff_quotient(10.0, 1.0, 20.0), std::domain_error);
}
