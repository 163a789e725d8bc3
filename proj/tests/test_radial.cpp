#include "softring/radial.hpp"

#include "softring/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace softring;

TEST_CASE("radial solver: single atoms against the secular equation") {
    for (double t : {-0.2, 0.0, 0.2}) {
        RadialProblem p;
        p.radius = 1.0;
        p.transversal = delta_at(t, 1.0, 0.2, 0.2);
        const RadialSolution s = lowest_radial(p);
        const double exact = delta_ring_eigenvalue(1.0, 1.0 + t).lambda;
        CAPTURE(t);
        CHECK(s.bound_state);
        CHECK(std::abs(s.lambda - exact) <= 1e-5 * std::abs(exact));
        CHECK(s.lambda >= exact);  // conforming discretization
        CHECK(s.tail_mass < 1e-8);
    }
}

TEST_CASE("radial solver: uniform density against the Bessel matching solution") {
    // Exact value from J0/Y0 in the strip matched to I0 inside and K0 outside.
    RadialProblem p;
    p.transversal = uniform_density(1.0 / 0.6, 0.3, 0.3);
    const RadialSolution s = lowest_radial(p);
    CHECK(s.lambda == doctest::Approx(-0.18494387891575151406).epsilon(1e-6));
}

TEST_CASE("radial solver: step potential lifts the ground state to zero") {
    RadialProblem p;
    p.transversal = delta_at(0.0, 0.2, 0.2, 0.2);
    p.beta = 1000.0;
    const RadialSolution s = lowest_radial(p);
    CHECK_FALSE(s.bound_state);
    CHECK(s.lambda == 0.0);

    p.beta = 0.5;
    p.transversal = delta_at(0.0, 1.0, 0.2, 0.2);
    const RadialSolution lifted = lowest_radial(p);
    p.beta = 0.0;
    CHECK(lifted.lambda > lowest_radial(p).lambda);
}

TEST_CASE("radial solver: profile and convergence order") {
    RadialProblem p;
    p.elements = 4000;
    const RadialSolution a = lowest_radial(p);
    p.elements = 8000;
    const RadialSolution b = lowest_radial(p);
    const double exact = delta_ring_eigenvalue(1.0, 1.0).lambda;
    const double order = std::log2((a.lambda - exact) / (b.lambda - exact));
    CHECK(order == doctest::Approx(2.0).epsilon(0.1));
    CHECK(b.profile_at(0.0) > 0.0);
    CHECK(b.profile_at(b.r_max) == 0.0);
    CHECK(b.profile_at(2.0 * b.r_max) == 0.0);
}

TEST_CASE("radial problem validation") {
    RadialProblem p;
    p.radius = 0.1;
    p.transversal = delta_at(0.0, 1.0, 0.2, 0.2);  // inner edge below r = 0
    CHECK_THROWS(p.validate());
    RadialProblem q;
    q.elements = 3;
    CHECK_THROWS(q.validate());
}
