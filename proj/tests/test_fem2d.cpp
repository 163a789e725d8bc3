#include "softring/fem2d.hpp"

#include "softring/oracles.hpp"
#include "softring/radial.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace softring;

constexpr double kPi = std::numbers::pi;

TEST_CASE("2D solve on the circle matches the radial fiber") {
    const StripMeasure m{build_circle(2.0 * kPi), delta_at(0.0, 1.0, 0.2, 0.2)};
    Fem2dOptions o;
    o.h = 2.0 * kPi / 64.0;
    const StripSolve s = solve_strip(m, 0.0, o);
    const double exact = delta_ring_eigenvalue(1.0, 1.0).lambda;
    CHECK(s.solution.bound_state);
    CHECK(s.solution.lambda >= exact);
    CHECK(std::abs(s.solution.lambda - exact) <= 1e-2 * std::abs(exact));
    CHECK(s.solution.tail_mass < 1e-6);
    CHECK(s.mesh.chain_at(0.0) != nullptr);

    // Trace on the atom circle of the normalized ground state equals the
    // radial value 2 pi psi(1)^2 up to the mesh error.
    RadialProblem rp;
    const RadialSolution r = lowest_radial(rp);
    const PointLocator loc(s.mesh);
    const double trace = trace_norm(s.mesh, loc, s.solution.field, parallel_curve(m.curve, 0.0));
    const double psi = r.profile_at(1.0) / std::sqrt(2.0 * kPi);
    CHECK(trace == doctest::Approx(2.0 * kPi * psi * psi).epsilon(2e-2));
}

TEST_CASE("mesh regions and fitted chains") {
    const Curve c = build_ellipse(2.0, 1.0, 2.0 * kPi);
    MeshOptions o;
    o.h = 2.0 * kPi / 64.0;
    o.r_out = 8.0;
    o.decay_length = 2.0;
    const Mesh m = generate_mesh(c, 0.1, 0.1, {0.05}, o);
    CHECK(m.chain_at(-0.1) != nullptr);
    CHECK(m.chain_at(0.05) != nullptr);
    CHECK(m.chain_at(0.1) != nullptr);
    // Chain at t = -d_minus is the parallel curve: length L - 2 pi d_minus.
    const FittedChain* inner = m.chain_at(-0.1);
    double length = 0.0;
    for (std::size_t i = 0; i < inner->nodes.size(); ++i)
        length += (m.nodes[inner->nodes[(i + 1) % inner->nodes.size()]] - m.nodes[inner->nodes[i]]).norm();
    CHECK(length == doctest::Approx(2.0 * kPi - 2.0 * kPi * 0.1).epsilon(1e-3));
    // Strip area L (d_- + d_+) + pi (d_+^2 - d_-^2), up to the chord error of the rings.
    CHECK(m.region_area(Region::strip) == doctest::Approx(2.0 * kPi * 0.2).epsilon(5e-3));
    CHECK(m.min_triangle_area() > 0.0);
    CHECK_THROWS_AS(generate_mesh(c, 0.5, 0.1, {}, o), std::invalid_argument);
}
