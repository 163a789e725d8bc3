#include "softring/transplant.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace softring;

constexpr double kPi = std::numbers::pi;

TEST_CASE("radial profile with cutoff") {
    const RadialProfile p(1.0, {0.0, 1.0, 2.0, 10.0}, {1.0, 2.0, 1.0, 0.0}, 8.0, 9.0);
    CHECK(p.value(0.5) == doctest::Approx(1.5));
    CHECK(p.derivative(0.5) == doctest::Approx(1.0));
    CHECK(p.value(9.5) == 0.0);
    CHECK(p.support() == 9.0);
    // C^1 cutoff: value and slope are continuous at both ends.
    CHECK(p.value(8.0 - 1e-9) == doctest::Approx(p.value(8.0 + 1e-9)).epsilon(1e-8));
    CHECK(std::abs(p.derivative(9.0 - 1e-9)) < 1e-6);
    const std::vector<double> bp = p.breakpoints();
    CHECK(bp.front() == 0.0);
    CHECK(bp.back() == 9.0);
    CHECK(p.without_cutoff().value(9.5) > 0.0);
}

TEST_CASE("transplantation onto the circle reproduces the radial functionals") {
    const StripMeasure m{build_circle(2.0 * kPi), delta_at(0.0, 1.0, 0.2, 0.2)};
    const TransplantBound b = upper_bound_from_transplant(m, 0.0);
    const TransplantReport& r = b.report;
    CHECK(b.bound_state);
    CHECK(r.kinetic_2d == doctest::Approx(r.kinetic_circle_formula).epsilon(1e-6));
    CHECK(r.l2_2d == doctest::Approx(r.l2_circle_formula).epsilon(1e-6));
    CHECK(r.omega_2d == doctest::Approx(r.omega_circle_formula).epsilon(1e-6));
    CHECK(r.potential_2d == doctest::Approx(r.potential_circle_formula).epsilon(1e-6));
    CHECK(b.upper_bound == doctest::Approx(b.circle_lambda).epsilon(1e-6));
    CHECK(b.smoothing_change < 1e-4);
    CHECK(r.inradius == doctest::Approx(1.0).epsilon(1e-8));
}
