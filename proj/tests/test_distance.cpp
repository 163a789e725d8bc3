#include "softring/distance.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace softring;

constexpr double kPi = std::numbers::pi;

TEST_CASE("signed distance to the unit circle") {
    const DistanceField f(build_circle(2.0 * kPi));
    CHECK(f(Point(2.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f(Point(0.0, -0.5)) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(f(Point(0.3, 0.4)) == doctest::Approx(-0.5).epsilon(1e-12));
    const DistanceQuery q = f.query(Point(0.0, 3.0));
    CHECK((q.foot - Point(0.0, 1.0)).norm() < 1e-12);
    CHECK(f.level_curvature(q) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("signed distance to an ellipse vertex") {
    const Curve c = build_ellipse(2.0, 1.0, 2.0 * kPi);
    const DistanceField f(c);
    // The rightmost point of the rescaled ellipse lies on the positive x axis.
    double xmax = 0.0;
    for (const auto& s : c.samples()) xmax = std::max(xmax, s.position.x());
    CHECK(f(Point(xmax + 0.25, 0.0)) == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("distance grid of an ellipse has unit gradient away from the medial axis") {
    auto field = std::make_shared<const DistanceField>(build_ellipse(2.0, 1.0, 2.0 * kPi));
    const double h = 2.0 * kPi / 256.0;
    const DistanceGrid g = signed_distance_grid(field, curve_box(field->curve(), 0.5), h);
    int sampled = 0;
    for (int j = 1; j + 1 < g.ny; j += 7)
        for (int i = 1; i + 1 < g.nx; i += 7) {
            // Skip the cut locus inside, which lies near the major axis.
            if (g.at(i, j) < 0.0 && std::abs(g.node(i, j).y()) < 0.2) continue;
            const double gx = (g.at(i + 1, j) - g.at(i - 1, j)) / (2.0 * h);
            const double gy = (g.at(i, j + 1) - g.at(i, j - 1)) / (2.0 * h);
            CHECK(std::hypot(gx, gy) == doctest::Approx(1.0).epsilon(0.05));
            ++sampled;
        }
    CHECK(sampled > 100);
}

TEST_CASE("level sets of the circle") {
    auto field = std::make_shared<const DistanceField>(build_circle(2.0 * kPi));
    const DistanceGrid g = signed_distance_grid(field, curve_box(field->curve(), 0.6), 2.0 * kPi / 512.0);
    CHECK(level_set_length(g, -0.5) == doctest::Approx(kPi).epsilon(1e-6));
    CHECK(level_set_length(g, 0.4) == doctest::Approx(2.0 * kPi * 1.4).epsilon(1e-6));
    const std::vector<double> batch = level_set_lengths(g, {-0.25, 0.0, 0.25});
    CHECK(batch[0] == doctest::Approx(2.0 * kPi * 0.75).epsilon(1e-6));
    CHECK(batch[1] == doctest::Approx(2.0 * kPi).epsilon(1e-6));
    CHECK(batch[2] == doctest::Approx(2.0 * kPi * 1.25).epsilon(1e-6));
    CHECK(inradius(g) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS(signed_distance_grid(field, Box{Point(-0.5, -0.5), Point(0.5, 0.5)}, 0.01),
                    std::invalid_argument);
}
