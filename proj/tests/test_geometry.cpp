#include "softring/geometry.hpp"
#include "softring/measures.hpp"

#include <boost/math/special_functions/ellint_2.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace softring;

constexpr double kPi = std::numbers::pi;

TEST_CASE("circle of length 2 pi") {
    const Curve c = build_circle(2.0 * kPi);
    CHECK(c.length() == doctest::Approx(2.0 * kPi));
    CHECK(c.enclosed_area() == doctest::Approx(kPi).epsilon(1e-10));
    CHECK(c.total_curvature() == doctest::Approx(2.0 * kPi).epsilon(1e-12));
    CHECK(c.min_curvature() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(c.max_curvature() == doctest::Approx(1.0).epsilon(1e-10));
    // Certified radius is conservative: below the focal distance 1, but close.
    CHECK(c.d_minus_max() <= 1.0);
    CHECK(c.d_minus_max() >= 0.98);
    CHECK(std::isinf(c.d_plus_max()));
    CHECK(c.point_at(0.3).norm() == doctest::Approx(1.0).epsilon(1e-12));
    // Outward normal.
    CHECK(c.normal_at(1.0).dot(c.point_at(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Frenet consistency: d tau / ds = -kappa nu") {
    const Curve c = build_ellipse(2.0, 1.0, 2.0 * kPi);
    const double ds = 1e-3;
    for (double s = 0.1; s < c.length(); s += 0.37) {
        const Point fd = (c.tangent_at(s + ds) - c.tangent_at(s - ds)) / (2.0 * ds);
        const Point exact = -c.curvature_at(s) * c.normal_at(s);
        CAPTURE(s);
        CHECK((fd - exact).norm() < 1e-4 * std::max(1.0, c.max_curvature()));
    }
}

TEST_CASE("ellipse perimeter against the complete elliptic integral") {
    const double a = 2.0, b = 1.0;
    const double e = std::sqrt(1.0 - b * b / (a * a));
    CHECK(ellipse_perimeter(a, b) == doctest::Approx(4.0 * a * boost::math::ellint_2(e)).epsilon(1e-13));
    const Curve c = build_ellipse(a, b, 2.0 * kPi);
    CHECK(c.length() == doctest::Approx(2.0 * kPi).epsilon(1e-12));
    CHECK(c.total_curvature() == doctest::Approx(2.0 * kPi).epsilon(1e-10));
    // Semi-minor axis after rescaling is b * L / P; the inner radius of curvature is b^2 / a.
    const double scale = 2.0 * kPi / ellipse_perimeter(a, b);
    CHECK(c.max_curvature() == doctest::Approx(a / (b * b * scale)).epsilon(1e-6));
    CHECK(c.d_minus_max() <= b * b / a * scale + 1e-9);
}

TEST_CASE("parallel curve length L + 2 pi t") {
    for (const Curve& c : {build_circle(2.0 * kPi), build_ellipse(1.5, 1.0, 2.0 * kPi),
                           build_fourier_curve(1.0, {{3, 0.08}}, 2.0 * kPi)}) {
        for (double t : {-0.1, 0.05, 0.2}) {
            CAPTURE(c.label());
            CAPTURE(t);
            const ParallelCurve p = parallel_curve(c, t);
            CHECK(p.length == doctest::Approx(c.length() + 2.0 * kPi * t).epsilon(1e-10));
            CHECK(p.polyline_length() == doctest::Approx(p.length).epsilon(1e-5));
        }
    }
}

TEST_CASE("fourier curves: rejection of thin radius functions") {
    CHECK_THROWS_AS(build_fourier_curve(1.0, {{2, 0.9}}, 2.0 * kPi), std::invalid_argument);
    const Curve c = build_fourier_curve(1.0, {{2, 0.05}}, 2.0 * kPi);
    CHECK(c.length() == doctest::Approx(2.0 * kPi).epsilon(1e-12));
}

TEST_CASE("spline curve through circle points") {
    std::vector<Point> pts;
    for (int i = 0; i < 64; ++i) {
        const double th = -2.0 * kPi * i / 64.0;  // clockwise input
        pts.emplace_back(std::cos(th), std::sin(th));
    }
    const Curve c = curve_from_points(pts);
    CHECK(c.enclosed_area() > 0.0);
    CHECK(c.length() == doctest::Approx(2.0 * kPi).epsilon(1e-5));
    // Spline curvature has kinks at the knots, so the trapezoid sum is only second order.
    CHECK(c.total_curvature() == doctest::Approx(2.0 * kPi).epsilon(1e-5));
}

TEST_CASE("polyline self intersection") {
    const std::vector<Point> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const std::vector<Point> bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    CHECK_FALSE(polyline_self_intersects(square));
    CHECK(polyline_self_intersects(bowtie));
}

TEST_CASE("mirrored curve keeps orientation") {
    const Curve c = build_fourier_curve(1.0, {{3, 0.08}}, 2.0 * kPi);
    const Curve m = mirrored(c);
    CHECK(m.enclosed_area() == doctest::Approx(c.enclosed_area()).epsilon(1e-10));
    CHECK(m.total_curvature() == doctest::Approx(2.0 * kPi).epsilon(1e-10));
}

TEST_CASE("transversal measures") {
    const TransversalMeasure a = delta_at(0.1, 2.0, 0.2, 0.3);
    CHECK(a.mass() == doctest::Approx(2.0));
    CHECK(a.first_moment() == doctest::Approx(0.2));
    const TransversalMeasure u = uniform_density(1.0 / 0.6, 0.3, 0.3);
    CHECK(u.mass() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(u.first_moment() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(u.integrate([](double t) { return t * t; }) == doctest::Approx(0.018 / 0.6).epsilon(1e-13));
    CHECK(u.scaled(2.0).mass() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS(delta_at(0.5, 1.0, 0.2, 0.2));
}

TEST_CASE("strip measure: total mass L m0 + 2 pi m1") {
    const Curve c = build_ellipse(2.0, 1.0, 2.0 * kPi);
    Density d;
    d.kind = Density::Kind::uniform;
    d.w0 = 1.5;
    const StripMeasure m{c, TransversalMeasure({Atom{0.05, 0.7}}, d, 0.1, 0.15)};
    const double expected = c.length() * m.transversal.mass() + 2.0 * kPi * m.transversal.first_moment();
    CHECK(m.total_mass() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(measure_integral(m, [](const Point&) { return 1.0; }) == doctest::Approx(expected).epsilon(1e-10));
}
