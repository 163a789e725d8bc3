#include "softring/scenario.hpp"

#include <doctest.h>

#include <numbers>

using namespace softring;

TEST_CASE("scenario parsing") {
    const Scenario s = parse_scenario(R"(
name = "demo"
seed = 42
resolution = "low"
clamp_offsets = true
betas = [0.0, 0.5]

[[curves]]
kind = "ellipse"
a = 2.0
b = 1.0

[[curves]]
kind = "fourier"
coefficients = { 3 = 0.08 }

[measure]
d_minus = 0.25
d_plus = 0.25
atoms = [ { t = -0.2, alpha = 0.6 }, { t = 0.2, alpha = 0.4 } ]

[solver]
t_points = 17
)");
    CHECK(s.name == "demo");
    CHECK(s.seed == 42);
    CHECK(s.resolution == Resolution::low);
    CHECK(s.clamp_offsets);
    CHECK(s.betas == std::vector<double>{0.0, 0.5});
    REQUIRE(s.curves.size() == 2);
    CHECK(s.curves[0].name() == "ellipse 2:1");
    CHECK(s.curves[1].name() == "fourier a3=0.08");
    CHECK(s.measure.atoms.size() == 2);
    CHECK(s.measure.build().mass() == doctest::Approx(1.0));
    CHECK(s.solver.t_points == 17);
}

TEST_CASE("scenario rejects unknown keys and invalid values") {
    CHECK_THROWS_AS(parse_scenario("nmae = \"typo\"\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario("[solver]\nlevles = 3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario("betas = [-1.0]\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario("[measure]\nd_minus = -0.1\n"), std::invalid_argument);
}

TEST_CASE("resolution names") {
    CHECK(parse_resolution("default") == Resolution::standard);
    CHECK(resolution_factor(parse_resolution("high")) == 0.5);
    CHECK(resolution_factor(Resolution::low) == 2.0);
    CHECK(to_string(Resolution::standard) == "default");
    CHECK_THROWS(parse_resolution("medium"));
}

TEST_CASE("offsets clamped into the certified range") {
    CurveSpec c;
    c.kind = "ellipse";
    c.a = 3.0;
    c.b = 1.0;
    const Curve curve = c.build();
    MeasureSpec m;
    m.atoms = {Atom{0.0, 1.0}};
    std::string note;
    CHECK_THROWS(fit_measure(m, curve, false));
    const TransversalMeasure fitted = fit_measure(m, curve, true, &note);
    CHECK(fitted.d_minus() == doctest::Approx(0.9 * curve.d_minus_max()));
    CHECK(fitted.d_plus() == 0.2);
    CHECK_FALSE(note.empty());
    CHECK(note.back() != ' ');
}
