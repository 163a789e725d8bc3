#include "softring/report.hpp"
#include "softring/verify.hpp"

#include <doctest.h>

#include <cmath>

using namespace softring;

TEST_CASE("richardson error estimate") {
    // Exact order 2: the estimate is |d| / 3 and matches the true error.
    const double exact = -1.0;
    auto value = [&](double h) { return exact + 0.7 * h * h; };
    double order = 0.0;
    const double e = richardson_error(value(0.1), value(0.2), value(0.4), &order);
    CHECK(order == doctest::Approx(2.0));
    CHECK(e == doctest::Approx(0.7 * 0.01).epsilon(1e-12));
    // Lower observed order: the estimate still covers the true error.
    auto slow = [&](double h) { return exact + 0.7 * std::pow(h, 1.8); };
    const double e_slow = richardson_error(slow(0.1), slow(0.2), slow(0.4), &order);
    CHECK(order == doctest::Approx(1.8));
    CHECK(e_slow >= std::abs(slow(0.1) - exact) * (1.0 - 1e-12));
    // Higher observed order keeps the order-2 divisor.
    auto fast = [&](double h) { return exact + 0.7 * std::pow(h, 3.0); };
    CHECK(richardson_error(fast(0.1), fast(0.2), fast(0.4)) == doctest::Approx(std::abs(fast(0.2) - fast(0.1)) / 3.0));
}

TEST_CASE("discrete difference sign changes") {
    CHECK(difference_sign_changes({3, 2, 1, 2, 3}) == 1);
    CHECK(difference_sign_changes({1, 2, 3}) == 0);
    CHECK(difference_sign_changes({1, 2, 1, 2}) == 2);
    CHECK(difference_sign_changes({3, 2, 2, 3}) == 1);
}

TEST_CASE("jump indicators") {
    std::vector<double> smooth;
    for (int i = 0; i < 10; ++i) smooth.push_back(0.1 * i * i);
    const std::vector<double> js = jump_indicators(smooth);
    // Linear differences cancel in the interior; the one-sided ends see the curvature.
    for (std::size_t i = 1; i + 1 < js.size(); ++i) CHECK(std::abs(js[i]) < 1e-12);
    CHECK(js.front() == doctest::Approx(0.2));
    CHECK(js.back() == doctest::Approx(0.2));
    std::vector<double> step{0, 0, 0, 1, 1, 1};
    const std::vector<double> j = jump_indicators(step);
    CHECK(j[2] == doctest::Approx(1.0));
    CHECK(j[0] == doctest::Approx(0.0));
    CHECK_THROWS(jump_indicators({1.0, 2.0}));
}

TEST_CASE("check records") {
    CHECK(make_check("a", 1.0, "<=", 0.9, 0.2, "x", "y").passed);
    CHECK_FALSE(make_check("a", 1.0, "<=", 0.9, 0.05, "x", "y").passed);
    CHECK(make_check("a", 1.0, ">=", 1.1, 0.2, "x", "y").passed);
    CHECK(make_check("a", 1.0, "==", 1.0 + 1e-9, 1e-8, "x", "y").passed);
    CHECK_FALSE(make_check("a", std::nan(""), "<=", 1.0, 1.0, "x", "y").passed);
    CHECK_THROWS(make_check("a", 1.0, "<", 1.0, 0.0, "x", "y"));
    VerificationReport r;
    r.add(make_check("a", 1.0, "true", 0.0, 0.0, "x", "y"));
    CHECK(r.passed());
    r.add(make_check("b", 0.0, "true", 0.0, 0.0, "x", "y"));
    CHECK_FALSE(r.passed());
}
