#include "softring/eigensolver.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace softring;

namespace {

/// Random sparse symmetric K (indefinite) and diagonally dominant SPD M.
SparseSymmetricPair random_pair(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Eigen::Triplet<double>> k, m;
    for (int i = 0; i < n; ++i) {
        k.emplace_back(i, i, 4.0 * u(rng));
        m.emplace_back(i, i, 3.0 + u(rng));
        for (int j : {i + 1, i + 3}) {
            if (j >= n) continue;
            const double a = u(rng), b = 0.5 * u(rng);
            k.emplace_back(i, j, a);
            k.emplace_back(j, i, a);
            m.emplace_back(i, j, b);
            m.emplace_back(j, i, b);
        }
    }
    SparseSymmetricPair p;
    p.stiffness.resize(n, n);
    p.mass.resize(n, n);
    p.stiffness.setFromTriplets(k.begin(), k.end());
    p.mass.setFromTriplets(m.begin(), m.end());
    return p;
}

SparseSymmetricPair laplacian_1d(int n) {
    // P1 on (0, pi) with Dirichlet ends: eigenvalues approach j^2.
    const double h = std::numbers::pi / (n + 1);
    std::vector<Eigen::Triplet<double>> k, m;
    for (int i = 0; i < n; ++i) {
        k.emplace_back(i, i, 2.0 / h);
        m.emplace_back(i, i, 4.0 * h / 6.0);
        if (i + 1 < n) {
            k.emplace_back(i, i + 1, -1.0 / h);
            k.emplace_back(i + 1, i, -1.0 / h);
            m.emplace_back(i, i + 1, h / 6.0);
            m.emplace_back(i + 1, i, h / 6.0);
        }
    }
    SparseSymmetricPair p;
    p.stiffness.resize(n, n);
    p.mass.resize(n, n);
    p.stiffness.setFromTriplets(k.begin(), k.end());
    p.mass.setFromTriplets(m.begin(), m.end());
    return p;
}

}  // namespace

TEST_CASE("lanczos agrees with the dense generalized solver") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 20 + 20 * trial;
        const SparseSymmetricPair p = random_pair(n, rng);
        p.validate();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dense(Eigen::MatrixXd(p.stiffness),
                                                                        Eigen::MatrixXd(p.mass));
        const EigenResult r = lowest_pairs_lowering_shift(p, 3, -1.0, 1e-10);
        for (int i = 0; i < 3; ++i) {
            CAPTURE(n);
            CAPTURE(i);
            CHECK(std::abs(r.eigenvalues[i] - dense.eigenvalues()[i]) <=
                  1e-10 * std::max(1.0, std::abs(dense.eigenvalues()[i])));
        }
        // M-orthonormal eigenvectors.
        const Eigen::MatrixXd gram = r.eigenvectors.transpose() * (p.mass * r.eigenvectors);
        CHECK((gram - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-10);
    }
}

TEST_CASE("lanczos: 1D Laplacian converges to j^2") {
    const SparseSymmetricPair p = laplacian_1d(2000);
    const EigenResult r = lowest_pairs(p, 4, -0.5, 1e-9);
    for (int j = 1; j <= 4; ++j) CHECK(r.eigenvalues[j - 1] == doctest::Approx(j * j).epsilon(1e-5));
    CHECK(rayleigh_quotient(p, r.eigenvectors.col(0)) == doctest::Approx(r.eigenvalues[0]).epsilon(1e-10));
}

TEST_CASE("lanczos: shift above the spectrum is rejected") {
    const SparseSymmetricPair p = laplacian_1d(50);
    CHECK_THROWS_AS(lowest_pairs(p, 1, 2.0), ShiftNotBelowSpectrum);
    const EigenResult r = lowest_pairs_lowering_shift(p, 1, 2.0);
    CHECK(r.shift < 1.0);
    CHECK(r.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("lanczos: deterministic for a fixed seed") {
    std::mt19937_64 rng(11);
    const SparseSymmetricPair p = random_pair(120, rng);
    const EigenResult a = lowest_pairs_lowering_shift(p, 2, -1.0, 1e-10, LanczosOptions{.seed = 3});
    const EigenResult b = lowest_pairs_lowering_shift(p, 2, -1.0, 1e-10, LanczosOptions{.seed = 3});
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("inertia counts and bracketing") {
    const SparseSymmetricPair p = laplacian_1d(400);
    CHECK(count_eigenvalues_below(p, 0.5) == 0);
    CHECK(count_eigenvalues_below(p, 4.5) == 2);
    CHECK(count_eigenvalues_below(p, 9.5) == 3);

    SparseSymmetricPair shifted = p;
    shifted.stiffness = p.stiffness - 1.25 * p.mass;  // lowest eigenvalue near -0.25
    double lo = 0.0, hi = 0.0;
    REQUIRE(bracket_lowest_eigenvalue(shifted, -1.0, -1e-3, 1e-6, lo, hi));
    const EigenResult r = lowest_pairs(shifted, 1, lo - 0.1);
    CHECK(lo <= r.eigenvalues[0]);
    CHECK(r.eigenvalues[0] <= hi);
    CHECK(hi - lo <= 2e-6 * std::abs(lo));
    CHECK_FALSE(bracket_lowest_eigenvalue(p, -1.0, -1e-3, 1e-6, lo, hi));
}

TEST_CASE("pair validation") {
    SparseSymmetricPair p = laplacian_1d(10);
    p.stiffness.coeffRef(0, 1) += 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    SparseSymmetricPair q = laplacian_1d(10);
    q.mass.resize(9, 9);
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    CHECK_THROWS_AS(rayleigh_quotient(laplacian_1d(5), Eigen::VectorXd::Zero(5)), std::invalid_argument);
}
