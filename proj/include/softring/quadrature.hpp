#pragma once

#include <array>
#include <functional>
#include <vector>

namespace softring {

/// Nodes and weights of a one-dimensional quadrature rule.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss–Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Adaptive Gauss–Kronrod integration of f over [a, b] to relative tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-13);

/// Symmetric 6-point rule on the reference triangle, exact for degree 4.
/// Each entry is (barycentric l1, l2, l3, weight); weights sum to 1.
struct TrianglePoint {
    double l1, l2, l3, weight;
};
const std::array<TrianglePoint, 6>& triangle_rule_deg4();

}  // namespace softring
