#pragma once

#include "softring/eigensolver.hpp"
#include "softring/measures.hpp"
#include "softring/mesh.hpp"

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace softring {

/// Stiffness/mass pair on the interior nodes (truncation circle eliminated).
struct Assembled2d {
    SparseSymmetricPair pair;
    std::vector<int> dof_of_node;   // -1 on the truncation circle
    std::vector<int> node_of_dof;
};

/// P1 discretization of ∫ |grad u|^2 - ∫ |u|^2 d mu + beta ∫_Omega |u|^2.
/// Atoms act as line terms along the fitted chains with the exact measure
/// (1 + kappa t) ds; the density is integrated in parallel coordinates over
/// the strip triangles. Throws std::invalid_argument when an atom has no chain.
Assembled2d assemble_2d(const Mesh& mesh, const StripMeasure& measure, double beta);

struct Fem2dSolution {
    double lambda = 0.0;           // 0 when no negative eigenvalue exists
    double raw_lambda = 0.0;
    bool bound_state = false;
    std::vector<double> field;     // nodal values, M-normalized, positive mean
    double residual = 0.0;
    double tail_mass = 0.0;        // share of ||u||^2 near the truncation circle
    double shift = 0.0;
    int iterations = 0;
    std::vector<std::string> warnings;
};

/// Lowest eigenpair. `lambda_hint` (< 0) places the shift close to the
/// expected eigenvalue; the shift is lowered until it is certified below the
/// spectrum. Without a hint the eigenvalue is first bracketed by inertia counts.
Fem2dSolution lowest_2d(const Assembled2d& assembled, const Mesh& mesh, double alpha, double beta,
                        double lambda_hint = std::numeric_limits<double>::quiet_NaN(),
                        std::uint64_t seed = LanczosOptions{}.seed);

/// ∫_{Sigma_t} |u|^2 dl: field sampled at the parallel-curve points with weights (1 + kappa t) ds.
/// Throws std::out_of_range when a point lies outside the mesh.
double trace_norm(const Mesh& mesh, const PointLocator& locator, const std::vector<double>& field,
                  const ParallelCurve& curve);

/// Value of a nodal field at x (NaN outside the mesh).
double evaluate_field(const Mesh& mesh, const PointLocator& locator, const std::vector<double>& field,
                      const Point& x);

struct Fem2dOptions {
    double h = 0.0;                 // 0 selects L / 256
    double r_out = 0.0;             // 0 selects max radius + d_plus + 12 / sqrt(|lambda_pilot|)
    double lambda_pilot = std::numeric_limits<double>::quiet_NaN();  // NaN: circle of equal length
    int pilot_elements = 4000;
    std::uint64_t seed = LanczosOptions{}.seed;
};

/// Everything needed downstream of one 2D solve.
struct StripSolve {
    Mesh mesh;
    Fem2dSolution solution;
    double lambda_pilot = 0.0;
    std::size_t unknowns = 0;
};

/// Pilot, mesh, assembly and eigen solve for one strip problem.
StripSolve solve_strip(const StripMeasure& measure, double beta, const Fem2dOptions& options = {});

/// Lowest eigenvalue of the circle with the same length and transversal measure.
double circle_pilot(double length, const TransversalMeasure& transversal, double beta, int elements = 4000);

/// Nodal field as CSV (x, y, u).
void export_field_csv(const Mesh& mesh, const std::vector<double>& field, const std::filesystem::path& path);

}  // namespace softring
