#pragma once

#include "softring/eigensolver.hpp"
#include "softring/measures.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace softring {

/// Radial fiber problem on L^2((0, r_max); r dr) for a circle of radius R.
///
/// The form is ∫ |psi'|^2 r dr + fiber^2 ∫ |psi|^2 / r dr - ∫ |psi(R+t)|^2 (R+t) dmu_perp(t)
/// + beta ∫_0^{R-d_minus} |psi|^2 r dr, Dirichlet at r_max.
struct RadialProblem {
    double radius = 1.0;
    TransversalMeasure transversal = delta_at(0.0, 1.0, 0.2, 0.2);
    double beta = 0.0;
    double r_max = 0.0;        // 0 selects R + d_plus + 12 / sqrt(|lambda_pilot|)
    int elements = 20000;
    int fiber = 0;             // angular momentum; only 0 carries the ground state
    double grading_length = 0.0;  // 0 selects max(d_minus + d_plus, 0.1 R, 0.05)
    std::uint64_t seed = LanczosOptions{}.seed;  // Lanczos start vector

    void validate() const;
};

/// Graded P1 mesh of [0, r_max] with nodes at every breakpoint of the measure.
std::vector<double> radial_mesh(const RadialProblem& problem);

/// P1 stiffness/mass pair with the Dirichlet node at r_max removed.
SparseSymmetricPair assemble_radial(const RadialProblem& problem, const std::vector<double>& nodes);

struct RadialSolution {
    double lambda = 0.0;           // 0 when no negative eigenvalue exists
    double raw_lambda = 0.0;       // eigenvalue of the truncated problem
    bool bound_state = false;
    std::vector<double> nodes;     // r_0 = 0 < ... < r_max
    std::vector<double> profile;   // psi at the nodes, ∫ psi^2 r dr = 1, psi(r_max) = 0, psi >= 0
    std::vector<double> excited;   // further eigenvalues when requested
    double residual = 0.0;
    double r_max = 0.0;
    int elements = 0;
    double tail_mass = 0.0;        // share of ∫ psi^2 r dr on the outer tenth of [R + d_plus, r_max]
    std::vector<std::string> warnings;

    /// Piecewise-linear interpolation of the profile (0 beyond r_max).
    double profile_at(double r) const;
};

inline constexpr double kZeroTolerance = 1e-9;

/// Lowest eigenpair(s) of the radial problem. With `count` > 1 the further
/// eigenvalues are stored in `excited`.
RadialSolution lowest_radial(const RadialProblem& problem, int count = 1);

struct RadiusSweepRow {
    double radius = 0.0, alpha = 0.0, beta = 0.0, t_atom = 0.0;
    double lambda = 0.0, residual = 0.0;
    int elements = 0;
    double r_max = 0.0;
};

struct RadiusSweep {
    std::vector<RadiusSweepRow> rows;
    std::size_t argmin = 0;
    double r_star = 0.0;   // parabolic refinement of the grid argmin in log R
    bool interior = false;
};

/// f(R) = lambda_1 over a grid of radii for a fixed transversal measure, solved
/// with the radial finite elements.
RadiusSweep radius_sweep(const TransversalMeasure& shape, double beta, const std::vector<double>& radii,
                         int elements = 4000);

/// Grid argmin with a parabola through the three neighbouring points in log R.
double refine_argmin_log(const std::vector<double>& radii, const std::vector<double>& values,
                         std::size_t argmin);

void write_sweep_csv(const RadiusSweep& sweep, const std::filesystem::path& path);

}  // namespace softring
