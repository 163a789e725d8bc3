#pragma once

#include "softring/distance.hpp"
#include "softring/measures.hpp"
#include "softring/radial.hpp"

#include <memory>
#include <vector>

namespace softring {

/// Radial profile psi(r) = psi_fe(r) chi(r): a piecewise-linear ground state
/// times a C^1 cutoff chi that equals 1 below `cutoff_start` and 0 beyond
/// `cutoff_end`, so psi has compact support.
class RadialProfile {
public:
    RadialProfile(double radius, std::vector<double> nodes, std::vector<double> values, double cutoff_start,
                  double cutoff_end);

    /// Profile of a radial solution with the cutoff ending at 0.9 * extent
    /// (extent defaults to the solution's r_max) and starting at 0.8 * extent.
    static RadialProfile from_solution(const RadialSolution& sol, double radius, double extent = 0.0);

    double radius() const { return radius_; }
    double support() const { return cutoff_end_; }
    double value(double r) const;
    double derivative(double r) const;
    /// Element breakpoints (profile nodes plus cutoff ends) within [0, support].
    std::vector<double> breakpoints() const;
    /// Same profile without the cutoff (cutoff moved beyond the last node).
    RadialProfile without_cutoff() const;

private:
    double radius_;
    std::vector<double> nodes_, values_;
    double cutoff_start_, cutoff_end_;
};

/// Values psi(R + t(x)) at the nodes of a distance grid: psi(R - rho_+) inside,
/// psi(R + rho_-) outside. Throws std::invalid_argument when the profile
/// support reaches beyond the grid.
std::vector<double> build_transplanted(const RadialProfile& profile, const DistanceGrid& grid);

struct TransplantReport {
    double kinetic_2d = 0.0, kinetic_circle_formula = 0.0;
    double l2_2d = 0.0, l2_circle_formula = 0.0;
    double omega_2d = 0.0, omega_circle_formula = 0.0;
    double potential_2d = 0.0, potential_circle_formula = 0.0;
    double quotient_transplanted = 0.0, quotient_circle = 0.0;
    double inradius = 0.0;
    double h_grid = 0.0;
    int levels = 0;
};

struct TransplantOptions {
    double h_grid = 0.0;       // near grid spacing; 0 selects L / 1024
    int levels = 512;          // level sets per side
    std::size_t far_nodes_per_side = 1200;
};

/// Measured level-set lengths L_+(rho) and L_-(rho) on uniform level grids.
struct LevelSetTables {
    double inner_extent = 0.0;                 // measured inradius R_+
    std::vector<double> inner_rho, inner_length;
    std::vector<double> outer_rho, outer_length;
    double h_near = 0.0, h_far = 0.0;

    double inner(double rho) const;   // 0 beyond R_+
    double outer(double rho) const;
};

/// Level-set tables of the distance to `curve` up to outer distance `reach`.
LevelSetTables measure_level_sets(const std::shared_ptr<const DistanceField>& field, double reach,
                                  const TransplantOptions& options = {});

/// Co-area evaluation of the transplanted functionals next to the circle formulas.
TransplantReport transplanted_functionals(const RadialProfile& profile, const StripMeasure& measure, double beta,
                                          const LevelSetTables& tables, const DistanceField& field);

/// Convenience: radial solve on the circle of equal length, profile, tables and functionals.
struct TransplantBound {
    double circle_lambda = 0.0;
    double upper_bound = 0.0;     // transplanted Rayleigh quotient (0 without a circle bound state)
    double smoothing_change = 0.0;  // relative change of the circle quotient caused by the cutoff
    bool bound_state = false;
    TransplantReport report;
};
TransplantBound upper_bound_from_transplant(const StripMeasure& measure, double beta,
                                            const TransplantOptions& options = {}, int radial_elements = 20000);

}  // namespace softring
