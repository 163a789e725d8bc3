#pragma once

#include "softring/fem2d.hpp"
#include "softring/radial.hpp"
#include "softring/report.hpp"
#include "softring/scenario.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

namespace softring {

/// Eigenvalue at the working resolution with a Richardson error estimate
/// |lambda_h - lambda_2h| / 3 (ratio-2 refinement, order 2). A third grid
/// guards the order assumption: when it shows an observed order below 2 the
/// estimate uses the observed order instead, so it stays one-sided.
struct Estimate {
    double value = 0.0;
    double coarse = 0.0;
    double coarser = 0.0;
    double observed_order = 2.0;
    double error = 0.0;
    bool bound_state = false;
    std::string source;
    std::size_t unknowns = 0;
};

/// Error of the finest of three ratio-2 resolutions; see Estimate.
double richardson_error(double fine, double coarse, double coarser, double* observed_order = nullptr);

/// Circle of radius R: radial elements n, n / 2 and n / 4.
Estimate radial_estimate(double radius, const TransversalMeasure& transversal, double beta, int elements,
                         std::uint64_t seed);

/// Strip problem on a curve: mesh sizes h, 2h and 4h. `fine` receives the h solve.
Estimate fem2d_estimate(const StripMeasure& measure, double beta, double h, std::uint64_t seed,
                        StripSolve* fine = nullptr, double lambda_pilot = std::numeric_limits<double>::quiet_NaN());

/// Sizes derived from the scenario and a resolution factor (1 = default).
struct Discretization {
    double factor = 1.0;
    int radial_elements = 20000;
    double h(const Curve& curve) const;
    double grid_h(const Curve& curve) const;
    const SolverSpec* solver = nullptr;
};
Discretization discretization(const Scenario& scenario, double factor);

/// Property checks. Each runs at the scenario resolution and, when a check
/// fails and `rerun_on_failure` is set, once more at doubled resolution.
VerificationReport verify_thm1(const Scenario& scenario);
VerificationReport verify_thm1b(const Scenario& scenario);
VerificationReport verify_thm2(const Scenario& scenario);
VerificationReport verify_rstar(const Scenario& scenario);
VerificationReport verify_continuity(const Scenario& scenario);
VerificationReport verify_savo(const Scenario& scenario);
VerificationReport verify_transplant(const Scenario& scenario);
VerificationReport verify_negativity(const Scenario& scenario);

/// Dispatch by name: thm1, thm1b, thm2, rstar, continuity, savo, transplant, negativity.
VerificationReport run_verification(const std::string& which, const Scenario& scenario);

/// Single solves with their sanity checks; details hold the eigenvalue data.
VerificationReport solve_radial_report(const Scenario& scenario);
VerificationReport solve_2d_report(const Scenario& scenario);

/// Parameter sweep; rows use the radial CSV columns (for 2D solves n is the
/// number of unknowns and r_max the truncation radius).
struct SweepResult {
    VerificationReport report;
    std::vector<RadiusSweepRow> rows;
};
SweepResult run_sweep(const Scenario& scenario);

/// Counts sign changes of consecutive differences, ignoring exact zeros.
int difference_sign_changes(const std::vector<double>& values);

/// Local jump indicator for sampled curves: |D_i - (D_{i-1} + D_{i+1}) / 2|
/// with D_i = f_{i+1} - f_i (one-sided at the ends). Needs at least 3 samples.
std::vector<double> jump_indicators(const std::vector<double>& values);

}  // namespace softring
