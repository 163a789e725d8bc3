#pragma once

#include "softring/geometry.hpp"
#include "softring/measures.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace softring {

/// Closed curve description as written in a scenario file.
struct CurveSpec {
    std::string kind = "circle";   // circle | ellipse | fourier | points
    double length = 2.0 * 3.14159265358979323846;
    double a = 1.0, b = 1.0;       // ellipse semi-axes before rescaling
    double base_radius = 1.0;      // fourier
    std::map<int, double> coefficients;
    std::vector<Point> points;     // spline through a closed polygon
    int samples = kDefaultCurveSamples;
    std::string label;

    Curve build() const;
    std::string name() const;
};

/// Transversal measure description.
struct MeasureSpec {
    std::vector<Atom> atoms;
    Density density;
    double d_minus = 0.2, d_plus = 0.2;
    int order = 64;

    TransversalMeasure build() const;
};

enum class Resolution { low, standard, high };

Resolution parse_resolution(const std::string& text);
std::string to_string(Resolution r);
/// Mesh size multiplier: 2 for low, 1 for default, 1/2 for high.
double resolution_factor(Resolution r);

struct SolverSpec {
    double h = 0.0;               // 2D collar size; 0 selects L / 256
    int radial_elements = 20000;
    double grid_h = 0.0;          // distance grid spacing; 0 selects L / 1024
    int levels = 512;             // level sets per side for transplantation
    int t_points = 33;            // t-grid for the delta family
    bool rerun_on_failure = true;
};

struct RstarSpec {
    double alpha = 1.0;
    double r_min = 0.05, r_max = 200.0;
    int points = 60;
    int elements = 4000;          // radial finite elements per radius
};

struct SavoSpec {
    int levels = 32;
    double constant = 1.0;        // C in L -+ 2 pi t + C h_grid
    double outer_reach = 1.0;
};

struct SweepSpec {
    std::string parameter = "beta";  // beta | alpha | t | radius
    std::vector<double> values;
    std::string solver = "radial";   // radial | 2d
};

/// Parsed and validated scenario.
struct Scenario {
    std::string name = "scenario";
    std::vector<CurveSpec> curves{CurveSpec{}};
    MeasureSpec measure{{Atom{0.0, 1.0}}, Density{}, 0.2, 0.2, 64};
    std::vector<double> betas{0.0};
    bool clamp_offsets = false;     // shrink d_minus / d_plus into the certified range of each curve
    SolverSpec solver;
    RstarSpec rstar;
    SavoSpec savo;
    SweepSpec sweep;
    Resolution resolution = Resolution::standard;
    std::uint64_t seed = 0x5eed5eedULL;

    /// Throws std::invalid_argument with a list of every violated rule.
    void validate() const;
};

/// Reads a TOML scenario; unknown keys are rejected.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& toml_text, const std::string& source = "<string>");

/// Measure fitted to a curve: with `clamp` set, offsets exceeding 0.9 of the
/// certified radii are reduced to that value (atoms must remain inside).
/// `note` receives a description of any adjustment.
TransversalMeasure fit_measure(const MeasureSpec& spec, const Curve& curve, bool clamp, std::string* note = nullptr);

}  // namespace softring
