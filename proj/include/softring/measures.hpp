#pragma once

#include "softring/geometry.hpp"

#include <functional>
#include <string>
#include <vector>

namespace softring {

/// Dirac part alpha * delta_t of a transversal measure.
struct Atom {
    double t = 0.0;
    double alpha = 0.0;
};

/// Absolutely continuous part w(t) dt on [-d_minus, d_plus].
struct Density {
    enum class Kind { none, uniform, table };
    Kind kind = Kind::none;
    double w0 = 0.0;             // uniform value
    std::vector<double> t, w;    // table nodes (increasing) and values, linear in between

    double operator()(double t) const;
};

/// Finite nonnegative measure on I = [-d_minus, d_plus]: atoms plus a density.
///
/// The density is integrated with a fixed Gauss–Legendre rule on I; atoms are
/// kept exact. Mass and first moment are cached on construction.
class TransversalMeasure {
public:
    TransversalMeasure(std::vector<Atom> atoms, Density density, double d_minus, double d_plus,
                       int density_order = 64);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const Density& density() const { return density_; }
    bool has_density() const { return density_.kind != Density::Kind::none; }
    double d_minus() const { return d_minus_; }
    double d_plus() const { return d_plus_; }

    double mass() const { return atom_mass_ + density_mass_; }
    double atom_mass() const { return atom_mass_; }
    double density_mass() const { return density_mass_; }
    double first_moment() const { return first_moment_; }

    /// Density quadrature on I: nodes t_q and weights w_q * w(t_q).
    const std::vector<double>& density_nodes() const { return nodes_; }
    const std::vector<double>& density_weights() const { return weights_; }

    /// ∫ g dmu_perp (atoms exactly, density by the stored rule).
    double integrate(const std::function<double(double)>& g) const;

    /// Copy with every weight multiplied by `factor` > 0.
    TransversalMeasure scaled(double factor) const;

    std::string describe() const;

private:
    std::vector<Atom> atoms_;
    Density density_;
    double d_minus_, d_plus_;
    int order_;
    std::vector<double> nodes_, weights_;
    double atom_mass_ = 0.0, density_mass_ = 0.0, first_moment_ = 0.0;
};

/// Single atom alpha at t.
TransversalMeasure delta_at(double t, double alpha, double d_minus, double d_plus);

/// Constant density w0 on I.
TransversalMeasure uniform_density(double w0, double d_minus, double d_plus);

/// Strip measure d mu = (1 + kappa(s) t) ds d mu_perp(t) around a curve.
struct StripMeasure {
    Curve curve;
    TransversalMeasure transversal;

    /// Closed form L alpha + 2 pi m_1 from the total curvature identity.
    double total_mass() const;
};

/// ∫ f d mu, periodic trapezoid in s over the curve samples and the transversal
/// rule in t.
double measure_integral(const StripMeasure& measure, const std::function<double(const Point&)>& f);

}  // namespace softring
