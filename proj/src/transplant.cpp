#include "softring/transplant.hpp"

#include "softring/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace softring {

RadialProfile::RadialProfile(double radius, std::vector<double> nodes, std::vector<double> values,
                             double cutoff_start, double cutoff_end)
    : radius_(radius), nodes_(std::move(nodes)), values_(std::move(values)), cutoff_start_(cutoff_start),
      cutoff_end_(cutoff_end) {
    if (!(radius > 0.0)) throw std::invalid_argument("RadialProfile: radius must be positive");
    if (nodes_.size() < 2 || nodes_.size() != values_.size())
        throw std::invalid_argument("RadialProfile: need matching node and value samples");
    if (nodes_.front() != 0.0) throw std::invalid_argument("RadialProfile: nodes must start at 0");
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (!(nodes_[i] > nodes_[i - 1])) throw std::invalid_argument("RadialProfile: nodes must increase");
    if (!(0.0 < cutoff_start_ && cutoff_start_ < cutoff_end_))
        throw std::invalid_argument("RadialProfile: need 0 < cutoff_start < cutoff_end");
    cutoff_end_ = std::min(cutoff_end_, nodes_.back());
    cutoff_start_ = std::min(cutoff_start_, cutoff_end_);
}

RadialProfile RadialProfile::from_solution(const RadialSolution& sol, double radius, double extent) {
    if (!sol.bound_state) throw std::invalid_argument("RadialProfile: solution has no bound state");
    if (extent <= 0.0) extent = sol.r_max;
    return RadialProfile(radius, sol.nodes, sol.profile, 0.8 * extent, 0.9 * extent);
}

RadialProfile RadialProfile::without_cutoff() const {
    const double end = nodes_.back();
    RadialProfile copy = *this;
    copy.cutoff_start_ = end;
    copy.cutoff_end_ = end;
    return copy;
}

namespace {

/// C^1 step: 1 below a, 0 beyond b, 1 - (3u^2 - 2u^3) in between.
double cutoff(double r, double a, double b, double* derivative) {
    if (r <= a || b <= a) {
        if (derivative) *derivative = 0.0;
        return r <= a ? 1.0 : 0.0;
    }
    if (r >= b) {
        if (derivative) *derivative = 0.0;
        return 0.0;
    }
    const double u = (r - a) / (b - a);
    if (derivative) *derivative = -6.0 * u * (1.0 - u) / (b - a);
    return 1.0 - u * u * (3.0 - 2.0 * u);
}

}  // namespace

double RadialProfile::value(double r) const {
    if (r < 0.0 || r >= cutoff_end_) return 0.0;
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - nodes_.begin()), nodes_.size() - 1) - 1;
    const double u = (r - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
    const double base = (1.0 - u) * values_[i] + u * values_[i + 1];
    return base * cutoff(r, cutoff_start_, cutoff_end_, nullptr);
}

double RadialProfile::derivative(double r) const {
    if (r < 0.0 || r >= cutoff_end_) return 0.0;
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - nodes_.begin()), nodes_.size() - 1) - 1;
    const double width = nodes_[i + 1] - nodes_[i];
    const double u = (r - nodes_[i]) / width;
    const double base = (1.0 - u) * values_[i] + u * values_[i + 1];
    const double slope = (values_[i + 1] - values_[i]) / width;
    double dchi = 0.0;
    const double chi = cutoff(r, cutoff_start_, cutoff_end_, &dchi);
    return slope * chi + base * dchi;
}

std::vector<double> RadialProfile::breakpoints() const {
    std::vector<double> points;
    for (double r : nodes_)
        if (r < cutoff_end_) points.push_back(r);
    points.push_back(cutoff_start_);
    points.push_back(cutoff_end_);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

std::vector<double> build_transplanted(const RadialProfile& profile, const DistanceGrid& grid) {
    const double radius = profile.radius();
    std::vector<double> u(grid.values.size());
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = profile.value(radius + grid.values[k]);
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j) {
            if (i != 0 && j != 0 && i != grid.nx - 1 && j != grid.ny - 1) continue;
            if (u[static_cast<std::size_t>(j) * grid.nx + i] != 0.0)
                throw std::invalid_argument("build_transplanted: profile support exceeds the grid");
        }
    return u;
}

namespace {

double interpolate(const std::vector<double>& x, const std::vector<double>& y, double v) {
    if (x.empty() || v < x.front() || v > x.back()) return 0.0;
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    if (it == x.end()) return y.back();
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    const double u = (v - x[i]) / (x[i + 1] - x[i]);
    return (1.0 - u) * y[i] + u * y[i + 1];
}

std::vector<double> uniform_levels(double extent, int count) {
    std::vector<double> rho(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) rho[static_cast<std::size_t>(k)] = extent * k / (count - 1);
    return rho;
}

}  // namespace

double LevelSetTables::inner(double rho) const { return interpolate(inner_rho, inner_length, rho); }
double LevelSetTables::outer(double rho) const { return interpolate(outer_rho, outer_length, rho); }

LevelSetTables measure_level_sets(const std::shared_ptr<const DistanceField>& field, double reach,
                                  const TransplantOptions& options) {
    if (!field) throw std::invalid_argument("measure_level_sets: null distance field");
    if (!(reach > 0.0)) throw std::invalid_argument("measure_level_sets: reach must be positive");
    if (options.levels < 2) throw std::invalid_argument("measure_level_sets: need at least 2 levels");
    const Curve& curve = field->curve();
    LevelSetTables tables;
    tables.h_near = options.h_grid > 0.0 ? options.h_grid : curve.length() / 1024.0;

    // Near grid: the inside and a collar of moderate width outside.
    const double collar = std::min(reach, std::max(0.5, 0.1 * curve.length()));
    const DistanceGrid near = signed_distance_grid(field, curve_box(curve, collar + 2.0 * tables.h_near),
                                                   tables.h_near);
    tables.inner_extent = inradius(near);
    tables.inner_rho = uniform_levels(tables.inner_extent, options.levels);
    tables.outer_rho = uniform_levels(reach, options.levels);

    std::vector<double> inner_levels(tables.inner_rho.size());
    for (std::size_t k = 0; k < inner_levels.size(); ++k) inner_levels[k] = -tables.inner_rho[k];
    tables.inner_length = level_set_lengths(near, inner_levels);
    tables.inner_length.back() = 0.0;  // the set {rho_+ = R_+} has no length

    // Level sets close to extinction span only a few cells; measure them again
    // on a fine window around the top of rho_+.
    const double top = tables.inner_extent - 8.0 * tables.h_near;
    if (top > 0.0) {
        Box window{Point::Constant(std::numeric_limits<double>::infinity()),
                   Point::Constant(-std::numeric_limits<double>::infinity())};
        for (int j = 0; j < near.ny; ++j)
            for (int i = 0; i < near.nx; ++i)
                if (-near.at(i, j) >= top - 2.0 * tables.h_near) {
                    window.lo = window.lo.cwiseMin(near.node(i, j));
                    window.hi = window.hi.cwiseMax(near.node(i, j));
                }
        window.lo.array() -= 2.0 * tables.h_near;
        window.hi.array() += 2.0 * tables.h_near;
        const double side = (window.hi - window.lo).maxCoeff();
        const double h_fine = std::max(side / 512.0, tables.h_near / 32.0);
        const DistanceGrid fine = signed_distance_grid(field, window, h_fine, true);
        std::vector<std::size_t> index;
        std::vector<double> fine_levels;
        for (std::size_t k = 0; k + 1 < inner_levels.size(); ++k)
            if (tables.inner_rho[k] > tables.inner_extent - 6.0 * tables.h_near) {
                index.push_back(k);
                fine_levels.push_back(inner_levels[k]);
            }
        const std::vector<double> fine_lengths = level_set_lengths(fine, fine_levels);
        for (std::size_t m = 0; m < index.size(); ++m) tables.inner_length[index[m]] = fine_lengths[m];
    }

    std::vector<double> near_levels, far_levels;
    for (double rho : tables.outer_rho)
        (rho <= collar ? near_levels : far_levels).push_back(rho);
    tables.outer_length = level_set_lengths(near, near_levels);
    if (!far_levels.empty()) {
        const Box box = curve_box(curve, reach + 1.0);
        const double side = std::max(box.hi.x() - box.lo.x(), box.hi.y() - box.lo.y());
        tables.h_far = std::max(tables.h_near, side / static_cast<double>(options.far_nodes_per_side));
        const DistanceGrid far = signed_distance_grid(field, curve_box(curve, reach + 2.0 * tables.h_far),
                                                      tables.h_far);
        const std::vector<double> far_lengths = level_set_lengths(far, far_levels);
        tables.outer_length.insert(tables.outer_length.end(), far_lengths.begin(), far_lengths.end());
    } else {
        tables.h_far = tables.h_near;
    }
    return tables;
}

namespace {

/// Sum over [a, b] split at the given breakpoints, 4-point Gauss per piece.
template <class F>
double integrate_pieces(const std::vector<double>& breakpoints, double a, double b, F&& f) {
    static const QuadratureRule rule = gauss_legendre(4, 0.0, 1.0);
    if (!(b > a)) return 0.0;
    std::vector<double> cuts{a};
    for (double x : breakpoints)
        if (x > a && x < b) cuts.push_back(x);
    cuts.push_back(b);
    double sum = 0.0;
    for (std::size_t e = 0; e + 1 < cuts.size(); ++e) {
        const double lo = cuts[e], width = cuts[e + 1] - cuts[e];
        double piece = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) piece += rule.weights[q] * f(lo + width * rule.nodes[q]);
        sum += width * piece;
    }
    return sum;
}

std::vector<double> merged_breakpoints(const RadialProfile& profile, const LevelSetTables& tables) {
    const double radius = profile.radius();
    std::vector<double> points = profile.breakpoints();
    for (double rho : tables.inner_rho) points.push_back(radius - rho);
    for (double rho : tables.outer_rho) points.push_back(radius + rho);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

}  // namespace

TransplantReport transplanted_functionals(const RadialProfile& profile, const StripMeasure& measure, double beta,
                                          const LevelSetTables& tables, const DistanceField& field) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double radius = profile.radius();
    const double support = profile.support();
    const double d_minus = measure.transversal.d_minus();
    if (support - radius > tables.outer_rho.back() + 1e-12)
        throw std::invalid_argument("transplanted_functionals: profile support exceeds the level-set tables");

    const std::vector<double> points = merged_breakpoints(profile, tables);
    auto dpsi2 = [&](double r) { const double d = profile.derivative(r); return d * d; };
    auto psi2 = [&](double r) { const double v = profile.value(r); return v * v; };

    TransplantReport rep;
    rep.inradius = tables.inner_extent;
    rep.h_grid = tables.h_near;
    rep.levels = static_cast<int>(tables.inner_rho.size());

    // Circle formulas.
    rep.kinetic_circle_formula = two_pi * integrate_pieces(points, 0.0, support, [&](double r) { return dpsi2(r) * r; });
    rep.l2_circle_formula = two_pi * integrate_pieces(points, 0.0, support, [&](double r) { return psi2(r) * r; });
    rep.omega_circle_formula =
        two_pi * integrate_pieces(points, 0.0, radius - d_minus, [&](double r) { return psi2(r) * r; });
    rep.potential_circle_formula =
        two_pi * measure.transversal.integrate([&](double t) { return psi2(radius + t) * (radius + t); });

    // Co-area sums with the measured level-set lengths, in r = R -+ rho.
    const double inner_lo = std::max(0.0, radius - tables.inner_extent);
    auto inner_length = [&](double r) { return tables.inner(radius - r); };
    auto outer_length = [&](double r) { return tables.outer(r - radius); };
    rep.kinetic_2d = integrate_pieces(points, inner_lo, radius, [&](double r) { return dpsi2(r) * inner_length(r); }) +
                     integrate_pieces(points, radius, support, [&](double r) { return dpsi2(r) * outer_length(r); });
    rep.l2_2d = integrate_pieces(points, inner_lo, radius, [&](double r) { return psi2(r) * inner_length(r); }) +
                integrate_pieces(points, radius, support, [&](double r) { return psi2(r) * outer_length(r); });
    rep.omega_2d =
        integrate_pieces(points, inner_lo, radius - d_minus, [&](double r) { return psi2(r) * inner_length(r); });
    rep.potential_2d = measure_integral(measure, [&](const Point& x) { return psi2(radius + field(x)); });

    rep.quotient_circle =
        (rep.kinetic_circle_formula + beta * rep.omega_circle_formula - rep.potential_circle_formula) /
        rep.l2_circle_formula;
    rep.quotient_transplanted = (rep.kinetic_2d + beta * rep.omega_2d - rep.potential_2d) / rep.l2_2d;
    return rep;
}

TransplantBound upper_bound_from_transplant(const StripMeasure& measure, double beta,
                                            const TransplantOptions& options, int radial_elements) {
    const double radius = measure.curve.length() / (2.0 * std::numbers::pi);
    RadialProblem problem;
    problem.radius = radius;
    problem.transversal = measure.transversal;
    problem.beta = beta;
    problem.elements = radial_elements;
    const RadialSolution sol = lowest_radial(problem);

    TransplantBound out;
    out.circle_lambda = sol.lambda;
    out.bound_state = sol.bound_state;
    if (!sol.bound_state) return out;  // no profile to transplant; lambda_1^beta(mu_o) = 0 bounds nothing further

    const RadialProfile profile = RadialProfile::from_solution(sol, radius);
    auto field = std::make_shared<const DistanceField>(measure.curve);
    const LevelSetTables tables = measure_level_sets(field, profile.support() - radius, options);
    out.report = transplanted_functionals(profile, measure, beta, tables, *field);
    out.upper_bound = out.report.quotient_transplanted;

    const RadialProfile raw = profile.without_cutoff();
    auto raw_quotient = [&] {
        const double two_pi = 2.0 * std::numbers::pi;
        const std::vector<double> points = raw.breakpoints();
        const double end = raw.support();
        const double kin = two_pi * integrate_pieces(points, 0.0, end, [&](double r) {
            const double d = raw.derivative(r);
            return d * d * r;
        });
        const double l2 = two_pi * integrate_pieces(points, 0.0, end, [&](double r) {
            const double v = raw.value(r);
            return v * v * r;
        });
        const double omega = two_pi * integrate_pieces(points, 0.0, radius - measure.transversal.d_minus(), [&](double r) {
            const double v = raw.value(r);
            return v * v * r;
        });
        const double pot = two_pi * measure.transversal.integrate([&](double t) {
            const double v = raw.value(radius + t);
            return v * v * (radius + t);
        });
        return (kin + beta * omega - pot) / l2;
    }();
    out.smoothing_change = std::abs(out.report.quotient_circle - raw_quotient) / std::abs(raw_quotient);
    return out;
}

}  // namespace softring
