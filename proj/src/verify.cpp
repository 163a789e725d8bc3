#include "softring/verify.hpp"

#include "softring/distance.hpp"
#include "softring/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace softring {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string str(double x, int precision = 6) {
    std::ostringstream out;
    out.precision(precision);
    out << x;
    return out.str();
}

/// Adds a check and stamps its wall time.
void add(VerificationReport& rep, CheckRecord check, const Stopwatch& clock) {
    check.seconds = clock.seconds();
    rep.add(std::move(check));
}

bool is_circle(const CurveSpec& spec) {
    if (spec.kind == "circle") return true;
    if (spec.kind == "ellipse") return spec.a == spec.b;
    if (spec.kind == "fourier")
        return std::all_of(spec.coefficients.begin(), spec.coefficients.end(),
                           [](const auto& kv) { return kv.second == 0.0; });
    return false;
}

/// Runs `body` at the scenario resolution and once more at doubled resolution on failure.
VerificationReport with_rerun(const Scenario& s, const std::function<VerificationReport(double)>& body) {
    const double factor = resolution_factor(s.resolution);
    VerificationReport first = body(factor);
    if (first.passed() || !s.solver.rerun_on_failure) return first;
    VerificationReport second = body(0.5 * factor);
    second.rerun = true;
    nlohmann::json failed = nlohmann::json::array();
    for (const auto& c : first.checks)
        if (!c.passed) failed.push_back(to_json(c));
    second.details["first_attempt_failures"] = failed;
    second.notes.push_back("failed at resolution factor " + str(factor) + "; repeated at " + str(0.5 * factor));
    return second;
}

struct FittedCurve {
    Curve curve;
    TransversalMeasure measure;
    std::string name;
    bool circle = false;
};

FittedCurve fit(const Scenario& s, const CurveSpec& spec, VerificationReport& rep) {
    Curve curve = spec.build();
    std::string note;
    TransversalMeasure tr = fit_measure(s.measure, curve, s.clamp_offsets, &note);
    const std::string text = spec.name() + ": offsets clamped to the certified range (" + note + ")";
    if (!note.empty() && std::find(rep.notes.begin(), rep.notes.end(), text) == rep.notes.end())
        rep.notes.push_back(text);
    return {std::move(curve), std::move(tr), spec.name(), is_circle(spec)};
}

nlohmann::json estimate_json(const Estimate& e) {
    return {{"lambda", e.value},           {"lambda_coarse", e.coarse},
            {"lambda_coarser", e.coarser},  {"observed_order", e.observed_order}, {"error_estimate", e.error},
            {"bound_state", e.bound_state}, {"source", e.source}, {"unknowns", e.unknowns}};
}

}  // namespace

double Discretization::h(const Curve& curve) const {
    const double base = solver && solver->h > 0.0 ? solver->h : curve.length() / 256.0;
    return base * factor;
}

double Discretization::grid_h(const Curve& curve) const {
    const double base = solver && solver->grid_h > 0.0 ? solver->grid_h : curve.length() / 1024.0;
    return base * factor;
}

Discretization discretization(const Scenario& scenario, double factor) {
    Discretization d;
    d.factor = factor;
    d.solver = &scenario.solver;
    d.radial_elements = std::max(64, static_cast<int>(std::lround(scenario.solver.radial_elements / factor)));
    return d;
}

double richardson_error(double fine, double coarse, double coarser, double* observed_order) {
    const double d1 = coarse - fine, d2 = coarser - coarse;
    const double q = d1 != 0.0 ? d2 / d1 : std::numeric_limits<double>::infinity();
    double divisor = 3.0;              // 2^2 - 1
    if (std::isfinite(q) && q < 4.0) divisor = std::max(q, 2.0) - 1.0;
    if (observed_order) *observed_order = std::isfinite(q) && q > 0.0 ? std::log2(q) : kNaN;
    return std::abs(d1) / divisor;
}

Estimate radial_estimate(double radius, const TransversalMeasure& transversal, double beta, int elements,
                         std::uint64_t seed) {
    RadialProblem p;
    p.radius = radius;
    p.transversal = transversal;
    p.beta = beta;
    p.elements = elements;
    p.seed = seed;
    const RadialSolution fine = lowest_radial(p);
    p.elements = std::max(64, elements / 2);
    const RadialSolution coarse = lowest_radial(p);
    p.elements = std::max(64, elements / 4);
    const RadialSolution coarser = lowest_radial(p);
    Estimate e;
    e.value = fine.lambda;
    e.coarse = coarse.lambda;
    e.coarser = coarser.lambda;
    e.error = richardson_error(e.value, e.coarse, e.coarser, &e.observed_order);
    e.bound_state = fine.bound_state;
    e.unknowns = static_cast<std::size_t>(fine.elements);
    e.source = "radial P1, R=" + str(radius) + ", n=" + std::to_string(fine.elements) + " (Richardson with n/2, n/4), r_max=" + str(fine.r_max);
    return e;
}

Estimate fem2d_estimate(const StripMeasure& measure, double beta, double h, std::uint64_t seed, StripSolve* fine,
                        double lambda_pilot) {
    Fem2dOptions o;
    o.h = h;
    o.seed = seed;
    o.lambda_pilot = std::isfinite(lambda_pilot)
                         ? lambda_pilot
                         : circle_pilot(measure.curve.length(), measure.transversal, beta, o.pilot_elements);
    StripSolve a = solve_strip(measure, beta, o);
    o.h = 2.0 * h;
    const StripSolve b = solve_strip(measure, beta, o);
    o.h = 4.0 * h;
    const StripSolve c = solve_strip(measure, beta, o);
    Estimate e;
    e.value = a.solution.lambda;
    e.coarse = b.solution.lambda;
    e.coarser = c.solution.lambda;
    e.error = richardson_error(e.value, e.coarse, e.coarser, &e.observed_order);
    e.bound_state = a.solution.bound_state;
    e.unknowns = a.unknowns;
    e.source = "fem2d P1 on " + measure.curve.label() + ", h=" + str(h) + ", unknowns=" + std::to_string(a.unknowns) +
               " (Richardson with 2h, 4h), r_out=" + str(a.mesh.r_out);
    if (fine) *fine = std::move(a);
    return e;
}

int difference_sign_changes(const std::vector<double>& values) {
    int changes = 0, last = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double d = values[i] - values[i - 1];
        const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (sign == 0) continue;
        if (last != 0 && sign != last) ++changes;
        last = sign;
    }
    return changes;
}

std::vector<double> jump_indicators(const std::vector<double>& f) {
    if (f.size() < 3) throw std::invalid_argument("jump_indicators: need at least 3 samples");
    const std::size_t m = f.size() - 1;
    std::vector<double> d(m), j(m);
    for (std::size_t i = 0; i < m; ++i) d[i] = f[i + 1] - f[i];
    for (std::size_t i = 0; i < m; ++i) {
        if (m == 1) j[i] = 0.0;
        else if (i == 0) j[i] = std::abs(d[0] - d[1]);
        else if (i + 1 == m) j[i] = std::abs(d[m - 1] - d[m - 2]);
        else j[i] = std::abs(d[i] - 0.5 * (d[i - 1] + d[i + 1]));
    }
    return j;
}

namespace {

/// One row of the comparison with the circle of equal length (optionally with a step).
nlohmann::json compare_with_circle(const Scenario& s, const CurveSpec& spec, double beta, const Discretization& d,
                                   VerificationReport& rep) {
    const Stopwatch clock;
    const FittedCurve fc = fit(s, spec, rep);
    const double radius = fc.curve.length() / kTwoPi;
    const Estimate circle = radial_estimate(radius, fc.measure, beta, d.radial_elements, s.seed);
    const Estimate curve = fem2d_estimate(StripMeasure{fc.curve, fc.measure}, beta, d.h(fc.curve), s.seed, nullptr,
                                          circle.bound_state ? circle.value : kNaN);
    const double tol = curve.error + circle.error;
    const std::string label = " [" + fc.name + ", beta=" + str(beta) + "]";

    nlohmann::json row = {{"curve", fc.name},
                          {"beta", beta},
                          {"d_minus", fc.measure.d_minus()},
                          {"d_plus", fc.measure.d_plus()},
                          {"curve_side", estimate_json(curve)},
                          {"circle_side", estimate_json(circle)},
                          {"tol_combined", tol}};
    if (circle.bound_state) {
        add(rep, make_check("lambda1(mu) <= lambda1(mu_circ)" + label, curve.value, "<=", circle.value, tol,
                            curve.source, circle.source),
            clock);
    } else {
        add(rep, make_check("circle has no negative eigenvalue: lambda1(mu) <= 0" + label, curve.value, "<=", 0.0,
                            tol, curve.source, circle.source, "degenerate case lambda1(mu_circ) = 0"),
            clock);
    }
    if (beta > 0.0 && circle.bound_state)
        add(rep, make_check("negative circle eigenvalue implies one on the curve" + label, curve.bound_state ? 1 : 0,
                            "true", 1, 0, curve.source, circle.source),
            clock);
    if (fc.circle)
        add(rep, make_check("circle against itself" + label, curve.value, "==", circle.value, tol, curve.source,
                            circle.source),
            clock);
    row["degenerate"] = !circle.bound_state;
    row["strict"] = curve.value < circle.value - tol;
    row["gap"] = circle.value - curve.value;

    if (circle.bound_state) {
        TransplantOptions to;
        to.h_grid = d.grid_h(fc.curve);
        to.levels = s.solver.levels;
        const TransplantBound tb =
            upper_bound_from_transplant(StripMeasure{fc.curve, fc.measure}, beta, to, d.radial_elements);
        const std::string source = "transplanted Rayleigh quotient, grid h=" + str(to.h_grid);
        add(rep, make_check("transplant bound <= lambda1(mu_circ)" + label, tb.upper_bound, "<=", circle.value, tol,
                            source, circle.source),
            clock);
        add(rep, make_check("transplant bound >= lambda1(mu) (min-max)" + label, tb.upper_bound, ">=", curve.value,
                            tol, source, curve.source),
            clock);
        add(rep, make_check("profile cutoff changes the circle quotient by < 1e-4" + label, tb.smoothing_change, "<=",
                            1e-4, 0.0, "radial profile with C^1 cutoff", "gate"),
            clock);
        row["transplant_bound"] = tb.upper_bound;
        row["transplant"] = to_json(tb.report);
    }
    return row;
}

VerificationReport thm1_body(const Scenario& s, double factor, bool with_beta) {
    VerificationReport rep;
    rep.name = with_beta ? "thm1b" : "thm1";
    const Discretization d = discretization(s, factor);
    nlohmann::json rows = nlohmann::json::array();
    std::vector<double> betas = with_beta ? s.betas : std::vector<double>{0.0};
    if (with_beta) {
        betas.erase(std::remove(betas.begin(), betas.end(), 0.0), betas.end());
        if (betas.empty()) throw std::invalid_argument("verify thm1b needs at least one beta > 0");
    }
    for (const auto& spec : s.curves)
        for (double beta : betas) rows.push_back(compare_with_circle(s, spec, beta, d, rep));
    rep.details["rows"] = rows;
    rep.details["resolution_factor"] = factor;
    return rep;
}

}  // namespace

VerificationReport verify_thm1(const Scenario& s) {
    return with_rerun(s, [&](double f) { return thm1_body(s, f, false); });
}

VerificationReport verify_thm1b(const Scenario& s) {
    return with_rerun(s, [&](double f) { return thm1_body(s, f, true); });
}

namespace {

/// lambda_1(alpha delta_{Sigma_t}) at one resolution.
StripSolve delta_family_solve(const Curve& curve, double t, double alpha, double d_minus, double d_plus, double h,
                              std::uint64_t seed) {
    Fem2dOptions o;
    o.h = h;
    o.seed = seed;
    return solve_strip(StripMeasure{curve, delta_at(t, alpha, d_minus, d_plus)}, 0.0, o);
}

VerificationReport thm2_body(const Scenario& s, double factor) {
    VerificationReport rep;
    rep.name = "thm2";
    const Discretization d = discretization(s, factor);
    nlohmann::json rows = nlohmann::json::array();
    Plot plot{"lambda_t.svg", "delta family t -> lambda1(alpha delta_{Sigma_t})", "t", "lambda1", false, {}};
    for (const auto& spec : s.curves) {
        const Stopwatch clock;
        const FittedCurve fc = fit(s, spec, rep);
        const double h = d.h(fc.curve);
        const double alpha = fc.measure.mass();
        const double dm = fc.measure.d_minus(), dp = fc.measure.d_plus();
        const Estimate mu = fem2d_estimate(StripMeasure{fc.curve, fc.measure}, 0.0, h, s.seed);

        const int n = s.solver.t_points;
        const double dt = (dm + dp) / (n - 1);
        std::map<double, double> family;
        for (int i = 0; i < n; ++i) {
            const double t = i + 1 == n ? dp : -dm + dt * i;
            family[t] = delta_family_solve(fc.curve, t, alpha, dm, dp, h, s.seed).solution.lambda;
        }
        // Refine twice around the running argmin.
        double step = dt;
        for (int pass = 0; pass < 2; ++pass) {
            const auto best = std::min_element(family.begin(), family.end(),
                                               [](const auto& a, const auto& b) { return a.second < b.second; });
            step *= 0.5;
            const double t0 = best->first;
            for (double t : {t0 - step, t0 + step})
                if (t >= -dm && t <= dp && !family.count(t))
                    family[t] = delta_family_solve(fc.curve, t, alpha, dm, dp, h, s.seed).solution.lambda;
        }
        const auto best = std::min_element(family.begin(), family.end(),
                                           [](const auto& a, const auto& b) { return a.second < b.second; });
        const double t_star = best->first, family_min = best->second;
        const double coarse =
            delta_family_solve(fc.curve, t_star, alpha, dm, dp, 2.0 * h, s.seed).solution.lambda;
        const double coarser =
            delta_family_solve(fc.curve, t_star, alpha, dm, dp, 4.0 * h, s.seed).solution.lambda;
        const double min_error = richardson_error(family_min, coarse, coarser);
        const double tol = mu.error + min_error;
        const std::string family_source = "fem2d P1 delta family on " + fc.curve.label() + ", " + std::to_string(n) +
                                          "-point t-grid refined twice, h=" + str(h) + " (Richardson with 2h, 4h at t*)";
        add(rep, make_check("lambda1(mu) >= min_t lambda1(alpha delta_{Sigma_t}) [" + fc.name + "]", mu.value, ">=",
                            family_min, tol, mu.source, family_source),
            clock);

        nlohmann::json row = {{"curve", fc.name},     {"alpha", alpha},      {"mu", estimate_json(mu)},
                              {"t_star", t_star},     {"family_min", family_min}, {"family_min_error", min_error},
                              {"tol_combined", tol},  {"t_grid_cell", dt}};
        nlohmann::json ts = nlohmann::json::array(), ls = nlohmann::json::array();
        PlotSeries series{fc.name, {}, {}};
        for (const auto& [t, l] : family) {
            ts.push_back(t);
            ls.push_back(l);
            series.x.push_back(t);
            series.y.push_back(l);
        }
        row["t"] = ts;
        row["lambda"] = ls;
        plot.series.push_back(series);
        plot.series.push_back(PlotSeries{fc.name + ": lambda1(mu)", {-dm, dp}, {mu.value, mu.value}});
        if (fc.circle) {
            const double radius = fc.curve.length() / kTwoPi;
            const double r_star = optimal_ring_radius(alpha);
            const double t_formula = optimal_atom_shift(radius, dm, dp, r_star);
            row["r_star"] = r_star;
            row["t_star_formula"] = t_formula;
            add(rep, make_check("located t* matches the three-case formula [" + fc.name + "]", t_star, "==", t_formula,
                                dt, family_source, "clamp(R*(alpha) - R, -d_minus, d_plus), R* from the secular oracle"),
                clock);
            double oracle_min = 0.0;
            for (const auto& [t, l] : family) {
                (void)l;
                oracle_min = std::min(oracle_min, delta_ring_eigenvalue(alpha, radius + t).lambda);
            }
            row["family_min_oracle"] = oracle_min;
        }
        rows.push_back(row);
    }
    rep.details["rows"] = rows;
    rep.details["resolution_factor"] = factor;
    rep.plots.push_back(plot);
    return rep;
}

}  // namespace

VerificationReport verify_thm2(const Scenario& s) {
    return with_rerun(s, [&](double f) { return thm2_body(s, f); });
}

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    out.back() = hi;
    return out;
}

/// Grid bracket [R_{i-1}, R_{i+1}] around the argmin of the oracle values.
std::pair<double, double> oracle_bracket(double alpha, const std::vector<double>& radii) {
    std::size_t best = 0;
    double value = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double l = delta_ring_eigenvalue(alpha, radii[i]).lambda;
        if (i == 0 || l < value) {
            value = l;
            best = i;
        }
    }
    return {radii[best == 0 ? 0 : best - 1], radii[std::min(best + 1, radii.size() - 1)]};
}

VerificationReport rstar_body(const Scenario& s, double factor) {
    VerificationReport rep;
    rep.name = "rstar";
    const Stopwatch clock;
    const auto& rs = s.rstar;
    const double alpha = rs.alpha;
    const std::vector<double> radii = log_grid(rs.r_min, rs.r_max, rs.points);
    std::vector<double> f;
    for (double r : radii) f.push_back(delta_ring_eigenvalue(alpha, r).lambda);
    const int changes = difference_sign_changes(f);
    add(rep, make_check("f_alpha(R) has exactly one sign change of differences", changes, "==", 1, 0,
                        "secular oracle on a " + std::to_string(rs.points) + "-point log grid", "unimodality"),
        clock);

    const double r_big = 200.0 / alpha;
    const double limit = delta_ring_eigenvalue(alpha, r_big).lambda;
    add(rep, make_check("f_alpha(200 / alpha) close to -alpha^2 / 4", limit, "==", -0.25 * alpha * alpha, 1e-3,
                        "secular oracle at R=" + str(r_big), "-alpha^2/4"),
        clock);

    const double r1 = optimal_ring_radius(alpha), r2 = optimal_ring_radius(2.0 * alpha);
    add(rep, make_check("R*(2 alpha) = R*(alpha) / 2", r2, "==", 0.5 * r1, 1e-6 * r1,
                        "secular oracle minimization at 2 alpha", "secular oracle minimization at alpha / 2"),
        clock);

    const auto [lo1, hi1] = oracle_bracket(alpha, radii);
    const auto [lo2, hi2] = oracle_bracket(alpha, log_grid(rs.r_min, rs.r_max, 2 * rs.points - 1));
    const double ratio = std::log(hi2 / lo2) / std::log(hi1 / lo1);
    add(rep, make_check("grid refinement halves the R* bracket", ratio, "<=", 0.5, 1e-9,
                        "brackets on n and 2n - 1 point grids", "bisection property"),
        clock);
    add(rep, make_check("R* inside both brackets", (lo1 <= r1 && r1 <= hi1 && lo2 <= r1 && r1 <= hi2) ? 1 : 0, "true",
                        1, 0, "oracle R*", "grid brackets"),
        clock);

    // Independent route: radial finite elements on the same grid.
    const double d = 0.5 * rs.r_min;
    const int elements = std::max(64, static_cast<int>(std::lround(rs.elements / factor)));
    const RadiusSweep sweep = radius_sweep(delta_at(0.0, alpha, d, d), 0.0, radii, elements);
    const double cell = std::log(radii[1] / radii[0]);
    add(rep, make_check("radial finite-element argmin agrees with the oracle R* within one grid cell",
                        std::log(sweep.r_star), "==", std::log(r1), cell,
                        "radial P1 sweep, n=" + std::to_string(elements) + " (log R)", "secular oracle (log R)"),
        clock);

    nlohmann::json rows = nlohmann::json::array();
    std::vector<double> fem;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        rows.push_back({{"R", radii[i]}, {"oracle", f[i]}, {"fem", sweep.rows[i].lambda}});
        fem.push_back(sweep.rows[i].lambda);
    }
    rep.details = {{"alpha", alpha},       {"r_star", r1},         {"r_star_2alpha", r2},
                   {"r_star_fem", sweep.r_star}, {"limit_value", limit}, {"sign_changes", changes},
                   {"bracket", {lo1, hi1}}, {"bracket_refined", {lo2, hi2}}, {"rows", rows},
                   {"resolution_factor", factor}};
    rep.plots.push_back(Plot{"f_alpha.svg", "f_alpha(R) = lambda1(alpha delta_C), |C| = 2 pi R", "R", "lambda1", true,
                             {PlotSeries{"secular oracle", radii, f}, PlotSeries{"radial P1", radii, fem}}});
    return rep;
}

}  // namespace

VerificationReport verify_rstar(const Scenario& s) {
    return with_rerun(s, [&](double f) { return rstar_body(s, f); });
}

namespace {

VerificationReport continuity_body(const Scenario& s, double factor) {
    VerificationReport rep;
    rep.name = "continuity";
    const Discretization d = discretization(s, factor);
    nlohmann::json rows = nlohmann::json::array();
    Plot plot{"continuity.svg", "t -> lambda1(alpha delta_{Sigma_t})", "t", "lambda1", false, {}};
    for (const auto& spec : s.curves) {
        const Stopwatch clock;
        const FittedCurve fc = fit(s, spec, rep);
        const double h = d.h(fc.curve);
        const double alpha = fc.measure.mass();
        const double dm = fc.measure.d_minus(), dp = fc.measure.d_plus();
        const int n = s.solver.t_points;
        nlohmann::json row = {{"curve", fc.name}, {"alpha", alpha}, {"t_points", n}};
        if (n < 3) {
            row["status"] = "insufficient resolution: at least 3 t-values are needed for a jump test or a fit";
            rep.notes.push_back(fc.name + ": insufficient resolution, no Hölder fit");
            rows.push_back(row);
            continue;
        }
        std::vector<double> ts(static_cast<std::size_t>(n)), fine(ts.size()), coarse(ts.size()), err(ts.size());
        const double dt = (dm + dp) / (n - 1);
        StripSolve middle;
        for (int i = 0; i < n; ++i) {
            const std::size_t k = static_cast<std::size_t>(i);
            ts[k] = i + 1 == n ? dp : -dm + dt * i;
            StripSolve a = delta_family_solve(fc.curve, ts[k], alpha, dm, dp, h, s.seed);
            fine[k] = a.solution.lambda;
            coarse[k] = delta_family_solve(fc.curve, ts[k], alpha, dm, dp, 2.0 * h, s.seed).solution.lambda;
            err[k] = std::abs(fine[k] - coarse[k]) / 3.0;
            if (i == n / 2) middle = std::move(a);
        }
        const std::vector<double> jumps = jump_indicators(fine);
        int flagged = 0;
        double worst = 0.0;
        nlohmann::json flags = nlohmann::json::array();
        for (std::size_t i = 0; i < jumps.size(); ++i) {
            const double allowed = 5.0 * (err[i] + err[i + 1]);
            worst = std::max(worst, jumps[i] / std::max(allowed, 1e-300));
            if (jumps[i] > allowed) {
                ++flagged;
                flags.push_back({{"t_left", ts[i]}, {"t_right", ts[i + 1]}, {"jump", jumps[i]}, {"allowed", allowed}});
            }
        }
        add(rep, make_check("no adjacent jump above 5x the local error estimate [" + fc.name + "]", flagged, "==", 0, 0,
                            "fem2d delta family, h=" + str(h) + " and 2h on " + std::to_string(n) + " t-values",
                            "Richardson estimates"),
            clock);
        double c_lambda = 0.0;
        for (std::size_t i = 0; i + 1 < ts.size(); ++i)
            c_lambda = std::max(c_lambda, std::abs(fine[i + 1] - fine[i]) / std::sqrt(ts[i + 1] - ts[i]));

        // Trace of the ground state of the middle delta problem on parallel curves.
        const PointLocator locator(middle.mesh);
        const int m = 4 * (n - 1) + 1;
        std::vector<double> tau(static_cast<std::size_t>(m)), trace(tau.size());
        for (int i = 0; i < m; ++i) {
            tau[static_cast<std::size_t>(i)] = i + 1 == m ? dp : -dm + (dm + dp) * i / (m - 1);
            trace[static_cast<std::size_t>(i)] = trace_norm(middle.mesh, locator, middle.solution.field,
                                                            parallel_curve(fc.curve, tau[static_cast<std::size_t>(i)]));
        }
        double c_trace = 0.0;
        for (std::size_t i = 0; i + 1 < tau.size(); ++i)
            c_trace = std::max(c_trace, std::abs(trace[i + 1] - trace[i]) / std::sqrt(tau[i + 1] - tau[i]));

        if (fc.circle) {
            const double radius = fc.curve.length() / kTwoPi;
            double worst_ratio = 0.0;
            std::size_t at = 0;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                const double extrapolated = fine[i] - (coarse[i] - fine[i]) / 3.0;
                const double oracle = delta_ring_eigenvalue(alpha, radius + ts[i]).lambda;
                const double ratio = std::abs(extrapolated - oracle) / std::max(err[i], 1e-300);
                if (ratio >= worst_ratio) {
                    worst_ratio = ratio;
                    at = i;
                }
            }
            const double extrapolated = fine[at] - (coarse[at] - fine[at]) / 3.0;
            add(rep, make_check("circle: extrapolated lambda1(t) equals the secular value within the estimate [" +
                                    fc.name + "]",
                                extrapolated, "==", delta_ring_eigenvalue(alpha, radius + ts[at]).lambda, err[at],
                                "fem2d delta family, Richardson extrapolation at t=" + str(ts[at]), "secular oracle"),
                clock);
        }
        row["t"] = ts;
        row["lambda"] = fine;
        row["lambda_coarse"] = coarse;
        row["error_estimate"] = err;
        row["jump_indicator"] = jumps;
        row["flagged"] = flags;
        row["worst_jump_ratio"] = worst;
        row["holder_constant_lambda"] = c_lambda;
        row["trace_t"] = tau;
        row["trace_norm"] = trace;
        row["trace_field_atom"] = ts[static_cast<std::size_t>(n / 2)];
        row["holder_constant_trace"] = c_trace;
        rows.push_back(row);
        plot.series.push_back(PlotSeries{fc.name, ts, fine});
    }
    rep.details["rows"] = rows;
    rep.details["resolution_factor"] = factor;
    rep.plots.push_back(plot);
    return rep;
}

}  // namespace

VerificationReport verify_continuity(const Scenario& s) {
    return with_rerun(s, [&](double f) { return continuity_body(s, f); });
}

namespace {

VerificationReport savo_body(const Scenario& s, double factor) {
    VerificationReport rep;
    rep.name = "savo";
    const Discretization d = discretization(s, factor);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& spec : s.curves) {
        const Stopwatch clock;
        const Curve curve = spec.build();
        const std::string name = spec.name();
        const double L = curve.length();
        const double h = d.grid_h(curve);
        const double reach = s.savo.outer_reach;
        auto field = std::make_shared<const DistanceField>(curve);
        const DistanceGrid grid = signed_distance_grid(field, curve_box(curve, reach + 2.0 * h), h);
        const double r_plus = inradius(grid);
        const int n = s.savo.levels;
        std::vector<double> t_in(static_cast<std::size_t>(n)), t_out(t_in.size()), levels;
        for (int k = 0; k < n; ++k) {
            t_in[static_cast<std::size_t>(k)] = r_plus * (k + 0.5) / n;
            t_out[static_cast<std::size_t>(k)] = reach * (k + 0.5) / n;
        }
        for (double t : t_in) levels.push_back(-t);
        for (double t : t_out) levels.push_back(t);
        const std::vector<double> lengths = level_set_lengths(grid, levels);
        const double allowance = s.savo.constant * h;
        double excess_in = -std::numeric_limits<double>::infinity(), excess_out = excess_in, deviation = 0.0;
        std::vector<double> l_in, l_out, b_in, b_out;
        for (int k = 0; k < n; ++k) {
            const std::size_t i = static_cast<std::size_t>(k);
            l_in.push_back(lengths[i]);
            l_out.push_back(lengths[i + static_cast<std::size_t>(n)]);
            b_in.push_back(L - kTwoPi * t_in[i]);
            b_out.push_back(L + kTwoPi * t_out[i]);
            excess_in = std::max(excess_in, l_in.back() - b_in.back());
            excess_out = std::max(excess_out, l_out.back() - b_out.back());
            deviation = std::max({deviation, std::abs(l_in.back() - b_in.back()), std::abs(l_out.back() - b_out.back())});
        }
        const std::string source = "marching squares on the exact distance, h_grid=" + str(h);
        add(rep, make_check("L_+(t) <= L - 2 pi t + C h_grid [" + name + "]", excess_in, "<=", 0.0, allowance, source,
                            "bound with C=" + str(s.savo.constant)),
            clock);
        add(rep, make_check("L_-(t) <= L + 2 pi t + C h_grid [" + name + "]", excess_out, "<=", 0.0, allowance,
                            source, "bound with C=" + str(s.savo.constant)),
            clock);
        add(rep, make_check("inradius R_+ <= L / (2 pi) + h_grid [" + name + "]", r_plus, "<=", L / kTwoPi, h,
                            "grid maximum refined on the exact distance", "isoperimetric bound"),
            clock);
        if (is_circle(spec))
            add(rep, make_check("circle: equality in both bounds [" + name + "]", deviation, "==", 0.0, allowance,
                                source, "L -+ 2 pi t"),
                clock);
        rows.push_back({{"curve", name},     {"h_grid", h},        {"inradius", r_plus},   {"t_inner", t_in},
                        {"L_plus", l_in},    {"t_outer", t_out},   {"L_minus", l_out},     {"max_excess_inner", excess_in},
                        {"max_excess_outer", excess_out}});
        rep.plots.push_back(Plot{"savo_" + std::to_string(rows.size()) + ".svg", "level-set lengths, " + name, "t",
                                 "length", false,
                                 {PlotSeries{"L_+(t)", t_in, l_in}, PlotSeries{"L - 2 pi t", t_in, b_in},
                                  PlotSeries{"L_-(t)", t_out, l_out}, PlotSeries{"L + 2 pi t", t_out, b_out}}});
    }
    rep.details["rows"] = rows;
    rep.details["resolution_factor"] = factor;
    return rep;
}

}  // namespace

VerificationReport verify_savo(const Scenario& s) {
    return with_rerun(s, [&](double f) { return savo_body(s, f); });
}

namespace {

VerificationReport transplant_body(const Scenario& s, double factor) {
    VerificationReport rep;
    rep.name = "transplant";
    const Discretization d = discretization(s, factor);
    const double beta = s.betas.front();
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& spec : s.curves) {
        const Stopwatch clock;
        const FittedCurve fc = fit(s, spec, rep);
        const StripMeasure measure{fc.curve, fc.measure};
        TransplantOptions to;
        to.h_grid = d.grid_h(fc.curve);
        to.levels = s.solver.levels;
        const TransplantBound tb = upper_bound_from_transplant(measure, beta, to, d.radial_elements);
        const std::string label = " [" + fc.name + "]";
        const std::string left = "co-area sums with measured level sets, h_grid=" + str(to.h_grid);
        const std::string right = "circle formula with the radial profile";
        nlohmann::json row = {{"curve", fc.name}, {"beta", beta}, {"circle_lambda", tb.circle_lambda}};
        if (!tb.bound_state) {
            rep.notes.push_back(fc.name + ": the circle has no negative eigenvalue; nothing to transplant");
            rows.push_back(row);
            continue;
        }
        const auto& r = tb.report;
        const double rel = fc.circle ? 1e-6 : 1e-3;
        const std::string rel_text = fc.circle ? "1e-6" : "1e-3";
        if (fc.circle) {
            add(rep, make_check("circle: kinetic terms equal" + label, r.kinetic_2d, "==", r.kinetic_circle_formula,
                                rel * std::abs(r.kinetic_circle_formula), left, right),
                clock);
            add(rep, make_check("circle: L2 terms equal" + label, r.l2_2d, "==", r.l2_circle_formula,
                                rel * std::abs(r.l2_circle_formula), left, right),
                clock);
            add(rep, make_check("circle: Omega terms equal" + label, r.omega_2d, "==", r.omega_circle_formula,
                                rel * std::abs(r.omega_circle_formula), left, right),
                clock);
        } else {
            add(rep, make_check("kinetic_2d <= kinetic_circle + " + rel_text + " |kinetic|" + label, r.kinetic_2d, "<=",
                                r.kinetic_circle_formula, rel * std::abs(r.kinetic_circle_formula), left, right),
                clock);
            add(rep, make_check("l2_2d <= l2_circle + " + rel_text + " |l2|" + label, r.l2_2d, "<=", r.l2_circle_formula,
                                rel * std::abs(r.l2_circle_formula), left, right),
                clock);
            add(rep, make_check("omega_2d <= omega_circle + " + rel_text + " |omega|" + label, r.omega_2d, "<=",
                                r.omega_circle_formula, rel * std::abs(r.omega_circle_formula), left, right),
                clock);
        }
        add(rep, make_check("potential terms equal" + label, r.potential_2d, "==", r.potential_circle_formula,
                            rel * std::abs(r.potential_circle_formula), "measure integral of the transplanted field",
                            right),
            clock);
        add(rep, make_check("profile cutoff changes the circle quotient by < 1e-4" + label, tb.smoothing_change, "<=",
                            1e-4, 0.0, "radial profile with C^1 cutoff", "gate"),
            clock);

        const double radius = fc.curve.length() / kTwoPi;
        const Estimate circle = radial_estimate(radius, fc.measure, beta, d.radial_elements, s.seed);
        const Estimate fem = fem2d_estimate(measure, beta, d.h(fc.curve), s.seed, nullptr,
                                            circle.bound_state ? circle.value : kNaN);
        const double tol = circle.error + fem.error;
        add(rep, make_check("transplant bound >= lambda1(fem2d) (min-max)" + label, tb.upper_bound, ">=", fem.value,
                            tol, "transplanted Rayleigh quotient", fem.source),
            clock);
        add(rep, make_check("transplant bound <= lambda1(circle)" + label, tb.upper_bound, "<=", circle.value, tol,
                            "transplanted Rayleigh quotient", circle.source),
            clock);
        row["report"] = to_json(r);
        row["smoothing_change"] = tb.smoothing_change;
        row["upper_bound"] = tb.upper_bound;
        row["fem2d"] = estimate_json(fem);
        row["circle"] = estimate_json(circle);
        row["gap_to_circle"] = circle.value - tb.upper_bound;
        rows.push_back(row);
    }
    rep.details["rows"] = rows;
    rep.details["resolution_factor"] = factor;
    return rep;
}

}  // namespace

VerificationReport verify_transplant(const Scenario& s) {
    return with_rerun(s, [&](double f) { return transplant_body(s, f); });
}

namespace {

VerificationReport negativity_body(const Scenario& s, double factor) {
    VerificationReport rep;
    rep.name = "negativity";
    const Discretization d = discretization(s, factor);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& spec : s.curves) {
        const Stopwatch clock;
        const FittedCurve fc = fit(s, spec, rep);
        Fem2dOptions o;
        o.h = d.h(fc.curve);
        o.seed = s.seed;
        const StripSolve sol = solve_strip(StripMeasure{fc.curve, fc.measure}, 0.0, o);
        RadialProblem p;
        p.radius = fc.curve.length() / kTwoPi;
        p.transversal = fc.measure;
        p.elements = d.radial_elements;
        p.seed = s.seed;
        const RadialSolution radial = lowest_radial(p);
        const std::string label = " [" + fc.name + "]";
        add(rep, make_check("lambda1(mu) < -tol_zero on the curve" + label, sol.solution.raw_lambda, "<=",
                            -kZeroTolerance, 0.0,
                            "fem2d P1, h=" + str(o.h) + ", unknowns=" + std::to_string(sol.unknowns), "tol_zero"),
            clock);
        add(rep, make_check("lambda1(mu_circ) < -tol_zero" + label, radial.raw_lambda, "<=", -kZeroTolerance, 0.0,
                            "radial P1, n=" + std::to_string(radial.elements), "tol_zero"),
            clock);
        rows.push_back({{"curve", fc.name}, {"lambda_2d", sol.solution.lambda}, {"lambda_circle", radial.lambda}});
    }

    // The logarithmic cutoff mechanism at the formula level.
    const Stopwatch clock;
    const double mass = s.measure.build().mass();
    const double n0 = smallest_negative_cutoff(mass);
    std::vector<double> ns;
    for (int k = 0; k < 64; ++k) ns.push_back(n0 + k);
    for (double n = 2.0 * n0; n < 1e15; n *= 7.3) ns.push_back(std::round(n));
    double worst_formula = 0.0, largest = -std::numeric_limits<double>::infinity();
    nlohmann::json cut = nlohmann::json::array();
    for (double n : ns) {
        const double q = log_cutoff_quotient(n, mass);
        const double formula = kTwoPi / std::log(n) - mass;
        worst_formula = std::max(worst_formula, std::abs(q - formula));
        largest = std::max(largest, q);
        cut.push_back({{"n", n}, {"quotient", q}, {"formula", formula}});
    }
    add(rep, make_check("h_mu[phi_n] < 0 for every sampled n >= n0", largest, "<=", 0.0, 0.0,
                        "log_cutoff_quotient (quadrature of the gradient energy)", "negativity"),
        clock);
    add(rep, make_check("h_mu[phi_n] matches 2 pi / log n - mass", worst_formula, "<=", 1e-12, 0.0,
                        "log_cutoff_quotient", "closed form"),
        clock);
    if (n0 > 2.0)
        add(rep, make_check("n0 - 1 does not give a negative value", kTwoPi / std::log(n0 - 1.0) - mass, ">=", 0.0, 0.0,
                            "closed form at n0 - 1", "minimality of n0"),
            clock);
    rep.details = {{"rows", rows}, {"mass", mass}, {"smallest_n", n0}, {"log_smallest_n", std::log(n0)},
                   {"cutoffs", cut}, {"resolution_factor", factor}};
    return rep;
}

}  // namespace

VerificationReport verify_negativity(const Scenario& s) {
    return with_rerun(s, [&](double f) { return negativity_body(s, f); });
}

VerificationReport run_verification(const std::string& which, const Scenario& s) {
    if (which == "thm1") return verify_thm1(s);
    if (which == "thm1b") return verify_thm1b(s);
    if (which == "thm2") return verify_thm2(s);
    if (which == "rstar") return verify_rstar(s);
    if (which == "continuity") return verify_continuity(s);
    if (which == "savo") return verify_savo(s);
    if (which == "transplant") return verify_transplant(s);
    if (which == "negativity") return verify_negativity(s);
    throw std::invalid_argument("unknown verification '" + which + "'");
}

VerificationReport solve_radial_report(const Scenario& s) {
    VerificationReport rep;
    rep.name = "solve-radial";
    const Discretization d = discretization(s, resolution_factor(s.resolution));
    const CurveSpec& spec = s.curves.front();
    const double L = spec.length;
    const Curve circle = build_circle(L);
    std::string note;
    const TransversalMeasure tr = fit_measure(s.measure, circle, s.clamp_offsets, &note);
    if (!note.empty()) rep.notes.push_back("offsets clamped (" + note + ")");
    nlohmann::json rows = nlohmann::json::array();
    for (double beta : s.betas) {
        const Stopwatch clock;
        RadialProblem p;
        p.radius = L / kTwoPi;
        p.transversal = tr;
        p.beta = beta;
        p.elements = d.radial_elements;
        p.seed = s.seed;
        const RadialSolution sol = lowest_radial(p);
        const std::string source = "radial P1, R=" + str(p.radius) + ", n=" + std::to_string(sol.elements);
        add(rep, make_check("eigenvalue is finite [beta=" + str(beta) + "]", std::isfinite(sol.lambda) ? 1 : 0, "true",
                            1, 0, source, "sanity"),
            clock);
        if (beta == 0.0)
            add(rep, make_check("beta = 0 gives a negative eigenvalue", sol.raw_lambda, "<=", -kZeroTolerance, 0.0,
                                source, "tol_zero"),
                clock);
        if (sol.bound_state)
            add(rep, make_check("tail mass near r_max [beta=" + str(beta) + "]", sol.tail_mass, "<=", 1e-8, 0.0, source,
                                "truncation criterion"),
                clock);
        rows.push_back({{"beta", beta},          {"lambda", sol.lambda},    {"bound_state", sol.bound_state},
                        {"residual", sol.residual}, {"r_max", sol.r_max},   {"elements", sol.elements},
                        {"tail_mass", sol.tail_mass}, {"warnings", sol.warnings}});
        if (sol.bound_state) {
            PlotSeries series{"beta=" + str(beta), {}, {}};
            const std::size_t stride = std::max<std::size_t>(1, sol.nodes.size() / 800);
            for (std::size_t i = 0; i < sol.nodes.size(); i += stride) {
                series.x.push_back(sol.nodes[i]);
                series.y.push_back(sol.profile[i]);
            }
            if (rep.plots.empty()) rep.plots.push_back(Plot{"profile.svg", "radial ground profile", "r", "psi", false, {}});
            rep.plots.front().series.push_back(series);
        }
    }
    rep.details = {{"radius", L / kTwoPi}, {"measure", tr.describe()}, {"rows", rows}};
    return rep;
}

VerificationReport solve_2d_report(const Scenario& s) {
    VerificationReport rep;
    rep.name = "solve-2d";
    const Discretization d = discretization(s, resolution_factor(s.resolution));
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& spec : s.curves)
        for (double beta : s.betas) {
            const Stopwatch clock;
            const FittedCurve fc = fit(s, spec, rep);
            Fem2dOptions o;
            o.h = d.h(fc.curve);
            o.seed = s.seed;
            const StripSolve sol = solve_strip(StripMeasure{fc.curve, fc.measure}, beta, o);
            const std::string source =
                "fem2d P1 on " + fc.name + ", h=" + str(o.h) + ", unknowns=" + std::to_string(sol.unknowns);
            const std::string label = " [" + fc.name + ", beta=" + str(beta) + "]";
            add(rep, make_check("eigenvalue is finite" + label, std::isfinite(sol.solution.lambda) ? 1 : 0, "true", 1, 0,
                                source, "sanity"),
                clock);
            if (beta == 0.0)
                add(rep, make_check("beta = 0 gives a negative eigenvalue" + label, sol.solution.raw_lambda, "<=",
                                    -kZeroTolerance, 0.0, source, "tol_zero"),
                    clock);
            rows.push_back({{"curve", fc.name},
                            {"beta", beta},
                            {"lambda", sol.solution.lambda},
                            {"bound_state", sol.solution.bound_state},
                            {"residual", sol.solution.residual},
                            {"unknowns", sol.unknowns},
                            {"nodes", sol.mesh.nodes.size()},
                            {"r_out", sol.mesh.r_out},
                            {"h", o.h},
                            {"lambda_pilot", sol.lambda_pilot},
                            {"tail_mass", sol.solution.tail_mass},
                            {"warnings", sol.solution.warnings}});
        }
    rep.details["rows"] = rows;
    return rep;
}

SweepResult run_sweep(const Scenario& s) {
    SweepResult out;
    out.report.name = "sweep";
    const Discretization d = discretization(s, resolution_factor(s.resolution));
    const auto& sw = s.sweep;
    if (sw.values.empty()) throw std::invalid_argument("sweep: no values given");
    const CurveSpec& spec = s.curves.front();
    const double beta0 = s.betas.front();
    const Stopwatch clock;

    if (sw.parameter == "radius") {
        if (sw.solver != "radial") throw std::invalid_argument("sweep: radius sweeps use the radial solver");
        const RadiusSweep rs = radius_sweep(s.measure.build(), beta0, sw.values, d.radial_elements);
        out.rows = rs.rows;
        out.report.details = {{"r_star", rs.r_star}, {"interior_minimum", rs.interior}};
    } else {
        for (double v : sw.values) {
            MeasureSpec ms = s.measure;
            double beta = beta0;
            if (sw.parameter == "beta") {
                beta = v;
            } else if (sw.parameter == "alpha") {
                const double mass = ms.build().mass();
                for (auto& a : ms.atoms) a.alpha *= v / mass;
                ms.density.w0 *= v / mass;
                for (double& w : ms.density.w) w *= v / mass;
            } else {  // t: a single atom of the full mass at offset v
                ms = MeasureSpec{{Atom{v, ms.build().mass()}}, Density{}, ms.d_minus, ms.d_plus, ms.order};
            }
            RadiusSweepRow row;
            row.alpha = ms.build().mass();
            row.beta = beta;
            row.t_atom = ms.atoms.size() == 1 ? ms.atoms.front().t : kNaN;
            if (sw.solver == "radial") {
                RadialProblem p;
                p.radius = spec.length / kTwoPi;
                p.transversal = ms.build();
                p.beta = beta;
                p.elements = d.radial_elements;
                p.seed = s.seed;
                const RadialSolution sol = lowest_radial(p);
                row.radius = p.radius;
                row.lambda = sol.lambda;
                row.residual = sol.residual;
                row.elements = sol.elements;
                row.r_max = sol.r_max;
            } else {
                const Curve curve = spec.build();
                std::string note;
                const TransversalMeasure tr = fit_measure(ms, curve, s.clamp_offsets, &note);
                Fem2dOptions o;
                o.h = d.h(curve);
                o.seed = s.seed;
                const StripSolve sol = solve_strip(StripMeasure{curve, tr}, beta, o);
                row.radius = curve.length() / kTwoPi;
                row.lambda = sol.solution.lambda;
                row.residual = sol.solution.residual;
                row.elements = static_cast<int>(sol.unknowns);
                row.r_max = sol.mesh.r_out;
            }
            out.rows.push_back(row);
        }
    }
    PlotSeries series{sw.parameter, {}, {}};
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        series.x.push_back(sw.parameter == "radius" ? out.rows[i].radius : sw.values[i]);
        series.y.push_back(out.rows[i].lambda);
    }
    for (const auto& row : out.rows)
        add(out.report, make_check("finite eigenvalue at " + sw.parameter + " sample", std::isfinite(row.lambda) ? 1 : 0,
                                   "true", 1, 0, sw.solver + " solver", "sanity"),
            clock);
    out.report.plots.push_back(
        Plot{"sweep.svg", "lambda1 against " + sw.parameter, sw.parameter, "lambda1", sw.parameter == "radius", {series}});
    out.report.details["parameter"] = sw.parameter;
    out.report.details["solver"] = sw.solver;
    return out;
}

}  // namespace softring
