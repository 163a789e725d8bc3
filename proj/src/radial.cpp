#include "softring/radial.hpp"

#include "softring/oracles.hpp"
#include "softring/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace softring {
namespace {

constexpr double kMaxTruncation = 1e5;

using Triplets = std::vector<Eigen::Triplet<double>>;

double default_grading(const RadialProblem& p) {
    if (p.grading_length > 0.0) return p.grading_length;
    const auto& m = p.transversal;
    return std::max({m.d_minus() + m.d_plus(), 0.1 * p.radius, 0.05});
}

double effective_r_max(const RadialProblem& p);

}  // namespace

void RadialProblem::validate() const {
    if (!(radius > 0.0)) throw std::invalid_argument("radial problem: R must be positive");
    if (!(radius - transversal.d_minus() > 0.0))
        throw std::invalid_argument("radial problem: R - d_minus must be positive");
    if (!(beta >= 0.0)) throw std::invalid_argument("radial problem: beta must be nonnegative");
    if (elements < 64) throw std::invalid_argument("radial problem: at least 64 elements required");
    if (r_max != 0.0 && !(r_max > radius + transversal.d_plus()))
        throw std::invalid_argument("radial problem: r_max must exceed R + d_plus");
    if (fiber < 0) throw std::invalid_argument("radial problem: fiber index must be nonnegative");
}

std::vector<double> radial_mesh(const RadialProblem& p) {
    p.validate();
    const double r_max = p.r_max;
    if (!(r_max > 0.0)) throw std::invalid_argument("radial_mesh: r_max must be resolved");
    const double lo = p.radius - p.transversal.d_minus();
    const double hi = p.radius + p.transversal.d_plus();
    const double ell = default_grading(p);

    // Element density 1 / (h_f (1 + dist / ell)); h_f fixed by the element count.
    const double weight = ell * std::log1p(lo / ell) + (hi - lo) + ell * std::log1p((r_max - hi) / ell);
    const double hf = weight / p.elements;
    auto cumulative = [&](double r) {
        if (r <= lo) return (ell * std::log1p(lo / ell) - ell * std::log1p((lo - r) / ell)) / hf;
        if (r <= hi) return (ell * std::log1p(lo / ell) + (r - lo)) / hf;
        return (ell * std::log1p(lo / ell) + (hi - lo) + ell * std::log1p((r - hi) / ell)) / hf;
    };
    auto inverse = [&](double g) {
        const double g_lo = cumulative(lo), g_hi = cumulative(hi);
        if (g <= g_lo) return lo - ell * std::expm1((g_lo - g) * hf / ell);
        if (g <= g_hi) return lo + (g - g_lo) * hf;
        return hi + ell * std::expm1((g - g_hi) * hf / ell);
    };

    std::vector<double> breaks = {0.0, lo, hi, r_max};
    for (const auto& a : p.transversal.atoms()) breaks.push_back(p.radius + a.t);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-14 * (1.0 + std::abs(a)); }),
                 breaks.end());

    std::vector<double> nodes = {0.0};
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double ga = cumulative(breaks[k]), gb = cumulative(breaks[k + 1]);
        const int m = std::max(1, static_cast<int>(std::lround(gb - ga)));
        for (int e = 1; e < m; ++e) nodes.push_back(inverse(ga + (gb - ga) * e / m));
        nodes.push_back(breaks[k + 1]);
    }
    return nodes;
}

SparseSymmetricPair assemble_radial(const RadialProblem& p, const std::vector<double>& nodes) {
    p.validate();
    const int n_nodes = static_cast<int>(nodes.size());
    const bool pinned_origin = p.fiber > 0;
    // Unknowns: all nodes except r_max (Dirichlet), and r = 0 for fibers >= 1.
    const int offset = pinned_origin ? 1 : 0;
    const int n = n_nodes - 1 - offset;
    auto dof = [&](int node) { return node - offset; };
    auto active = [&](int node) { return node >= offset && node < n_nodes - 1; };

    Triplets kt, mt;
    const double lo = p.radius - p.transversal.d_minus();
    const double hi = p.radius + p.transversal.d_plus();
    const QuadratureRule ref = gauss_legendre(6, 0.0, 1.0);
    const auto& density = p.transversal.density();
    const double n2 = static_cast<double>(p.fiber) * p.fiber;

    for (int e = 0; e + 1 < n_nodes; ++e) {
        const double a = nodes[e], b = nodes[e + 1], h = b - a;
        double ke[2][2] = {{(a + b) / (2 * h), -(a + b) / (2 * h)}, {-(a + b) / (2 * h), (a + b) / (2 * h)}};
        const double me[2][2] = {{h * (3 * a + b) / 12, h * (a + b) / 12}, {h * (a + b) / 12, h * (a + 3 * b) / 12}};
        const double mid = 0.5 * (a + b);
        if (p.beta > 0.0 && mid < lo)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) ke[i][j] += p.beta * me[i][j];
        if (p.transversal.has_density() && mid > lo && mid < hi) {
            for (std::size_t q = 0; q < ref.size(); ++q) {
                const double u = ref.nodes[q], r = a + h * u;
                const double w = ref.weights[q] * h * density(r - p.radius) * r;
                const double phi[2] = {1.0 - u, u};
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) ke[i][j] -= w * phi[i] * phi[j];
            }
        }
        if (n2 > 0.0) {
            for (std::size_t q = 0; q < ref.size(); ++q) {
                const double u = ref.nodes[q], r = a + h * u;
                const double phi[2] = {1.0 - u, u};
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) ke[i][j] += n2 * ref.weights[q] * h * phi[i] * phi[j] / r;
            }
        }
        for (int i = 0; i < 2; ++i) {
            if (!active(e + i)) continue;
            for (int j = 0; j < 2; ++j) {
                if (!active(e + j)) continue;
                kt.emplace_back(dof(e + i), dof(e + j), ke[i][j]);
                mt.emplace_back(dof(e + i), dof(e + j), me[i][j]);
            }
        }
    }
    for (const auto& atom : p.transversal.atoms()) {
        const double r = p.radius + atom.t;
        auto it = std::lower_bound(nodes.begin(), nodes.end(), r - 1e-12 * (1.0 + r));
        if (it == nodes.end() || std::abs(*it - r) > 1e-10 * (1.0 + r))
            throw std::logic_error("assemble_radial: atom is not a mesh node");
        const int node = static_cast<int>(it - nodes.begin());
        if (active(node)) kt.emplace_back(dof(node), dof(node), -atom.alpha * r);
    }
    SparseSymmetricPair pair;
    pair.stiffness.resize(n, n);
    pair.mass.resize(n, n);
    pair.stiffness.setFromTriplets(kt.begin(), kt.end());
    pair.mass.setFromTriplets(mt.begin(), mt.end());
    return pair;
}

double RadialSolution::profile_at(double r) const {
    if (r <= 0.0) return profile.front();
    if (r >= nodes.back()) return 0.0;
    auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
    const std::size_t k = static_cast<std::size_t>(it - nodes.begin());
    const double u = (r - nodes[k - 1]) / (nodes[k] - nodes[k - 1]);
    return (1.0 - u) * profile[k - 1] + u * profile[k];
}

namespace {

double default_shift(const RadialProblem& p) {
    const double alpha = p.transversal.mass();
    return -4.0 * alpha * alpha - p.beta - 10.0;
}

RadialSolution solve_fixed(const RadialProblem& p, int count) {
    RadialSolution sol;
    sol.nodes = radial_mesh(p);
    sol.r_max = p.r_max;
    sol.elements = static_cast<int>(sol.nodes.size()) - 1;
    sol.profile.assign(sol.nodes.size(), 0.0);
    const SparseSymmetricPair pair = assemble_radial(p, sol.nodes);

    // Locate lambda_1 by inertia counts, then shift-invert just below it.
    double lo = 0.0, hi = 0.0;
    if (!bracket_lowest_eigenvalue(pair, default_shift(p), -kZeroTolerance, 1e-3, lo, hi)) {
        sol.bound_state = false;
        sol.lambda = 0.0;
        sol.raw_lambda = 0.0;
        return sol;
    }
    const double shift = lo - 0.01 * std::abs(lo);
    EigenResult res;
    try {
        res = lowest_pairs(pair, count, shift, 1e-8, LanczosOptions{.seed = p.seed});
    } catch (const EigenConvergenceError&) {
        res = lowest_pairs_lowering_shift(pair, count, default_shift(p), 1e-9, LanczosOptions{.seed = p.seed});
    }
    sol.raw_lambda = res.eigenvalues.front();
    sol.residual = res.residuals.front();
    sol.bound_state = sol.raw_lambda < -kZeroTolerance;
    sol.lambda = sol.bound_state ? sol.raw_lambda : 0.0;
    for (int k = 1; k < count; ++k) sol.excited.push_back(res.eigenvalues[k]);

    const int offset = p.fiber > 0 ? 1 : 0;
    for (Eigen::Index i = 0; i < res.eigenvectors.rows(); ++i)
        sol.profile[static_cast<std::size_t>(i + offset)] = res.eigenvectors(i, 0);
    double sum = 0.0;
    for (double v : sol.profile) sum += v;
    if (sum < 0.0)
        for (double& v : sol.profile) v = -v;

    // Share of the L^2(r dr) mass on the outer tenth of [R + d_plus, r_max].
    const double cut = p.r_max - 0.1 * (p.r_max - p.radius - p.transversal.d_plus());
    double total = 0.0, tail = 0.0;
    for (std::size_t e = 0; e + 1 < sol.nodes.size(); ++e) {
        const double a = sol.nodes[e], b = sol.nodes[e + 1], h = b - a;
        const double u = sol.profile[e], v = sol.profile[e + 1];
        const double m = h * ((3 * a + b) * u * u + 2 * (a + b) * u * v + (a + 3 * b) * v * v) / 12;
        total += m;
        if (a >= cut) tail += m;
    }
    sol.tail_mass = total > 0.0 ? tail / total : 0.0;
    if (sol.tail_mass > 1e-8) sol.warnings.push_back("eigenfunction mass near r_max exceeds 1e-8");
    return sol;
}

double effective_r_max(const RadialProblem& p) {
    if (p.r_max > 0.0) return p.r_max;
    const double base = p.radius + p.transversal.d_plus();
    RadialProblem pilot = p;
    pilot.elements = std::min(p.elements, 4000);
    pilot.r_max = base + 40.0;
    for (int it = 0; it < 8; ++it) {
        const RadialSolution sol = solve_fixed(pilot, 1);
        if (!sol.bound_state) {
            if (pilot.r_max >= base + kMaxTruncation) return base + kMaxTruncation;
            pilot.r_max = base + kMaxTruncation;
            continue;
        }
        const double needed = base + 12.0 / std::sqrt(-sol.raw_lambda);
        if (needed <= pilot.r_max || pilot.r_max >= base + kMaxTruncation)
            return std::min(needed, base + kMaxTruncation);
        pilot.r_max = std::min(1.5 * needed, base + kMaxTruncation);
    }
    return pilot.r_max;
}

}  // namespace

RadialSolution lowest_radial(const RadialProblem& problem, int count) {
    problem.validate();
    if (count < 1) throw std::invalid_argument("lowest_radial: count must be >= 1");
    RadialProblem p = problem;
    p.r_max = effective_r_max(problem);
    return solve_fixed(p, count);
}

double refine_argmin_log(const std::vector<double>& radii, const std::vector<double>& values,
                         std::size_t k) {
    if (k == 0 || k + 1 >= radii.size()) return radii[k];
    const double x0 = std::log(radii[k - 1]), x1 = std::log(radii[k]), x2 = std::log(radii[k + 1]);
    const double f0 = values[k - 1], f1 = values[k], f2 = values[k + 1];
    const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    const double a = (x2 * (f1 - f0) + x1 * (f0 - f2) + x0 * (f2 - f1)) / denom;
    const double b = (x2 * x2 * (f0 - f1) + x1 * x1 * (f2 - f0) + x0 * x0 * (f1 - f2)) / denom;
    if (!(a > 0.0)) return radii[k];
    return std::exp(std::clamp(-b / (2 * a), x0, x2));
}

RadiusSweep radius_sweep(const TransversalMeasure& shape, double beta, const std::vector<double>& radii,
                         int elements) {
    if (radii.size() < 3) throw std::invalid_argument("radius_sweep: at least 3 radii required");
    RadiusSweep sweep;
    std::vector<double> values;
    for (double r : radii) {
        RadialProblem p;
        p.radius = r;
        p.transversal = shape;
        p.beta = beta;
        p.elements = elements;
        const RadialSolution sol = lowest_radial(p);
        RadiusSweepRow row;
        row.radius = r;
        row.alpha = shape.mass();
        row.beta = beta;
        row.t_atom = shape.atoms().empty() ? 0.0 : shape.atoms().front().t;
        row.lambda = sol.lambda;
        row.residual = sol.residual;
        row.elements = sol.elements;
        row.r_max = sol.r_max;
        sweep.rows.push_back(row);
        values.push_back(sol.lambda);
    }
    sweep.argmin = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    sweep.interior = sweep.argmin > 0 && sweep.argmin + 1 < radii.size();
    sweep.r_star = refine_argmin_log(radii, values, sweep.argmin);
    return sweep;
}

void write_sweep_csv(const RadiusSweep& sweep, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_sweep_csv: cannot open " + path.string());
    out.precision(15);
    out << "R,alpha,beta,t_atom,lambda1,residual,n,r_max\n";
    for (const auto& r : sweep.rows)
        out << r.radius << ',' << r.alpha << ',' << r.beta << ',' << r.t_atom << ',' << r.lambda << ','
            << r.residual << ',' << r.elements << ',' << r.r_max << '\n';
}

}  // namespace softring
