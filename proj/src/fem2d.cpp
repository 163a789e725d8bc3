#include "softring/fem2d.hpp"

#include "softring/quadrature.hpp"
#include "softring/radial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace softring {
namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

Assembled2d assemble_2d(const Mesh& mesh, const StripMeasure& measure, double beta) {
    if (!(beta >= 0.0)) throw std::invalid_argument("assemble_2d: beta must be nonnegative");
    Assembled2d out;
    out.dof_of_node.assign(mesh.nodes.size(), -1);
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        if (mesh.boundary[i]) continue;
        out.dof_of_node[i] = static_cast<int>(out.node_of_dof.size());
        out.node_of_dof.push_back(static_cast<int>(i));
    }
    const int n = static_cast<int>(out.node_of_dof.size());
    Triplets kt, mt;
    kt.reserve(mesh.triangles.size() * 9);
    mt.reserve(mesh.triangles.size() * 9);
    auto add = [&](Triplets& list, int a, int b, double v) {
        const int i = out.dof_of_node[static_cast<std::size_t>(a)];
        const int j = out.dof_of_node[static_cast<std::size_t>(b)];
        if (i >= 0 && j >= 0) list.emplace_back(i, j, v);
    };

    const auto& transversal = measure.transversal;
    const auto& rule = triangle_rule_deg4();
    for (std::size_t k = 0; k < mesh.triangles.size(); ++k) {
        const auto& tri = mesh.triangles[k];
        const Point& a = mesh.nodes[tri[0]];
        const Point& b = mesh.nodes[tri[1]];
        const Point& c = mesh.nodes[tri[2]];
        const double area = 0.5 * cross(b - a, c - a);
        const std::array<Point, 3> edge = {c - b, a - c, b - a};  // opposite to each vertex
        double me[3][3];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double kij = edge[i].dot(edge[j]) / (4.0 * area);
                me[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
                double v = kij;
                if (beta > 0.0 && mesh.regions[k] == Region::omega) v += beta * me[i][j];
                add(kt, tri[i], tri[j], v);
                add(mt, tri[i], tri[j], me[i][j]);
            }
        }
        if (transversal.has_density() && mesh.regions[k] == Region::strip) {
            const auto& p = mesh.params[k];
            const double param_area = 0.5 * std::abs((p[1] - p[0]).x() * (p[2] - p[0]).y() -
                                                     (p[1] - p[0]).y() * (p[2] - p[0]).x());
            double de[3][3] = {};
            for (const auto& q : rule) {
                const Eigen::Vector2d st = q.l1 * p[0] + q.l2 * p[1] + q.l3 * p[2];
                const double jac = 1.0 + measure.curve.curvature_at(st.x()) * st.y();
                const double w = q.weight * param_area * transversal.density()(st.y()) * jac;
                const double phi[3] = {q.l1, q.l2, q.l3};
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) de[i][j] += w * phi[i] * phi[j];
            }
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) add(kt, tri[i], tri[j], -de[i][j]);
        }
    }

    const double g = 0.5 / std::sqrt(3.0);
    const double gauss[2] = {0.5 - g, 0.5 + g};
    for (const auto& atom : transversal.atoms()) {
        const FittedChain* chain = mesh.chain_at(atom.t);
        if (!chain) throw std::invalid_argument("assemble_2d: atom has no fitted chain in the mesh");
        const std::size_t m = chain->nodes.size();
        const double ds = measure.curve.length() / static_cast<double>(m);
        for (std::size_t e = 0; e < m; ++e) {
            const int na = chain->nodes[e], nb = chain->nodes[(e + 1) % m];
            double le[2][2] = {};
            for (double u : gauss) {
                const double s = chain->s[e] + u * ds;
                const double w = 0.5 * ds * (1.0 + measure.curve.curvature_at(s) * atom.t);
                const double phi[2] = {1.0 - u, u};
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) le[i][j] += w * phi[i] * phi[j];
            }
            const int ids[2] = {na, nb};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) add(kt, ids[i], ids[j], -atom.alpha * le[i][j]);
        }
    }

    out.pair.stiffness.resize(n, n);
    out.pair.mass.resize(n, n);
    out.pair.stiffness.setFromTriplets(kt.begin(), kt.end());
    out.pair.mass.setFromTriplets(mt.begin(), mt.end());
    return out;
}

Fem2dSolution lowest_2d(const Assembled2d& assembled, const Mesh& mesh, double alpha, double beta,
                        double lambda_hint, std::uint64_t seed) {
    Fem2dSolution sol;
    const auto& pair = assembled.pair;
    double shift = -4.0 * alpha * alpha - beta - 10.0;
    if (std::isfinite(lambda_hint) && lambda_hint < -kZeroTolerance) {
        shift = 1.3 * lambda_hint - 0.02 * std::max(alpha * alpha, 1e-3);
    } else {
        double lo = 0.0, hi = 0.0;
        if (!bracket_lowest_eigenvalue(pair, shift, -kZeroTolerance, 0.05, lo, hi)) {
            sol.field.assign(mesh.nodes.size(), 0.0);
            sol.warnings.push_back("no eigenvalue below -tol_zero");
            return sol;
        }
        shift = lo - 0.05 * std::abs(lo);
    }
    EigenResult res;
    for (int attempt = 0;; ++attempt) {
        try {
            res = lowest_pairs(pair, 1, shift, 1e-8, LanczosOptions{.seed = seed});
            break;
        } catch (const ShiftNotBelowSpectrum&) {
            if (attempt >= 12) throw;
            shift = 2.0 * shift - 0.05;
        }
    }
    sol.shift = shift;
    sol.iterations = res.iterations;
    sol.raw_lambda = res.eigenvalues.front();
    sol.residual = res.residuals.front();
    sol.bound_state = sol.raw_lambda < -kZeroTolerance;
    sol.lambda = sol.bound_state ? sol.raw_lambda : 0.0;

    sol.field.assign(mesh.nodes.size(), 0.0);
    double sum = 0.0;
    for (std::size_t d = 0; d < assembled.node_of_dof.size(); ++d) {
        const double v = res.eigenvectors(static_cast<Eigen::Index>(d), 0);
        sol.field[static_cast<std::size_t>(assembled.node_of_dof[d])] = v;
        sum += v;
    }
    if (sum < 0.0)
        for (double& v : sol.field) v = -v;

    double max_r = 0.0;
    for (const auto& c : mesh.chains.back().nodes) max_r = std::max(max_r, (mesh.nodes[c] - mesh.center).norm());
    const double cut = mesh.r_out - 0.1 * (mesh.r_out - max_r);
    double total = 0.0, tail = 0.0;
    for (std::size_t k = 0; k < mesh.triangles.size(); ++k) {
        const auto& t = mesh.triangles[k];
        const double u0 = sol.field[t[0]], u1 = sol.field[t[1]], u2 = sol.field[t[2]];
        const double m = mesh.triangle_area(k) / 6.0 * (u0 * u0 + u1 * u1 + u2 * u2 + u0 * u1 + u1 * u2 + u0 * u2);
        total += m;
        const Point centroid = (mesh.nodes[t[0]] + mesh.nodes[t[1]] + mesh.nodes[t[2]]) / 3.0;
        if ((centroid - mesh.center).norm() > cut) tail += m;
    }
    sol.tail_mass = total > 0.0 ? tail / total : 0.0;
    if (sol.tail_mass > 1e-6) sol.warnings.push_back("ground-state mass near the truncation circle exceeds 1e-6");
    return sol;
}

double evaluate_field(const Mesh& mesh, const PointLocator& locator, const std::vector<double>& field,
                      const Point& x) {
    Eigen::Vector3d bary;
    const int k = locator.locate(x, bary);
    if (k < 0) return std::numeric_limits<double>::quiet_NaN();
    const auto& t = mesh.triangles[static_cast<std::size_t>(k)];
    return bary[0] * field[t[0]] + bary[1] * field[t[1]] + bary[2] * field[t[2]];
}

double trace_norm(const Mesh& mesh, const PointLocator& locator, const std::vector<double>& field,
                  const ParallelCurve& curve) {
    double sum = 0.0;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const double u = evaluate_field(mesh, locator, field, curve.points[i]);
        if (!std::isfinite(u)) throw std::out_of_range("trace_norm: parallel curve leaves the mesh");
        sum += u * u * curve.weights[i];
    }
    return sum;
}

double circle_pilot(double length, const TransversalMeasure& transversal, double beta, int elements) {
    RadialProblem p;
    p.radius = length / (2.0 * std::numbers::pi);
    p.transversal = transversal;
    p.beta = beta;
    p.elements = elements;
    return lowest_radial(p).lambda;
}

StripSolve solve_strip(const StripMeasure& measure, double beta, const Fem2dOptions& options) {
    StripSolve out;
    const auto& tr = measure.transversal;
    out.lambda_pilot = std::isfinite(options.lambda_pilot)
                           ? options.lambda_pilot
                           : circle_pilot(measure.curve.length(), tr, beta, options.pilot_elements);
    const double decay = out.lambda_pilot < -kZeroTolerance ? 1.0 / std::sqrt(-out.lambda_pilot) : 0.0;

    MeshOptions mo;
    mo.h = options.h;
    mo.decay_length = decay;
    double max_r = 0.0;
    const Point c = measure.curve.centroid();
    for (const auto& smp : measure.curve.samples()) max_r = std::max(max_r, (smp.position - c).norm());
    mo.r_out = options.r_out > 0.0
                   ? options.r_out
                   : max_r + tr.d_plus() + (decay > 0.0 ? std::min(12.0 * decay, 400.0) : 40.0);
    std::vector<double> atoms;
    for (const auto& a : tr.atoms()) atoms.push_back(a.t);
    out.mesh = generate_mesh(measure.curve, tr.d_minus(), tr.d_plus(), atoms, mo);
    const Assembled2d assembled = assemble_2d(out.mesh, measure, beta);
    out.unknowns = assembled.node_of_dof.size();
    out.solution = lowest_2d(assembled, out.mesh, tr.mass(), beta,
                             out.lambda_pilot < -kZeroTolerance ? out.lambda_pilot : std::numeric_limits<double>::quiet_NaN(),
                             options.seed);
    return out;
}

void export_field_csv(const Mesh& mesh, const std::vector<double>& field, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_field_csv: cannot open " + path.string());
    out.precision(12);
    out << "x,y,u\n";
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
        out << mesh.nodes[i].x() << ',' << mesh.nodes[i].y() << ',' << field[i] << '\n';
}

}  // namespace softring
