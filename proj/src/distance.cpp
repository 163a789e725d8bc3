#include "softring/distance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace softring {
namespace {

constexpr int kLeafSize = 8;

/// Squared distance from x to segment [a, b] and the segment parameter of the closest point.
double segment_distance2(const Point& x, const Point& a, const Point& b, double& u) {
    const Point ab = b - a;
    const double len2 = ab.squaredNorm();
    u = len2 > 0.0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (a + u * ab - x).squaredNorm();
}

}  // namespace

DistanceField::DistanceField(Curve curve) : curve_(std::move(curve)) {
    nodes_.reserve(2 * curve_.size() / kLeafSize + 8);
    build(0, static_cast<int>(curve_.size()));
}

int DistanceField::build(int first, int count) {
    const auto& smp = curve_.samples();
    const int n = static_cast<int>(smp.size());
    Node node;
    node.first = first;
    node.count = count;
    for (int i = first; i < first + count; ++i) {
        node.box.extend(smp[i].position);
        node.box.extend(smp[(i + 1) % n].position);
    }
    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (count > kLeafSize) {
        const int half = count / 2;
        const int left = build(first, half);
        const int right = build(first + half, count - half);
        nodes_[index].left = left;
        nodes_[index].right = right;
    }
    return index;
}

DistanceQuery DistanceField::query(const Point& x) const {
    const auto& smp = curve_.samples();
    const int n = static_cast<int>(smp.size());
    double best = std::numeric_limits<double>::infinity();
    int best_seg = 0;
    double best_u = 0.0;

    std::array<int, 64> stack{};
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (node.box.squaredExteriorDistance(x) >= best) continue;
        if (node.left < 0) {
            for (int i = node.first; i < node.first + node.count; ++i) {
                double u;
                const double d2 = segment_distance2(x, smp[i].position, smp[(i + 1) % n].position, u);
                if (d2 < best) {
                    best = d2;
                    best_seg = i;
                    best_u = u;
                }
            }
            continue;
        }
        const double dl = nodes_[node.left].box.squaredExteriorDistance(x);
        const double dr = nodes_[node.right].box.squaredExteriorDistance(x);
        // Push the farther child first so the nearer one is explored first.
        if (dl < dr) {
            stack[top++] = node.right;
            stack[top++] = node.left;
        } else {
            stack[top++] = node.left;
            stack[top++] = node.right;
        }
    }

    const double ds = curve_.spacing();
    const double s0 = (best_seg + best_u) * ds;
    double s = s0;
    for (int it = 0; it < 12; ++it) {
        const Curve::Jet jet = curve_.jet_at(s);
        const Point d = jet.position - x;
        const double g = d.dot(jet.first);
        const double gp = jet.first.squaredNorm() + d.dot(jet.second);
        if (!(gp > 0.0)) {
            s = s0;
            break;
        }
        const double step = std::clamp(g / gp, -ds, ds);
        s -= step;
        if (std::abs(step) < 1e-15 * curve_.length()) break;
    }
    if (std::abs(s - s0) > 2.0 * ds) s = s0;

    DistanceQuery q;
    q.s = curve_.wrap(s);
    q.foot = curve_.point_at(q.s);
    const Point diff = x - q.foot;
    const double dist = diff.norm();
    q.t = diff.dot(curve_.normal_at(q.s)) < 0.0 ? -dist : dist;
    return q;
}

double DistanceField::level_curvature(const DistanceQuery& q) const {
    const double kappa = curve_.curvature_at(q.s);
    const double jac = std::max(1.0 + kappa * q.t, 1e-3);
    return kappa / jac;
}

Box curve_box(const Curve& curve, double margin) {
    Box b;
    b.lo = curve.samples().front().position;
    b.hi = b.lo;
    for (const auto& p : curve.samples()) {
        b.lo = b.lo.cwiseMin(p.position);
        b.hi = b.hi.cwiseMax(p.position);
    }
    b.lo.array() -= margin;
    b.hi.array() += margin;
    return b;
}

DistanceGrid signed_distance_grid(std::shared_ptr<const DistanceField> field, const Box& box,
                                  double h_grid, bool local_patch) {
    if (!field) throw std::invalid_argument("signed_distance_grid: missing field");
    if (!(h_grid > 0.0)) throw std::invalid_argument("signed_distance_grid: h must be positive");
    if (!((box.hi - box.lo).array() > h_grid).all())
        throw std::invalid_argument("signed_distance_grid: box smaller than one cell");
    const Box tight = curve_box(field->curve(), h_grid);
    if (!local_patch && ((tight.lo.array() < box.lo.array()).any() || (tight.hi.array() > box.hi.array()).any()))
        throw std::invalid_argument("signed_distance_grid: box does not contain the curve with margin");
    DistanceGrid grid;
    grid.box = box;
    grid.h = h_grid;
    grid.nx = static_cast<int>(std::floor((box.hi.x() - box.lo.x()) / h_grid)) + 1;
    grid.ny = static_cast<int>(std::floor((box.hi.y() - box.lo.y()) / h_grid)) + 1;
    grid.values.resize(static_cast<std::size_t>(grid.nx) * grid.ny);
    grid.field = std::move(field);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            grid.values[static_cast<std::size_t>(j) * grid.nx + i] = (*grid.field)(grid.node(i, j));
    return grid;
}

namespace {

struct Crossing {
    Point p;
    double kappa;
};

/// Crossing of `level` on the grid edge from a to b, refined with the exact distance.
Crossing refine_crossing(const DistanceField& field, const Point& a, const Point& b, double fa,
                         double fb, double level) {
    fa -= level;
    fb -= level;
    double ua = 0.0, ub = 1.0;
    double u = fa / (fa - fb);
    DistanceQuery q = field.query(a + u * (b - a));
    double fu = q.t - level;
    const double scale = 1e-13 * std::max(1.0, std::abs(level));
    int side = 0;
    for (int it = 0; it < 30 && std::abs(fu) > scale; ++it) {
        if ((fu < 0.0) == (fa < 0.0)) {
            ua = u;
            fa = fu;
            if (side == -1) fb *= 0.5;
            side = -1;
        } else {
            ub = u;
            fb = fu;
            if (side == 1) fa *= 0.5;
            side = 1;
        }
        u = (ua * fb - ub * fa) / (fb - fa);
        if (!(u > ua && u < ub)) u = 0.5 * (ua + ub);
        q = field.query(a + u * (b - a));
        fu = q.t - level;
        if (ub - ua < 1e-15) break;
    }
    return {a + u * (b - a), field.level_curvature(q)};
}

double arc_length(const Crossing& p, const Crossing& q) {
    const double c = (q.p - p.p).norm();
    const double theta = std::min(std::abs(0.5 * (p.kappa + q.kappa)) * c, 1.0);
    return c * (1.0 + theta * theta / 24.0);
}

double cell_contours(const DistanceGrid& grid, int i, int j, double level,
                     std::unordered_map<long long, Crossing>& cache) {
    const std::array<double, 4> v = {grid.at(i, j), grid.at(i + 1, j), grid.at(i + 1, j + 1),
                                     grid.at(i, j + 1)};
    const std::array<Point, 4> corner = {grid.node(i, j), grid.node(i + 1, j), grid.node(i + 1, j + 1),
                                         grid.node(i, j + 1)};
    // Edge e joins corners e and e+1; key identifies the edge globally.
    const long long base = static_cast<long long>(j) * grid.nx + i;
    const std::array<long long, 4> key = {2 * base, 2 * (base + 1) + 1, 2 * (base + grid.nx),
                                          2 * base + 1};
    std::array<bool, 4> inside{};
    for (int c = 0; c < 4; ++c) inside[c] = v[c] < level;
    std::array<int, 4> edges{};
    int count = 0;
    for (int e = 0; e < 4; ++e)
        if (inside[e] != inside[(e + 1) % 4]) edges[count++] = e;
    if (count == 0) return 0.0;
    auto crossing = [&](int e) -> const Crossing& {
        auto it = cache.find(key[e]);
        if (it != cache.end()) return it->second;
        const int a = e, b = (e + 1) % 4;
        return cache.emplace(key[e], refine_crossing(*grid.field, corner[a], corner[b], v[a], v[b], level))
            .first->second;
    };
    if (count == 2) return arc_length(crossing(edges[0]), crossing(edges[1]));
    // Saddle: decide the connection with the cell-centre value.
    const bool centre_inside = 0.25 * (v[0] + v[1] + v[2] + v[3]) < level;
    if (centre_inside == inside[0])
        return arc_length(crossing(0), crossing(1)) + arc_length(crossing(2), crossing(3));
    return arc_length(crossing(3), crossing(0)) + arc_length(crossing(1), crossing(2));
}

}  // namespace

std::vector<double> level_set_lengths(const DistanceGrid& grid, const std::vector<double>& levels) {
    if (!grid.field) throw std::invalid_argument("level_set_lengths: grid has no field");
    const std::size_t nl = levels.size();
    std::vector<std::size_t> order(nl);
    for (std::size_t k = 0; k < nl; ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return levels[a] < levels[b]; });
    std::vector<double> sorted(nl);
    for (std::size_t k = 0; k < nl; ++k) sorted[k] = levels[order[k]];

    std::vector<std::vector<int>> buckets(nl);
    for (int j = 0; j + 1 < grid.ny; ++j) {
        for (int i = 0; i + 1 < grid.nx; ++i) {
            const double a = grid.at(i, j), b = grid.at(i + 1, j), c = grid.at(i + 1, j + 1),
                         d = grid.at(i, j + 1);
            const double lo = std::min({a, b, c, d}), hi = std::max({a, b, c, d});
            // A cell is crossed by the levels in (lo, hi].
            auto first = std::upper_bound(sorted.begin(), sorted.end(), lo);
            auto last = std::upper_bound(sorted.begin(), sorted.end(), hi);
            for (auto it = first; it != last; ++it)
                buckets[static_cast<std::size_t>(it - sorted.begin())].push_back(j * grid.nx + i);
        }
    }
    std::vector<double> out(nl, 0.0);
    for (std::size_t k = 0; k < nl; ++k) {
        std::unordered_map<long long, Crossing> cache;
        cache.reserve(2 * buckets[k].size());
        double total = 0.0;
        for (int cell : buckets[k]) total += cell_contours(grid, cell % grid.nx, cell / grid.nx, sorted[k], cache);
        out[order[k]] = total;
    }
    return out;
}

double level_set_length(const DistanceGrid& grid, double level) {
    return level_set_lengths(grid, {level}).front();
}

double inradius(const DistanceGrid& grid) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < grid.values.size(); ++k)
        if (grid.values[k] < grid.values[best]) best = k;
    Point x = grid.node(static_cast<int>(best % grid.nx), static_cast<int>(best / grid.nx));
    double value = -(*grid.field)(x);
    double step = grid.h;
    const std::array<Point, 8> dirs = {Point(1, 0),  Point(-1, 0), Point(0, 1),   Point(0, -1),
                                       Point(1, 1),  Point(-1, 1), Point(1, -1), Point(-1, -1)};
    while (step > 1e-12 * std::max(1.0, grid.h)) {
        bool improved = false;
        for (const Point& d : dirs) {
            const Point y = x + step * d.normalized();
            const double vy = -(*grid.field)(y);
            if (vy > value) {
                value = vy;
                x = y;
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
    return value;
}

}  // namespace softring
